// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Equivalent polarization currents of a dielectric block and their radiated
// far field, directivity, and azimuth cuts.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "pinch/constants.hpp"
#include "pinch/cut.hpp"
#include "pinch/error.hpp"
#include "pinch/geometry.hpp"
#include "pinch/vector.hpp"
#include "pinch/waveguide.hpp"

namespace pinch {

//! Per-voxel equivalent current density (A/m^2) over its mesh.
struct CurrentSet
{
    Mesh mesh;
    std::vector<CVec3> density;

    std::size_t size() const { return density.size(); }
};

//! J = j omega (eps_r - 1) eps0 E_inc for every voxel.
inline CurrentSet
equivalent_currents(const Mesh& mesh, const FieldSamples& fields, double eps_r, const SignalSpec& sig)
{
    detail::require(eps_r >= 1, "PA relative permittivity must be >= 1");
    detail::require(fields.size() == mesh.size(), "field samples do not match mesh");
    const complex scale{0, sig.angular_frequency() * (eps_r - 1) * vacuum_permittivity};
    CurrentSet out{mesh, {}};
    out.density.reserve(fields.size());
    for (const auto& e : fields.e_inc)
        out.density.push_back(scale * e);
    return out;
}

//! Observation direction (global spherical angles, rad).
struct Direction
{
    double theta;
    double phi;

    Vec3 radial() const
    {
        return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
    }
    Vec3 theta_hat() const
    {
        return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
    }
    Vec3 phi_hat() const { return {-std::sin(phi), std::cos(phi), 0}; }
};

//! Transverse far-field components with exp(-j k0 r)/r stripped (V).
struct FarField
{
    complex e_theta;
    complex e_phi;

    double power_density_numerator() const { return std::norm(e_theta) + std::norm(e_phi); }
};

namespace detail {
//! Radiation vector N = sum J exp(j k0 r'.r) dV, summed in mesh order.
inline CVec3 radiation_vector(const CurrentSet& currents, Vec3 rhat, double k0)
{
    CompensatedSum acc[6];
    for (std::size_t i = 0; i < currents.size(); ++i)
    {
        const Voxel& v = currents.mesh.voxels[i];
        const complex w = std::polar(v.volume, k0 * dot(v.centroid, rhat));
        for (int c = 0; c < 3; ++c)
        {
            const complex t = currents.density[i][c] * w;
            acc[2 * c].add(t.real());
            acc[2 * c + 1].add(t.imag());
        }
    }
    return {complex{acc[0].value(), acc[1].value()},
            complex{acc[2].value(), acc[3].value()},
            complex{acc[4].value(), acc[5].value()}};
}
} // namespace detail

/*!
 * Far field of the current set toward `dir`.
 *
 * Returns -j omega mu0 / (4 pi) times the theta and phi projections of the
 * radiation vector; the radial part of N is discarded.
 */
inline FarField far_field_at(const CurrentSet& currents, const Direction& dir, double k0)
{
    detail::require(currents.size() > 0, "far field needs a non-empty current set");
    detail::require(currents.size() == currents.mesh.size(), "current set does not match its mesh");
    const CVec3 n = detail::radiation_vector(currents, dir.radial(), k0);
    const double omega = k0 * speed_of_light;
    const complex factor{0, -omega * vacuum_permeability / (4 * pi)};
    return {factor * dot(n, dir.theta_hat()), factor * dot(n, dir.phi_hat())};
}

//! Radiation intensity U = |E|^2 / (2 eta0), W/sr.
inline double radiation_intensity(const FarField& f)
{
    return f.power_density_numerator() / (2 * free_space_impedance);
}

inline double to_db(double linear) { return 10 * std::log10(std::max(linear, 1e-30)); }

struct Pattern
{
    std::vector<double> theta; // rad, strictly increasing
    std::vector<double> phi;   // rad, strictly increasing
    std::vector<FarField> field; // theta-major
    std::vector<double> directivity; // linear; empty until normalized
    bool full_sphere = false;

    std::size_t index(std::size_t i, std::size_t j) const { return i * phi.size() + j; }
    double intensity(std::size_t i, std::size_t j) const { return radiation_intensity(field[index(i, j)]); }
    bool has_directivity() const { return directivity.size() == field.size() && !field.empty(); }
    double directivity_dbi(std::size_t i, std::size_t j) const { return to_db(directivity.at(index(i, j))); }
};

//! Midpoint polar grid theta_i = (i + 1/2) pi / n.
inline std::vector<double> midpoint_theta_grid(std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = (static_cast<double>(i) + 0.5) * pi / static_cast<double>(n);
    return g;
}

//! Azimuth grid phi_j = j 2 pi / n.
inline std::vector<double> uniform_phi_grid(std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j)
        g[j] = static_cast<double>(j) * two_pi / static_cast<double>(n);
    return g;
}

//! An empty full-sphere grid ready to be filled (used for synthetic patterns).
inline Pattern make_sphere_grid(std::size_t n_theta, std::size_t n_phi)
{
    detail::require(n_theta >= 2 && n_phi >= 2, "pattern grid needs n_theta, n_phi >= 2");
    Pattern p;
    p.theta = midpoint_theta_grid(n_theta);
    p.phi = uniform_phi_grid(n_phi);
    p.field.assign(n_theta * n_phi, FarField{});
    p.full_sphere = true;
    return p;
}

namespace detail {
//! Run body(begin, end) over [0, n) split into contiguous chunks.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1)
    {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t)
    {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b < e)
            pool.emplace_back(body, b, e);
    }
    for (auto& th : pool)
        th.join();
}
} // namespace detail

//! Evaluate the far field on an arbitrary (theta x phi) grid.
inline Pattern pattern_on_grid(const CurrentSet& currents,
                               double k0,
                               std::vector<double> theta,
                               std::vector<double> phi,
                               unsigned threads = 1)
{
    detail::require(!theta.empty() && !phi.empty(), "pattern grid is empty");
    detail::require(std::is_sorted(theta.begin(), theta.end()) && std::adjacent_find(theta.begin(), theta.end()) == theta.end(),
                    "theta grid must be strictly increasing");
    detail::require(std::is_sorted(phi.begin(), phi.end()) && std::adjacent_find(phi.begin(), phi.end()) == phi.end(),
                    "phi grid must be strictly increasing");
    detail::require(currents.size() > 0, "pattern needs a non-empty current set");
    Pattern p;
    p.theta = std::move(theta);
    p.phi = std::move(phi);
    p.field.resize(p.theta.size() * p.phi.size());
    detail::parallel_for(p.field.size(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
        {
            const Direction d{p.theta[k / p.phi.size()], p.phi[k % p.phi.size()]};
            p.field[k] = far_field_at(currents, d, k0);
        }
    });
    return p;
}

//! Full-sphere pattern on the midpoint theta / uniform phi grid.
inline Pattern full_pattern(const CurrentSet& currents,
                            const SignalSpec& sig,
                            std::size_t n_theta,
                            std::size_t n_phi,
                            unsigned threads = 1)
{
    detail::require(n_theta >= 2 && n_phi >= 2, "pattern grid needs n_theta, n_phi >= 2");
    Pattern p = pattern_on_grid(currents, sig.wavenumber(), midpoint_theta_grid(n_theta), uniform_phi_grid(n_phi), threads);
    p.full_sphere = true;
    return p;
}

//! Midpoint-rule integral of U over the sphere, W.
inline double total_radiated_power(const Pattern& p)
{
    detail::require(p.full_sphere, "radiated power needs a full-sphere pattern");
    const double d_theta = pi / static_cast<double>(p.theta.size());
    const double d_phi = two_pi / static_cast<double>(p.phi.size());
    CompensatedSum sum;
    for (std::size_t i = 0; i < p.theta.size(); ++i)
    {
        const double w = std::sin(p.theta[i]) * d_theta * d_phi;
        for (std::size_t j = 0; j < p.phi.size(); ++j)
            sum.add(p.intensity(i, j) * w);
    }
    const double prad = sum.value();
    if (!(prad > 0) || !std::isfinite(prad))
        throw NumericalError("radiated power is zero: directivity undefined");
    return prad;
}

//! Copy of `p` with D = 4 pi U / P_rad filled in.
inline Pattern directivity_pattern(Pattern p)
{
    const double prad = total_radiated_power(p);
    p.directivity.resize(p.field.size());
    for (std::size_t i = 0; i < p.theta.size(); ++i)
    {
        for (std::size_t j = 0; j < p.phi.size(); ++j)
            p.directivity[p.index(i, j)] = 4 * pi * p.intensity(i, j) / prad;
    }
    return p;
}

//! Largest directivity on the grid with its (theta, phi) indices.
struct PatternPeak
{
    double directivity;
    std::size_t theta_index;
    std::size_t phi_index;
};

inline PatternPeak pattern_peak(const Pattern& p)
{
    detail::require(p.has_directivity(), "pattern has no directivity");
    const auto it = std::max_element(p.directivity.begin(), p.directivity.end());
    const auto k = static_cast<std::size_t>(it - p.directivity.begin());
    return {*it, k / p.phi.size(), k % p.phi.size()};
}

//! Index of the theta row nearest `theta_cut`; throws if outside the grid.
inline std::size_t nearest_theta_row(const Pattern& p, double theta_cut)
{
    detail::require(!p.theta.empty(), "pattern has no theta rows");
    const double half = p.theta.size() > 1 ? 0.5 * (p.theta[1] - p.theta[0]) : 0.0;
    if (theta_cut < p.theta.front() - half - 1e-12 || theta_cut > p.theta.back() + half + 1e-12)
        throw InvalidArgument("cut angle lies outside the pattern's theta grid");
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.theta.size(); ++i)
    {
        if (std::abs(p.theta[i] - theta_cut) < std::abs(p.theta[best] - theta_cut))
            best = i;
    }
    return best;
}

//! Directivity (dBi) along the pattern row nearest theta_cut, no interpolation.
inline Cut1D azimuth_cut(const Pattern& p, double theta_cut)
{
    detail::require(p.has_directivity(), "azimuth cut needs a pattern with directivity");
    const std::size_t row = nearest_theta_row(p, theta_cut);
    Cut1D cut;
    cut.label = CutLabel::simulated;
    cut.phi_deg.reserve(p.phi.size());
    cut.value_db.reserve(p.phi.size());
    for (std::size_t j = 0; j < p.phi.size(); ++j)
    {
        cut.phi_deg.push_back(rad_to_deg(p.phi[j]));
        cut.value_db.push_back(p.directivity_dbi(row, j));
    }
    return cut;
}

//! sin(theta)-weighted grid average of D (1 for a normalized full sphere).
inline double mean_directivity(const Pattern& p)
{
    detail::require(p.has_directivity() && p.full_sphere, "mean directivity needs a normalized full-sphere pattern");
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t i = 0; i < p.theta.size(); ++i)
    {
        const double w = std::sin(p.theta[i]);
        for (std::size_t j = 0; j < p.phi.size(); ++j)
        {
            num.add(w * p.directivity[p.index(i, j)]);
            den.add(w);
        }
    }
    return num.value() / den.value();
}

} // namespace pinch
