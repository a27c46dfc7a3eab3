// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Guided mode of a dielectric rod and its evanescent tail, sampled as the
// (unperturbed) incident field inside a PA mesh.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pinch/constants.hpp"
#include "pinch/error.hpp"
#include "pinch/geometry.hpp"
#include "pinch/vector.hpp"

namespace pinch {

struct SignalSpec
{
    double frequency;          // Hz
    complex amplitude{1.0, 0}; // modal amplitude at the feed

    double wavelength() const { return speed_of_light / frequency; }
    double angular_frequency() const { return two_pi * frequency; }
    double wavenumber() const { return two_pi / wavelength(); }
};

inline SignalSpec make_signal(double frequency, complex amplitude = {1.0, 0})
{
    detail::require(frequency > 0 && std::isfinite(frequency), "signal frequency must be positive");
    return {frequency, amplitude};
}

struct ModeConstants
{
    double beta_g;            // propagation constant, rad/m
    double alpha;             // transverse attenuation constant, 1/m
    double guided_wavelength; // m
};

//! Propagation and transverse decay constants of the guided mode.
inline ModeConstants mode_constants(double n_g, double wavelength)
{
    detail::require(wavelength > 0, "wavelength must be positive");
    detail::require(n_g >= 1, "effective index below 1: mode is not guided");
    const double k0 = two_pi / wavelength;
    return {k0 * n_g, k0 * std::sqrt(n_g * n_g - 1), wavelength / n_g};
}

struct WaveguideModel
{
    Vec3 axis_point;
    Vec3 axis_direction; // unit, direction of propagation
    double surface_radius;
    double n_g;
    double feed_arclength_origin = 0; // s = 0 at the feed

    //! Signed arclength along the axis measured from the feed.
    double arclength(Vec3 p) const { return dot(p - axis_point, axis_direction) - feed_arclength_origin; }

    //! Distance from the rod surface, clamped at 0 inside the rod.
    double surface_distance(Vec3 p) const
    {
        const Vec3 rel = p - axis_point;
        const Vec3 radial = rel - dot(rel, axis_direction) * axis_direction;
        return std::max(0.0, norm(radial) - surface_radius);
    }
};

inline WaveguideModel make_waveguide(Vec3 axis_point,
                                     Vec3 axis_direction,
                                     double surface_radius,
                                     double n_g,
                                     double feed_arclength_origin = 0)
{
    const double len = norm(axis_direction);
    detail::require(len > 0 && std::isfinite(len), "waveguide axis direction must be nonzero");
    detail::require(surface_radius > 0, "waveguide radius must be positive");
    detail::require(n_g > 1, "waveguide effective index must exceed 1");
    return {axis_point, (1.0 / len) * axis_direction, surface_radius, n_g, feed_arclength_origin};
}

//! A0 * exp(-alpha d) * exp(-j beta_g s) at a point outside (or on) the rod.
inline complex evanescent_amplitude(Vec3 point, const WaveguideModel& wg, const SignalSpec& sig)
{
    const auto mc = mode_constants(wg.n_g, sig.wavelength());
    const double d = wg.surface_distance(point);
    const double s = wg.arclength(point);
    return sig.amplitude * std::exp(-mc.alpha * d) * std::polar(1.0, -mc.beta_g * s);
}

//! Per-voxel incident field, in mesh order.
struct FieldSamples
{
    std::vector<CVec3> e_inc;

    std::size_t size() const { return e_inc.size(); }
};

/*!
 * First-order excitation: the unperturbed evanescent field at each voxel
 * centroid along `polarization`, optionally depleted as exp(-kappa (s - s0))
 * past the upstream edge s0 of the contact region.
 */
inline FieldSamples incident_field(const Mesh& mesh,
                                   const WaveguideModel& wg,
                                   const SignalSpec& sig,
                                   Vec3 polarization,
                                   double depletion = 0)
{
    detail::require(!mesh.empty(), "incident field needs a non-empty mesh");
    detail::require(depletion >= 0, "depletion rate must be non-negative");
    const double len = norm(polarization);
    detail::require(len > 0 && std::isfinite(len), "polarization must be nonzero");
    const Vec3 pol = (1.0 / len) * polarization;
    detail::require(std::abs(dot(pol, wg.axis_direction)) <= 1e-9,
                    "polarization must be transverse to the waveguide axis");

    double s_start = std::numeric_limits<double>::infinity();
    for (const auto& v : mesh.voxels)
        s_start = std::min(s_start, wg.arclength(v.centroid));

    FieldSamples out;
    out.e_inc.reserve(mesh.size());
    for (const auto& v : mesh.voxels)
    {
        complex a = evanescent_amplitude(v.centroid, wg, sig);
        if (depletion > 0)
            a *= std::exp(-depletion * std::max(0.0, wg.arclength(v.centroid) - s_start));
        out.e_inc.push_back(a * pol);
    }
    return out;
}

} // namespace pinch
