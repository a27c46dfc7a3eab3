// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Location-tuning beamforming over PAs on a single waveguide: channel and
// transmit vectors, deterministic received power, and placement search.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "pinch/constants.hpp"
#include "pinch/error.hpp"
#include "pinch/radiator.hpp"
#include "pinch/vector.hpp"

namespace pinch {

struct PaLayout
{
    std::vector<Vec3> locations; // activated PAs, m
    Vec3 feed;
    double guided_wavelength; // m
};

//! Complex amplitude gain of a PA at `pa` toward `user`.
using GainFn = std::function<complex(Vec3 pa, Vec3 user)>;

struct LinkSpec
{
    Vec3 user;
    double frequency; // Hz
    double power;     // total transmit power, W
    GainFn gain;      // empty: isotropic (g = 1)
};

//! Free-space path-loss constant c^2 / (16 pi^2 f^2).
inline double path_loss_constant(double frequency)
{
    return speed_of_light * speed_of_light / (16 * pi * pi * frequency * frequency);
}

namespace detail {
inline void validate(const PaLayout& layout)
{
    require(!layout.locations.empty(), "layout needs at least one PA");
    require(layout.guided_wavelength > 0, "guided wavelength must be positive");
}
inline void validate(const LinkSpec& link)
{
    require(link.frequency > 0, "link frequency must be positive");
    require(link.power > 0, "transmit power must be positive");
}
} // namespace detail

//! h_m = sqrt(eta) exp(-j 2 pi r_m / lambda) / r_m * g_m.
inline std::vector<complex> channel_vector(const PaLayout& layout, const LinkSpec& link)
{
    detail::validate(layout);
    detail::validate(link);
    const double sqrt_eta = std::sqrt(path_loss_constant(link.frequency));
    const double k0 = two_pi * link.frequency / speed_of_light;
    std::vector<complex> h;
    h.reserve(layout.locations.size());
    for (const Vec3& l : layout.locations)
    {
        const double r = distance(link.user, l);
        if (!(r > 0))
            throw InvalidArgument("user coincides with a PA location");
        complex hm = std::polar(sqrt_eta / r, -k0 * r);
        if (link.gain)
            hm *= link.gain(l, link.user);
        h.push_back(hm);
    }
    return h;
}

//! Guided phase shift 2 pi |l_feed - l_m| / lambda_g of each PA.
inline std::vector<double> guided_phases(const PaLayout& layout)
{
    detail::validate(layout);
    std::vector<double> theta;
    theta.reserve(layout.locations.size());
    for (const Vec3& l : layout.locations)
        theta.push_back(two_pi * distance(layout.feed, l) / layout.guided_wavelength);
    return theta;
}

//! Equal-power weights sqrt(P/M) exp(-j theta_m).
inline std::vector<complex> transmit_vector(const PaLayout& layout, double power)
{
    detail::require(power > 0, "transmit power must be positive");
    const auto theta = guided_phases(layout);
    const double amp = std::sqrt(power / static_cast<double>(theta.size()));
    std::vector<complex> s;
    s.reserve(theta.size());
    for (double t : theta)
        s.push_back(std::polar(amp, -t));
    return s;
}

//! |h^H s|^2 for a unit-power symbol and no noise.
inline double received_power(const PaLayout& layout, const LinkSpec& link)
{
    const auto h = channel_vector(layout, link);
    const auto s = transmit_vector(layout, link.power);
    complex y{0, 0};
    for (std::size_t m = 0; m < h.size(); ++m)
        y += std::conj(h[m]) * s[m];
    return std::norm(y);
}

//---------------------------------------------------------------------------//
// Placement search
//---------------------------------------------------------------------------//

struct AxisSegment
{
    Vec3 start;
    Vec3 end;
};

//! Candidate grid start + i * step along the segment, i = 0..floor(L/step).
inline std::vector<Vec3> candidate_grid(const AxisSegment& seg, double step)
{
    detail::require(step > 0 && std::isfinite(step), "grid step must be positive");
    const double len = distance(seg.start, seg.end);
    detail::require(len > 0, "axis segment has zero length");
    const Vec3 dir = (1.0 / len) * (seg.end - seg.start);
    const auto n = static_cast<std::size_t>(std::floor(len / step + 1e-9)) + 1;
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back(seg.start + (static_cast<double>(i) * step) * dir);
    return pts;
}

struct PlacementResult
{
    PaLayout layout;
    std::vector<std::size_t> grid_indices; // ascending
    double power;
};

namespace detail {

class PlacementProblem
{
  public:
    PlacementProblem(std::vector<Vec3> grid, const LinkSpec& link, Vec3 feed, double lambda_g)
        : grid_(std::move(grid)), link_(link), feed_(feed), lambda_g_(lambda_g)
    {
        validate(link_);
        require(lambda_g > 0, "guided wavelength must be positive");
    }

    std::size_t grid_size() const { return grid_.size(); }

    PaLayout layout(const std::vector<std::size_t>& idx) const
    {
        PaLayout l{{}, feed_, lambda_g_};
        for (std::size_t i : idx)
            l.locations.push_back(grid_[i]);
        return l;
    }

    double power(std::vector<std::size_t> idx) const
    {
        std::sort(idx.begin(), idx.end());
        return received_power(layout(idx), link_);
    }

    //! Strictly better power, or equal power and lexicographically smaller.
    static bool better(double p, const std::vector<std::size_t>& a, double best_p, const std::vector<std::size_t>& b)
    {
        if (b.empty())
            return true;
        if (p != best_p)
            return p > best_p;
        return a < b;
    }

    PlacementResult result(std::vector<std::size_t> idx) const
    {
        std::sort(idx.begin(), idx.end());
        const double p = power(idx);
        return {layout(idx), std::move(idx), p};
    }

  private:
    std::vector<Vec3> grid_;
    LinkSpec link_;
    Vec3 feed_;
    double lambda_g_;
};

inline void check_feasible(std::size_t grid_points, std::size_t m)
{
    require(m >= 1, "need at least one PA");
    if (grid_points < m)
        throw InvalidArgument("axis segment too short for the requested number of PAs");
}

} // namespace detail

//! Brute force over all ascending index tuples of distinct grid points.
inline PlacementResult exhaustive_placements(const AxisSegment& seg,
                                             double step,
                                             std::size_t m,
                                             const LinkSpec& link,
                                             Vec3 feed,
                                             double guided_wavelength)
{
    detail::PlacementProblem prob(candidate_grid(seg, step), link, feed, guided_wavelength);
    detail::check_feasible(prob.grid_size(), m);
    const std::size_t n = prob.grid_size();
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i)
        idx[i] = i;
    std::vector<std::size_t> best;
    double best_p = 0;
    while (true)
    {
        const double p = prob.power(idx);
        if (detail::PlacementProblem::better(p, idx, best_p, best))
        {
            best = idx;
            best_p = p;
        }
        // Next combination in lexicographic order.
        std::size_t k = m;
        while (k > 0 && idx[k - 1] == n - m + (k - 1))
            --k;
        if (k == 0)
            break;
        ++idx[k - 1];
        for (std::size_t i = k; i < m; ++i)
            idx[i] = idx[i - 1] + 1;
    }
    return prob.result(best);
}

/*!
 * Greedy construction plus coordinate descent, restarted from every grid
 * point as the first PA. Restarting from every point makes the M = 2 result
 * match exhaustive search; for larger M it is a local optimum.
 */
inline PlacementResult greedy_placements(const AxisSegment& seg,
                                         double step,
                                         std::size_t m,
                                         const LinkSpec& link,
                                         Vec3 feed,
                                         double guided_wavelength)
{
    detail::PlacementProblem prob(candidate_grid(seg, step), link, feed, guided_wavelength);
    detail::check_feasible(prob.grid_size(), m);
    const std::size_t n = prob.grid_size();

    auto sorted = [](std::vector<std::size_t> v) {
        std::sort(v.begin(), v.end());
        return v;
    };

    std::vector<std::size_t> best;
    double best_p = 0;
    for (std::size_t start = 0; start < n; ++start)
    {
        std::vector<std::size_t> cur{start};
        std::vector<bool> used(n, false);
        used[start] = true;
        while (cur.size() < m)
        {
            std::size_t pick = n;
            double pick_p = -1;
            for (std::size_t c = 0; c < n; ++c)
            {
                if (used[c])
                    continue;
                auto trial = cur;
                trial.push_back(c);
                const double p = prob.power(trial);
                if (p > pick_p)
                {
                    pick = c;
                    pick_p = p;
                }
            }
            cur.push_back(pick);
            used[pick] = true;
        }

        double cur_p = prob.power(cur);
        for (int sweep = 0; sweep < 100; ++sweep)
        {
            bool improved = false;
            for (std::size_t k = 0; k < m; ++k)
            {
                for (std::size_t c = 0; c < n; ++c)
                {
                    if (used[c])
                        continue;
                    auto trial = cur;
                    trial[k] = c;
                    const double p = prob.power(trial);
                    if (p > cur_p)
                    {
                        used[cur[k]] = false;
                        used[c] = true;
                        cur = std::move(trial);
                        cur_p = p;
                        improved = true;
                    }
                }
            }
            if (!improved)
                break;
        }

        auto key = sorted(cur);
        if (detail::PlacementProblem::better(cur_p, key, best_p, best))
        {
            best = std::move(key);
            best_p = cur_p;
        }
    }
    return prob.result(best);
}

//! Exhaustive search for M <= 2, greedy descent with restarts beyond.
inline PlacementResult optimize_placements(const AxisSegment& seg,
                                           double step,
                                           std::size_t m,
                                           const LinkSpec& link,
                                           Vec3 feed,
                                           double guided_wavelength)
{
    if (m <= 2)
        return exhaustive_placements(seg, step, m, link, feed, guided_wavelength);
    return greedy_placements(seg, step, m, link, feed, guided_wavelength);
}

/*!
 * Gain model sampling a directivity pattern: sqrt(D) at the grid sample
 * nearest the PA-to-user direction, phased by the dominant transverse
 * component. The pattern frame is the PA frame translated to each PA.
 */
inline GainFn pattern_gain(Pattern pattern)
{
    detail::require(pattern.has_directivity(), "pattern gain needs a normalized pattern");
    return [p = std::move(pattern)](Vec3 pa, Vec3 user) -> complex {
        const Vec3 d = user - pa;
        const double r = norm(d);
        if (!(r > 0))
            throw InvalidArgument("user coincides with a PA location");
        const double theta = std::acos(std::clamp(d.z / r, -1.0, 1.0));
        double phi = std::atan2(d.y, d.x);
        if (phi < 0)
            phi += two_pi;
        auto nearest = [](const std::vector<double>& g, double x, bool periodic) {
            std::size_t best = 0;
            double best_err = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < g.size(); ++i)
            {
                double e = std::abs(g[i] - x);
                if (periodic)
                    e = std::min(e, two_pi - e);
                if (e < best_err)
                {
                    best = i;
                    best_err = e;
                }
            }
            return best;
        };
        const std::size_t i = nearest(p.theta, theta, false);
        const std::size_t j = nearest(p.phi, phi, true);
        const FarField& f = p.field[p.index(i, j)];
        const complex dominant = std::abs(f.e_theta) >= std::abs(f.e_phi) ? f.e_theta : f.e_phi;
        const double amp = std::sqrt(p.directivity[p.index(i, j)]);
        return std::abs(dominant) > 0 ? amp * dominant / std::abs(dominant) : complex{amp, 0};
    };
}

} // namespace pinch
