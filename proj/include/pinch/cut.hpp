// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "pinch/error.hpp"

namespace pinch {

enum class CutLabel
{
    simulated,
    measured
};

inline std::string_view to_string(CutLabel label)
{
    return label == CutLabel::simulated ? "simulated" : "measured";
}

//! A 1D azimuth pattern on a uniform circular grid starting at 0 deg.
struct Cut1D
{
    std::vector<double> phi_deg;
    std::vector<double> value_db;
    CutLabel label = CutLabel::simulated;

    std::size_t size() const { return phi_deg.size(); }
    double step_deg() const { return 360.0 / static_cast<double>(phi_deg.size()); }
};

//! The canonical grid phi_k = k * 360 / n.
inline std::vector<double> uniform_phi_grid_deg(std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k)
        g[k] = 360.0 * static_cast<double>(k) / static_cast<double>(n);
    return g;
}

//! Throws unless `cut` is non-empty, finite, and on the canonical grid.
inline void validate_cut(const Cut1D& cut)
{
    detail::require(!cut.phi_deg.empty(), "cut is empty");
    detail::require(cut.phi_deg.size() == cut.value_db.size(), "cut angle/value length mismatch");
    const double step = cut.step_deg();
    for (std::size_t k = 0; k < cut.size(); ++k)
    {
        detail::require(std::abs(cut.phi_deg[k] - step * static_cast<double>(k)) <= 1e-9 * 360.0,
                        "cut grid is not uniform over [0, 360)");
        detail::require(std::isfinite(cut.value_db[k]), "cut value is not finite");
    }
}

} // namespace pinch
