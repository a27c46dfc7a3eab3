// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
#pragma once

#include <numbers>

namespace pinch {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light = 299'792'458.0;     // m/s
inline constexpr double vacuum_permeability = 1.25663706212e-6; // H/m
inline constexpr double vacuum_permittivity =
    1.0 / (vacuum_permeability * speed_of_light * speed_of_light); // F/m

//! Free-space wave impedance sqrt(mu0/eps0), ohm
inline constexpr double free_space_impedance = vacuum_permeability * speed_of_light;

constexpr double deg_to_rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / pi); }

} // namespace pinch
