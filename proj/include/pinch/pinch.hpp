// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Umbrella header.
#pragma once

#include "pinch/channel.hpp"
#include "pinch/constants.hpp"
#include "pinch/cut.hpp"
#include "pinch/error.hpp"
#include "pinch/geometry.hpp"
#include "pinch/metrics.hpp"
#include "pinch/radiator.hpp"
#include "pinch/scene.hpp"
#include "pinch/vector.hpp"
#include "pinch/waveguide.hpp"
