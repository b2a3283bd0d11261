// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gvgeom/augment.hpp"
#include "gvgeom/calibrate.hpp"
#include "gvgeom/camera.hpp"
#include "gvgeom/canonical.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/fusion.hpp"
#include "gvgeom/gradcheck.hpp"
#include "gvgeom/io.hpp"
#include "gvgeom/losses.hpp"
#include "gvgeom/map.hpp"
#include "gvgeom/metrics.hpp"
#include "gvgeom/synth.hpp"
