#pragma once

// Umbrella header: numerical verification toolkit for quaternionic Kahler
// geometry with a hypercomplex trivialization. The layers, bottom up:
//
//   jet.hpp        nested forward-mode derivatives (exact to rounding)
//   linalg.hpp     small dense matrices over any scalar level
//   quat.hpp       the standard hypercomplex action and the operator L
//   tensor4.hpp    pointwise rank-4 calculus and the model curvature tensor
//   chart.hpp      closed-form metric charts with per-level evaluators
//   geometry.hpp   connection, curvature, Kahler and Lee forms, frames
//   checks.hpp     pointwise identity checkers with residuals
//   transforms.hpp the hyper-Kahler correspondence in both directions
//   zoo.hpp        the bundled metric constructions
//   suites.hpp     seeded verification runs and machine-readable reports

#include "qkgeo/checks.hpp"
#include "qkgeo/chart.hpp"
#include "qkgeo/geometry.hpp"
#include "qkgeo/jet.hpp"
#include "qkgeo/linalg.hpp"
#include "qkgeo/quat.hpp"
#include "qkgeo/rng.hpp"
#include "qkgeo/suites.hpp"
#include "qkgeo/tensor4.hpp"
#include "qkgeo/transforms.hpp"
#include "qkgeo/zoo.hpp"
