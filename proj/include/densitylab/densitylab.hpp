#pragma once

#include "densitylab/errors.hpp"
#include "densitylab/grid.hpp"
#include "densitylab/quadrature.hpp"
#include "densitylab/model_geometry.hpp"
#include "densitylab/comparison_ode.hpp"
#include "densitylab/geometry_catalog.hpp"
#include "densitylab/radial_profiles.hpp"
#include "densitylab/monotonicity.hpp"
#include "densitylab/spectral_probe.hpp"
#include "densitylab/decay_flow.hpp"
#include "densitylab/io.hpp"
