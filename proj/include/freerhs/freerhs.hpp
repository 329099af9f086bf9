#pragma once

#include "freerhs/core_model.hpp"
#include "freerhs/error.hpp"
#include "freerhs/green.hpp"
#include "freerhs/quadrature.hpp"
#include "freerhs/report.hpp"
#include "freerhs/rhs_space.hpp"
#include "freerhs/spectral_measure.hpp"
#include "freerhs/suites.hpp"
#include "freerhs/test_function.hpp"
#include "freerhs/transform.hpp"
