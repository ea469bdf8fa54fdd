#pragma once

#include "hfpquad/em_constants.hpp"
#include "hfpquad/error.hpp"
#include "hfpquad/harness.hpp"
#include "hfpquad/ie_solver.hpp"
#include "hfpquad/integrand.hpp"
#include "hfpquad/oracles.hpp"
#include "hfpquad/quadrature.hpp"
#include "hfpquad/report_io.hpp"
#include "hfpquad/series.hpp"
