#pragma once

// Weighted-CUSUM changepoint tests for the deterministic coefficient of a
// random coefficient autoregression. Umbrella header.

#include "rca_cusum/core.hpp"
#include "rca_cusum/estimators.hpp"
#include "rca_cusum/cusum.hpp"
#include "rca_cusum/hetero.hpp"
#include "rca_cusum/critical_values.hpp"
#include "rca_cusum/detector.hpp"
#include "rca_cusum/mc.hpp"
#include "rca_cusum/io.hpp"
