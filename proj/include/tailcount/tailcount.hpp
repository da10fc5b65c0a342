#pragma once

#include "tailcount/bootstrap.hpp"
#include "tailcount/counting.hpp"
#include "tailcount/diagnostics.hpp"
#include "tailcount/error.hpp"
#include "tailcount/lowess.hpp"
#include "tailcount/panel.hpp"
#include "tailcount/pipeline.hpp"
#include "tailcount/regression.hpp"
#include "tailcount/report.hpp"
#include "tailcount/rng.hpp"
#include "tailcount/scoring.hpp"
#include "tailcount/simulator.hpp"
