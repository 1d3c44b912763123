#pragma once

#include "riskattr/axioms.hpp"
#include "riskattr/bsm_scenarios.hpp"
#include "riskattr/cli.hpp"
#include "riskattr/csv.hpp"
#include "riskattr/errors.hpp"
#include "riskattr/euler.hpp"
#include "riskattr/game.hpp"
#include "riskattr/matrix.hpp"
#include "riskattr/model_io.hpp"
#include "riskattr/models.hpp"
#include "riskattr/portfolio_opt.hpp"
#include "riskattr/report_io.hpp"
#include "riskattr/residuals.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/scenario_matrix.hpp"
#include "riskattr/shapley.hpp"
#include "riskattr/simplex.hpp"
