#pragma once

#include "dynprice/timeline.hpp"
#include "dynprice/scenario.hpp"
#include "dynprice/csv.hpp"
#include "dynprice/forecast.hpp"
#include "dynprice/demand.hpp"
#include "dynprice/settlement.hpp"
#include "dynprice/policy.hpp"
#include "dynprice/evaluate.hpp"
#include "dynprice/orchestrator.hpp"
#include "dynprice/config.hpp"
