#pragma once

#include "ctxspace/context_tables.hpp"
#include "ctxspace/correlation_analysis.hpp"
#include "ctxspace/errors.hpp"
#include "ctxspace/kolmogorov_space.hpp"
#include "ctxspace/reports.hpp"
#include "ctxspace/serialization.hpp"
#include "ctxspace/trial_simulator.hpp"
