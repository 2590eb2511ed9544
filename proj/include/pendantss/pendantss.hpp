#pragma once

#include "pendantss/bench.hpp"
#include "pendantss/data_fidelity.hpp"
#include "pendantss/errors.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/metrics.hpp"
#include "pendantss/mm_metric.hpp"
#include "pendantss/objective.hpp"
#include "pendantss/power_iteration.hpp"
#include "pendantss/projections.hpp"
#include "pendantss/random.hpp"
#include "pendantss/signal.hpp"
#include "pendantss/smoothed_norms.hpp"
#include "pendantss/solver.hpp"
#include "pendantss/synth.hpp"
