#pragma once

#include "fomo/analytic.hpp"
#include "fomo/collector.hpp"
#include "fomo/corpus.hpp"
#include "fomo/errors.hpp"
#include "fomo/random.hpp"
#include "fomo/report.hpp"
#include "fomo/simulation.hpp"
