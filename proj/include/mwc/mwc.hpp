#pragma once

#include "mwc/error.hpp"
#include "mwc/matalg.hpp"
#include "mwc/graph.hpp"
#include "mwc/switching.hpp"
#include "mwc/analysis.hpp"
#include "mwc/sim.hpp"
