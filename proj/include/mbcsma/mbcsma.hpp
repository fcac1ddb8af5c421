#pragma once

// Umbrella header: the whole simulator in one include.

#include "mbcsma/config.hpp"
#include "mbcsma/engine.hpp"
#include "mbcsma/event.hpp"
#include "mbcsma/mac.hpp"
#include "mbcsma/medium.hpp"
#include "mbcsma/metrics.hpp"
#include "mbcsma/phy.hpp"
#include "mbcsma/rng.hpp"
#include "mbcsma/scenario.hpp"
#include "mbcsma/simulation.hpp"
#include "mbcsma/sweep.hpp"
#include "mbcsma/time.hpp"
#include "mbcsma/topology.hpp"
