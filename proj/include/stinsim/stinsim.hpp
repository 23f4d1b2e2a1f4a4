#pragma once

#include "stinsim/channel.hpp"
#include "stinsim/config_io.hpp"
#include "stinsim/connectivity.hpp"
#include "stinsim/engine.hpp"
#include "stinsim/error.hpp"
#include "stinsim/estimation.hpp"
#include "stinsim/experiment_config.hpp"
#include "stinsim/geometry.hpp"
#include "stinsim/random.hpp"
#include "stinsim/results_io.hpp"
#include "stinsim/sync.hpp"
#include "stinsim/units.hpp"
#include "stinsim/version.hpp"
