#pragma once

#include "meshflood/event_queue.hpp"
#include "meshflood/fixtures.hpp"
#include "meshflood/flood_protocol.hpp"
#include "meshflood/metrics.hpp"
#include "meshflood/relay_select.hpp"
#include "meshflood/scenario.hpp"
#include "meshflood/sim_config.hpp"
#include "meshflood/sim_engine.hpp"
#include "meshflood/topology.hpp"
#include "meshflood/types.hpp"
