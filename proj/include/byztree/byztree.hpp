#pragma once

#include "byztree/rational.hpp"
#include "byztree/topology.hpp"
#include "byztree/attack.hpp"
#include "byztree/divergence.hpp"
#include "byztree/knapsack.hpp"
#include "byztree/designer.hpp"
#include "byztree/sim.hpp"
#include "byztree/table.hpp"
#include "byztree/figures.hpp"
#include "byztree/scenario.hpp"
