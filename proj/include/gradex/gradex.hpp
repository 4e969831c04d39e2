#pragma once

// Umbrella header for the gradex exploration library.

#include "gradex/autodiff.hpp"
#include "gradex/boundariness.hpp"
#include "gradex/collision.hpp"
#include "gradex/config.hpp"
#include "gradex/explorer.hpp"
#include "gradex/filter.hpp"
#include "gradex/geometry.hpp"
#include "gradex/grid.hpp"
#include "gradex/io.hpp"
#include "gradex/objective.hpp"
#include "gradex/occupancy.hpp"
#include "gradex/optimizer.hpp"
#include "gradex/planner.hpp"
#include "gradex/raycast.hpp"
#include "gradex/rng.hpp"
#include "gradex/sensor.hpp"
#include "gradex/world.hpp"
