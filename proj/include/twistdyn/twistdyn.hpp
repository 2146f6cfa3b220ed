#pragma once

#include "twistdyn/filament_dynamo.hpp"
#include "twistdyn/finite_difference.hpp"
#include "twistdyn/frenet_geometry.hpp"
#include "twistdyn/map_algebra.hpp"
#include "twistdyn/quadratic.hpp"
#include "twistdyn/tube_flow.hpp"
#include "twistdyn/version.hpp"
