#pragma once

// Umbrella header: pulse optimization and speed-limit analysis for two-qudit
// CZ gates on statically coupled transmon-style devices.

#include "qspeed/basis.hpp"
#include "qspeed/config.hpp"
#include "qspeed/device.hpp"
#include "qspeed/fidelity.hpp"
#include "qspeed/linalg.hpp"
#include "qspeed/optimize.hpp"
#include "qspeed/report.hpp"
#include "qspeed/speed_limits.hpp"
#include "qspeed/sweep.hpp"
