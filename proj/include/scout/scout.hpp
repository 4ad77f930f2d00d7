#pragma once

// Umbrella header: the full simulator and library surface.

#include "scout/config.hpp"      // IWYU pragma: export
#include "scout/experiment.hpp"  // IWYU pragma: export
#include "scout/geometry.hpp"    // IWYU pragma: export
#include "scout/inquiry.hpp"     // IWYU pragma: export
#include "scout/logio.hpp"       // IWYU pragma: export
#include "scout/model.hpp"       // IWYU pragma: export
#include "scout/nested.hpp"      // IWYU pragma: export
#include "scout/pgm.hpp"         // IWYU pragma: export
#include "scout/rng.hpp"         // IWYU pragma: export
#include "scout/runner.hpp"      // IWYU pragma: export
#include "scout/sensor.hpp"      // IWYU pragma: export
#include "scout/transport.hpp"   // IWYU pragma: export
#include "scout/wire.hpp"        // IWYU pragma: export
