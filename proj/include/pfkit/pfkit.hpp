#pragma once

// Umbrella header.

#include "pfkit/audit.hpp"
#include "pfkit/finite_dynamics.hpp"
#include "pfkit/finite_space.hpp"
#include "pfkit/interval_systems.hpp"
#include "pfkit/io.hpp"
#include "pfkit/mixing_diagnostics.hpp"
#include "pfkit/transfer_operators.hpp"
