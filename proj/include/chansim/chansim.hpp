#pragma once

// Umbrella header for the channel-simulation toolkit: Renyi information
// measures and capacities, rejection-sampling simulation codes, their
// reliability / strong-converse exponents, and the experiment harness.

#include "chansim/capacity.hpp"
#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/exponents.hpp"
#include "chansim/extended_real.hpp"
#include "chansim/harness.hpp"
#include "chansim/logspace.hpp"
#include "chansim/measures.hpp"
#include "chansim/method_of_types.hpp"
#include "chansim/protocol.hpp"
#include "chansim/rng.hpp"
#include "chansim/sampling.hpp"
