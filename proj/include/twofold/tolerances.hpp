#pragma once

#include "twofold/ode.hpp"

#include <cstddef>

namespace twofold {

struct Tolerances {
  double tangency = 1e-9;  // |X h| below this counts as a tangency
  double event = 1e-12;    // |y| at a located switching event
  double reversibility = 1e-12;
  double slope = 1e-8;
  double horizon = 200.0;  // time limit for hit searches
  std::size_t max_events = 10000;
  ode::Options ode{};
};

}  // namespace twofold
