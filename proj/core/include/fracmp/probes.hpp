#pragma once

#include <random>

#include "fracmp/grid_operator.hpp"

namespace fracmp {

/// Random test functions for empirical constants: alternating between
/// smooth low-frequency sine series and rough nodal noise.
class ProbeGenerator {
 public:
  ProbeGenerator(Grid grid, std::uint64_t seed) : grid_(grid), rng_(seed) {}

  GridFunction smooth(int modes = 8);
  GridFunction rough();
  /// k-th probe of the alternating sequence (smooth on 3 of every 4).
  GridFunction next();

  std::mt19937_64& engine() { return rng_; }

 private:
  Grid grid_;
  std::mt19937_64 rng_;
  long counter_ = 0;
};

}  // namespace fracmp
