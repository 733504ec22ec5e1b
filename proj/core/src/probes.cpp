#include "fracmp/probes.hpp"

#include <cmath>
#include <numbers>

namespace fracmp {

GridFunction ProbeGenerator::smooth(int modes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coeff(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) coeff[static_cast<std::size_t>(k)] = normal(rng_) / (k + 1);
  const double len = grid_.length();
  return GridFunction::sample(grid_, [&](double x) {
    double acc = 0.0;
    for (int k = 0; k < modes; ++k)
      acc += coeff[static_cast<std::size_t>(k)] * std::sin((k + 1) * std::numbers::pi * (x - grid_.a) / len);
    return acc;
  });
}

GridFunction ProbeGenerator::rough() {
  std::normal_distribution<double> normal(0.0, 1.0);
  GridFunction u = GridFunction::zeros(grid_);
  for (int i = 0; i < u.size(); ++i) u[i] = normal(rng_);
  return u;
}

GridFunction ProbeGenerator::next() {
  return (counter_++ % 4 == 3) ? rough() : smooth();
}

}  // namespace fracmp
