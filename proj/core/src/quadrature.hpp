#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace fracmp::detail {

/// Gauss-Legendre rule mapped to [0, 1].
struct UnitRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

template <unsigned Points>
UnitRule make_unit_rule() {
  using Rule = boost::math::quadrature::gauss<double, Points>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  UnitRule r;
  // boost stores the nonnegative half of the symmetric rule
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == 0 && Points % 2 == 1) {
      r.nodes.push_back(0.5);
      r.weights.push_back(0.5 * w[k]);
      continue;
    }
    r.nodes.push_back(0.5 * (1.0 - x[k]));
    r.weights.push_back(0.5 * w[k]);
    r.nodes.push_back(0.5 * (1.0 + x[k]));
    r.weights.push_back(0.5 * w[k]);
  }
  return r;
}

inline const UnitRule& unit_rule(int order) {
  static const UnitRule r5 = make_unit_rule<5>();
  static const UnitRule r7 = make_unit_rule<7>();
  static const UnitRule r10 = make_unit_rule<10>();
  static const UnitRule r15 = make_unit_rule<15>();
  static const UnitRule r20 = make_unit_rule<20>();
  switch (order) {
    case 5: return r5;
    case 7: return r7;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    default:
      throw std::invalid_argument("unsupported quadrature order " + std::to_string(order) +
                                  " (use 5, 7, 10, 15 or 20)");
  }
}

template <typename Fn>
double integrate(const UnitRule& rule, double lo, double hi, Fn&& fn) {
  double acc = 0.0;
  const double len = hi - lo;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    acc += rule.weights[k] * fn(lo + len * rule.nodes[k]);
  return acc * len;
}

}  // namespace fracmp::detail
