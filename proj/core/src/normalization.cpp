#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fracmp/grid_operator.hpp"

namespace fracmp {

namespace {

constexpr double kAbsTol = 1e-10;

void check_args(int N, double s) {
  if (N < 1) throw std::invalid_argument("normalization constant: need N >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("normalization constant: s must lie in (0, 1)");
}

// int_1^inf cos(z) z^(-a) dz for a > 1 + 2 (integrand decays fast enough
// that summing whole periods up to a few thousand is converged).
double cosine_tail_direct(double a) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto f = [a](double z) { return std::cos(z) * std::pow(z, -a); };
  double acc = gauss_kronrod<double, 31>::integrate(f, 1.0, two_pi, 8, kAbsTol * 1e-3);
  for (int k = 1; k < 512; ++k)
    acc += gauss_kronrod<double, 31>::integrate(f, k * two_pi, (k + 1) * two_pi, 4, kAbsTol * 1e-3);
  return acc;
}

// C(a) = int_1^inf cos(z) z^(-a) dz via two integrations by parts:
// C(a) = -sin 1 + a cos 1 - a (a + 1) C(a + 2).
double cosine_tail(double a, int depth) {
  if (depth == 0) return cosine_tail_direct(a);
  return -std::sin(1.0) + a * std::cos(1.0) - a * (a + 1.0) * cosine_tail(a + 2.0, depth - 1);
}

// Reduction of the N-dimensional integral to the 1D one by integrating out
// the transverse coordinates.
double transverse_factor(int N, double s) {
  if (N == 1) return 1.0;
  using boost::math::tgamma;
  return std::pow(std::numbers::pi, 0.5 * (N - 1)) * tgamma(0.5 + s) / tgamma(0.5 * N + s);
}

}  // namespace

double compute_normalization_constant(int N, double s) {
  check_args(N, s);
  // int_R (1 - cos z) |z|^(-1-2s) dz = 2 [ int_0^1 + int_1^inf ]
  boost::math::quadrature::tanh_sinh<double> ts;
  // 1 - cos z = (z^2 / 2) sinc(z / 2)^2. The leading z^(1-2s) / 2 is
  // integrated exactly; quadrature only sees the smooth remainder, which
  // keeps s -> 1 accurate.
  auto near = [s](double z) {
    if (z <= 0.0) return 0.0;
    const double half = 0.5 * z;
    const double sinc = std::sin(half) / half;
    return 0.5 * (sinc * sinc - 1.0) * std::pow(z, 1.0 - 2.0 * s);
  };
  const double inner = 1.0 / (4.0 - 4.0 * s) + ts.integrate(near, 0.0, 1.0, kAbsTol * 1e-3);
  const double a = 1.0 + 2.0 * s;
  const double outer = 1.0 / (2.0 * s) - cosine_tail(a, 2);
  return 1.0 / (2.0 * (inner + outer) * transverse_factor(N, s));
}

double normalization_constant_ooura(int N, double s) {
  check_args(N, s);
  // int_0^inf (1 - cos z) z^(-1-2s) dz = (1 / 2s) int_0^inf sin(z) z^(-2s) dz
  // split z^(-2s) with the weight (1 - e^-z)^2: the first part vanishes at the
  // origin for the oscillatory rule, the rest, z^(-2s) (2 e^-z - e^-2z),
  // decays exponentially.
  boost::math::quadrature::ooura_fourier_sin<double> ooura(1e-13);
  auto [oscillatory, err] = ooura.integrate(
      [s](double z) {
        // the rule samples very close to 0, where sin(z) f(z) ~ z^(2-2s) is negligible
        const double w = std::expm1(-z);
        return z < 1e-30 ? 0.0 : w * w * std::pow(z, -2.0 * s);
      },
      1.0);
  (void)err;
  // near the origin the damped integrand is z^(1-2s) (1 + O(z)); the leading
  // power is integrated exactly on (0, 1)
  auto damped = [s](double z) {
    return std::sin(z) / z * (2.0 * std::exp(-z) - std::exp(-2.0 * z));
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double head =
      1.0 / (2.0 - 2.0 * s) +
      ts.integrate([&](double z) { return z > 0.0 ? (damped(z) - 1.0) * std::pow(z, 1.0 - 2.0 * s) : 0.0; },
                   0.0, 1.0, kAbsTol * 1e-3);
  boost::math::quadrature::exp_sinh<double> es;
  const double rest =
      es.integrate([&](double z) { return damped(z) * std::pow(z, 1.0 - 2.0 * s); }, 1.0,
                   std::numeric_limits<double>::infinity(), kAbsTol * 1e-3);
  const double one_sided = (oscillatory + head + rest) / (2.0 * s);
  return 1.0 / (2.0 * one_sided * transverse_factor(N, s));
}

}  // namespace fracmp
