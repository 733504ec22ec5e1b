#include "fracmp/grid_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"

namespace fracmp {

Grid build_grid(double a, double b, int n_interior) {
  if (!(b > a)) throw std::invalid_argument("build_grid: need b > a");
  if (n_interior < 1) throw std::invalid_argument("build_grid: need n_interior >= 1");
  return Grid{a, b, n_interior, (b - a) / (n_interior + 1)};
}

GridFunction::GridFunction(Grid g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n_interior)
    throw std::invalid_argument("GridFunction: length " + std::to_string(values.size()) +
                                " does not match n_interior " +
                                std::to_string(grid.n_interior));
}

GridFunction GridFunction::zeros(const Grid& g) { return {g, Eigen::VectorXd::Zero(g.n_interior)}; }

GridFunction GridFunction::constant(const Grid& g, double c) {
  return {g, Eigen::VectorXd::Constant(g.n_interior, c)};
}

double GridFunction::sup_norm() const {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

void require_same_grid(const Grid& lhs, const Grid& rhs, const char* where) {
  if (!(lhs == rhs)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

namespace {

void check_s(double s, const char* where) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument(std::string(where) + ": s must lie in (0, 1)");
}

// Unit-spacing kernel moments; physical weights are these times h^(-2s).
struct UnitKernel {
  double s;
  const detail::UnitRule& rule;

  double kernel(double z) const { return std::pow(z, -1.0 - 2.0 * s); }

  // int_{lo}^{lo+1} (z - lo) z^(-1-2s) dz, lo >= 1
  double rising(double lo) const {
    return detail::integrate(rule, lo, lo + 1.0, [&](double z) { return (z - lo) * kernel(z); });
  }
  // int_{lo}^{lo+1} (lo + 1 - z) z^(-1-2s) dz, lo >= 1
  double falling(double lo) const {
    return detail::integrate(rule, lo, lo + 1.0,
                             [&](double z) { return (lo + 1.0 - z) * kernel(z); });
  }

  double near_field() const { return 1.0 / (2.0 - 2.0 * s); }

  double weight(int k) const {
    if (k == 1) return near_field() + falling(1.0);
    return rising(k - 1.0) + falling(static_cast<double>(k));
  }

  // sum_{k >= K} w_k in closed form (hats sum to one on [1, inf)).
  double tail_sum(int K) const {
    if (K <= 1) return near_field() + 1.0 / (2.0 * s);
    return rising(K - 1.0) + std::pow(static_cast<double>(K), -2.0 * s) / (2.0 * s);
  }
};

}  // namespace

DiscreteFractionalOperator::DiscreteFractionalOperator(Grid grid, double s,
                                                       AssemblyOptions options)
    : grid_(grid), s_(s), options_(options) {
  check_s(s, "assemble_operator");
  const int n = grid_.n_interior;
  const UnitKernel kernel{s, detail::unit_rule(options_.quadrature_order)};

  scale_ = std::pow(grid_.h, -2.0 * s);
  if (options_.include_normalization) scale_ *= compute_normalization_constant(1, s);

  unit_weights_.assign(static_cast<std::size_t>(n) + 2, 0.0);
  for (int k = 1; k <= n + 1; ++k) unit_weights_[static_cast<std::size_t>(k)] = kernel.weight(k);

  tail_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int j = i + 1;  // 1-based node index; exterior nodes are j <= 0 and j >= n + 1
    tail_[static_cast<std::size_t>(i)] = scale_ * (kernel.tail_sum(j) + kernel.tail_sum(n + 1 - j));
  }

  matrix_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = weight(std::abs(i - j));
      matrix_(i, j) = -w;
      row += w;
    }
    matrix_(i, i) = row + tail_[static_cast<std::size_t>(i)];
  }
}

double DiscreteFractionalOperator::weight(int k) const {
  if (k < 1 || k >= static_cast<int>(unit_weights_.size()))
    throw std::out_of_range("DiscreteFractionalOperator::weight: offset out of range");
  return scale_ * unit_weights_[static_cast<std::size_t>(k)];
}

GridFunction DiscreteFractionalOperator::apply(const GridFunction& u) const {
  require_same_grid(grid_, u.grid, "apply_operator");
  return {grid_, matrix_ * u.values};
}

double DiscreteFractionalOperator::form(const GridFunction& u, const GridFunction& v) const {
  require_same_grid(grid_, u.grid, "DiscreteFractionalOperator::form");
  require_same_grid(grid_, v.grid, "DiscreteFractionalOperator::form");
  return grid_.h * v.values.dot(matrix_ * u.values);
}

double DiscreteFractionalOperator::energy_norm(const GridFunction& u) const {
  return std::sqrt(std::max(0.0, form(u, u)));
}

std::shared_ptr<const DiscreteFractionalOperator> assemble_operator(const Grid& grid, double s,
                                                                    AssemblyOptions options) {
  return std::make_shared<const DiscreteFractionalOperator>(grid, s, options);
}

GridFunction apply_operator(const DiscreteFractionalOperator& op, const GridFunction& u) {
  return op.apply(u);
}

namespace {

// Moments m_ab(k) = int_0^1 int_0^1 xi^a eta^b (k + eta - xi)^(-1-2s) for
// well-separated cells (k >= 2), ordered as {00, 10, 01, 20, 11, 02}.
using Moments = std::array<double, 6>;

Moments separated_moments(int k, double s, const detail::UnitRule& rule) {
  Moments m{};
  for (std::size_t p = 0; p < rule.nodes.size(); ++p) {
    const double xi = rule.nodes[p];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double eta = rule.nodes[q];
      const double w = rule.weights[p] * rule.weights[q] * std::pow(k + eta - xi, -1.0 - 2.0 * s);
      m[0] += w;
      m[1] += w * xi;
      m[2] += w * eta;
      m[3] += w * xi * xi;
      m[4] += w * xi * eta;
      m[5] += w * eta * eta;
    }
  }
  return m;
}

}  // namespace

double gagliardo_form(const GridFunction& u, const GridFunction& v, double s) {
  require_same_grid(u.grid, v.grid, "gagliardo_form");
  check_s(s, "gagliardo_form");
  const Grid& g = u.grid;
  const int n = g.n_interior;
  const int cells = n + 1;
  const auto& rule = detail::unit_rule(10);

  // Nodal values including the two boundary zeros.
  std::vector<double> U(static_cast<std::size_t>(n) + 2, 0.0), V(U.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    U[static_cast<std::size_t>(i) + 1] = u.values[i];
    V[static_cast<std::size_t>(i) + 1] = v.values[i];
  }
  auto du = [&](int c) { return U[c + 1] - U[c]; };
  auto dv = [&](int c) { return V[c + 1] - V[c]; };

  double total = 0.0;

  // Same cell: u(x) - u(y) = (du/h)(x - y).
  const double same = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
  for (int c = 0; c < cells; ++c) total += 0.5 * du(c) * dv(c) * same;

  // Adjacent cells sharing a vertex: Duffy split of the unit square.
  auto q_moment = [&](int m) {
    return detail::integrate(rule, 0.0, 1.0, [&](double t) {
      return std::pow(t, m) * std::pow(1.0 + t, -1.0 - 2.0 * s);
    });
  };
  const double q0 = q_moment(0), q1 = q_moment(1), q2 = q_moment(2);
  const double p20 = (q0 + q2) / (3.0 - 2.0 * s);
  const double p11 = 2.0 * q1 / (3.0 - 2.0 * s);
  for (int c = 0; c + 1 < cells; ++c) {
    const double a1 = du(c), a2 = du(c + 1), b1 = dv(c), b2 = dv(c + 1);
    total += a1 * b1 * p20 + (a1 * b2 + a2 * b1) * p11 + a2 * b2 * p20;
  }

  // Separated cells: moments depend only on the offset.
  for (int k = 2; k < cells; ++k) {
    const Moments m = separated_moments(k, s, rule);
    for (int c = 0; c + k < cells; ++c) {
      const int d = c + k;
      const double au = U[c] - U[d], bu = du(c), cu = -du(d);
      const double av = V[c] - V[d], bv = dv(c), cv = -dv(d);
      total += au * av * m[0] + (au * bv + av * bu) * m[1] + (au * cv + av * cu) * m[2] +
               bu * bv * m[3] + (bu * cv + bv * cu) * m[4] + cu * cv * m[5];
    }
  }

  // Exterior interaction, int u v kappa over the interval.
  double ext = 0.0;
  for (int c = 0; c < cells; ++c) {
    auto uv = [&](double xi) { return (U[c] + du(c) * xi) * (V[c] + dv(c) * xi); };
    if (c == 0)
      ext += U[1] * V[1] / (3.0 - 2.0 * s);
    else
      ext += detail::integrate(rule, 0.0, 1.0,
                               [&](double xi) { return uv(xi) * std::pow(c + xi, -2.0 * s); });
    if (c == n)
      ext += U[n] * V[n] / (3.0 - 2.0 * s);
    else
      ext += detail::integrate(rule, 0.0, 1.0, [&](double xi) {
        return uv(xi) * std::pow(n + 1.0 - c - xi, -2.0 * s);
      });
  }
  total += ext / (2.0 * s);

  return std::pow(g.h, 1.0 - 2.0 * s) * total;
}

double xnorm(const GridFunction& u, double s) {
  return std::sqrt(std::max(0.0, gagliardo_form(u, u, s)));
}

double lp_norm(const GridFunction& u, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lp_norm: need q >= 1");
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u.values[i]), q);
  return std::pow(u.grid.h * acc, 1.0 / q);
}

}  // namespace fracmp
