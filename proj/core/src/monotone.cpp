#include "fracmp/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fracmp {

ShiftedSolver::ShiftedSolver(const DiscreteFractionalOperator& op, double M)
    : grid_(op.grid()), M_(M) {
  if (!(M >= 0.0)) throw std::invalid_argument("ShiftedSolver: shift M must be >= 0");
  Eigen::MatrixXd shifted = op.matrix();
  shifted.diagonal().array() += M;
  llt_.compute(shifted);
  if (llt_.info() != Eigen::Success) throw std::runtime_error("ShiftedSolver: A + M I is not SPD");
}

GridFunction ShiftedSolver::solve(const GridFunction& rhs) const {
  require_same_grid(grid_, rhs.grid, "solve_shifted");
  return {grid_, llt_.solve(rhs.values)};
}

Eigen::MatrixXd ShiftedSolver::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(grid_.n_interior, grid_.n_interior));
}

GridFunction solve_shifted(const DiscreteFractionalOperator& op, double M, const GridFunction& rhs) {
  return ShiftedSolver(op, M).solve(rhs);
}

namespace {

Eigen::VectorXd reaction_values(const Reaction& f, double lambda, const GridFunction& u) {
  Eigen::VectorXd out(u.size());
  for (int i = 0; i < u.size(); ++i) out[i] = lambda * f(u[i]);
  return out;
}

double sup_residual(const DiscreteFractionalOperator& op, const Reaction& f, double lambda,
                    const GridFunction& u) {
  return (op.matrix() * u.values - reaction_values(f, lambda, u)).cwiseAbs().maxCoeff();
}

}  // namespace

bool is_subsolution(const DiscreteFractionalOperator& op, const Reaction& f, double lambda,
                    const GridFunction& u, double tol) {
  require_same_grid(op.grid(), u.grid, "is_subsolution");
  const Eigen::VectorXd gap = op.matrix() * u.values - reaction_values(f, lambda, u);
  return (gap.array() <= tol).all();
}

bool is_supersolution(const DiscreteFractionalOperator& op, const Reaction& f, double lambda,
                      const GridFunction& u, double tol) {
  require_same_grid(op.grid(), u.grid, "is_supersolution");
  const Eigen::VectorXd gap = op.matrix() * u.values - reaction_values(f, lambda, u);
  return (gap.array() >= -tol).all();
}

MonotoneConfig default_monotone_config(const NonlinearitySpec& f, double lambda,
                                       Direction direction, double lo, double hi) {
  MonotoneConfig cfg;
  cfg.M = lambda * estimate_shift(f, lo, hi, 4096).M0;
  cfg.direction = direction;
  return cfg;
}

MonotoneResult monotone_iterate(const DiscreteFractionalOperator& op, const Reaction& f,
                                double lambda, const OrderedPair& pair, const MonotoneConfig& cfg) {
  require_same_grid(op.grid(), pair.sub.grid, "monotone_iterate");
  require_same_grid(op.grid(), pair.super.grid, "monotone_iterate");
  if (!(cfg.M >= 0.0)) throw std::invalid_argument("monotone_iterate: shift M must be >= 0");
  if (((pair.sub.values - pair.super.values).array() > cfg.pair_tol).any())
    throw std::invalid_argument("monotone_iterate: sub-solution exceeds super-solution");
  if (!is_subsolution(op, f, lambda, pair.sub, cfg.pair_tol))
    throw std::invalid_argument("monotone_iterate: lower function is not a sub-solution");
  if (!is_supersolution(op, f, lambda, pair.super, cfg.pair_tol))
    throw std::invalid_argument("monotone_iterate: upper function is not a super-solution");

  const ShiftedSolver solver(op, cfg.M);
  const bool descending = cfg.direction == Direction::from_super;
  MonotoneResult out;
  out.u = descending ? pair.super : pair.sub;

  for (out.iters = 1; out.iters <= cfg.max_iters; ++out.iters) {
    GridFunction rhs{op.grid(), reaction_values(f, lambda, out.u) + cfg.M * out.u.values};
    GridFunction next = solver.solve(rhs);

    for (int i = 0; i < next.size(); ++i) {
      const double slack = cfg.order_tol * std::max(1.0, std::abs(out.u[i]));
      const double step = next[i] - out.u[i];
      if (descending ? step > slack : step < -slack) ++out.monotonicity_violations;
      if (next[i] < pair.sub[i] - slack || next[i] > pair.super[i] + slack) ++out.sandwich_violations;
    }
    if (out.monotonicity_violations > 0 || out.sandwich_violations > 0) {
      std::ostringstream msg;
      msg << "iteration " << out.iters << ": " << out.monotonicity_violations
          << " order violations, " << out.sandwich_violations
          << " sandwich violations (shift M too small?)";
      out.diagnostic = msg.str();
      out.u = std::move(next);
      out.residual = sup_residual(op, f, lambda, out.u);
      return out;
    }

    const double diff = (next.values - out.u.values).cwiseAbs().maxCoeff();
    out.u = std::move(next);
    out.residual = sup_residual(op, f, lambda, out.u);
    if (out.residual <= cfg.residual_tol || diff <= cfg.tol_sup) {
      out.converged = true;
      return out;
    }
  }
  out.iters = cfg.max_iters;
  out.diagnostic = "max_iters exceeded";
  return out;
}

ComparisonReport comparison_check(const DiscreteFractionalOperator& op, double M, int trials,
                                  std::uint64_t seed) {
  if (!(M >= 0.0)) throw std::invalid_argument("comparison_check: shift M must be >= 0");
  const ShiftedSolver solver(op, M);
  ComparisonReport report;
  report.trials = trials;

  if (op.size() <= 512) {
    const Eigen::MatrixXd inv = solver.inverse();
    report.inverse_checked = true;
    report.min_inverse_entry = inv.minCoeff();
    report.negative_inverse_entries = (inv.array() < 0.0).count();
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Grid& g = op.grid();
  for (int t = 0; t < trials; ++t) {
    GridFunction h1 = GridFunction::zeros(g), h2 = GridFunction::zeros(g);
    for (int i = 0; i < g.n_interior; ++i) {
      h1[i] = normal(rng);
      h2[i] = h1[i] + std::abs(normal(rng));
    }
    const GridFunction u1 = solver.solve(h1), u2 = solver.solve(h2);
    const double scale = std::max(u1.sup_norm(), u2.sup_norm());
    for (int i = 0; i < g.n_interior; ++i) {
      if (u1[i] > u2[i] + 1e-13 * scale) {
        ++report.violations;
        if (report.first_violation.empty()) {
          std::ostringstream msg;
          msg << "trial " << t << " node " << i << ": T h1 = " << u1[i] << " > T h2 = " << u2[i];
          report.first_violation = msg.str();
        }
        break;
      }
    }
  }
  return report;
}

}  // namespace fracmp
