#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Cholesky>

#include "fracmp/grid_operator.hpp"
#include "fracmp/nonlinearity.hpp"

namespace fracmp {

/// Nodewise reaction t -> f(t). NonlinearitySpec and TruncatedNonlinearity
/// both convert to it.
using Reaction = std::function<double(double)>;

/// T = (A + M I)^{-1}, factorized once and reused.
class ShiftedSolver {
 public:
  ShiftedSolver(const DiscreteFractionalOperator& op, double M);

  double shift() const { return M_; }
  const Grid& grid() const { return grid_; }
  GridFunction solve(const GridFunction& rhs) const;
  Eigen::MatrixXd inverse() const;

 private:
  Grid grid_;
  double M_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

GridFunction solve_shifted(const DiscreteFractionalOperator& op, double M, const GridFunction& rhs);

/// (A u)_i <= lambda f(u_i) + tol for all i.
bool is_subsolution(const DiscreteFractionalOperator& op, const Reaction& f, double lambda,
                    const GridFunction& u, double tol);
/// (A u)_i >= lambda f(u_i) - tol for all i.
bool is_supersolution(const DiscreteFractionalOperator& op, const Reaction& f, double lambda,
                      const GridFunction& u, double tol);

enum class Direction { from_super, from_sub };

struct MonotoneConfig {
  double M = 0.0;
  /// Stagnation stop on the successive sup-norm difference.
  double tol_sup = 1e-14;
  /// Primary stop on || A u - lambda f(u) ||_inf.
  double residual_tol = 1e-8;
  int max_iters = 100000;
  Direction direction = Direction::from_super;
  /// Roundoff allowance when counting order and sandwich violations.
  double order_tol = 1e-12;
  /// Tolerance for the sub/super-solution preconditions.
  double pair_tol = 1e-8;
};

/// M = lambda * M0 with M0 from estimate_shift on [lo, hi].
MonotoneConfig default_monotone_config(const NonlinearitySpec& f, double lambda,
                                       Direction direction = Direction::from_super,
                                       double lo = 0.0, double hi = 1.1);

struct OrderedPair {
  GridFunction sub;
  GridFunction super;
};

struct MonotoneResult {
  GridFunction u;
  int iters = 0;
  double residual = 0.0;
  int monotonicity_violations = 0;
  int sandwich_violations = 0;
  bool converged = false;
  std::string diagnostic;
};

/// u_{n+1} = (A + M)^{-1} (lambda f(u_n) + M u_n) from the super-solution
/// (nonincreasing iterates, maximal solution) or the sub-solution
/// (nondecreasing iterates, minimal solution) of the pair. Aborts on the
/// first order or sandwich violation. Throws std::invalid_argument when the
/// pair does not satisfy its preconditions.
MonotoneResult monotone_iterate(const DiscreteFractionalOperator& op, const Reaction& f,
                                double lambda, const OrderedPair& pair, const MonotoneConfig& cfg);

struct ComparisonReport {
  int trials = 0;
  int violations = 0;
  bool inverse_checked = false;
  double min_inverse_entry = 0.0;
  long negative_inverse_entries = 0;
  std::string first_violation;

  bool passed() const { return violations == 0 && negative_inverse_entries == 0; }
};

/// Random ordered pairs h1 <= h2 must give T h1 <= T h2; for n <= 512 also
/// checks (A + M I)^{-1} >= 0 entrywise.
ComparisonReport comparison_check(const DiscreteFractionalOperator& op, double M, int trials,
                                  std::uint64_t seed = 11);

}  // namespace fracmp
