#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

namespace fracmp {

/// Uniform 1D grid on (a, b). Interior nodes x_i = a + (i + 1) h for
/// i = 0 .. n_interior - 1; the endpoints a and b carry the exterior
/// (zero) value.
struct Grid {
  double a = -1.0;
  double b = 1.0;
  int n_interior = 1;
  double h = 1.0;

  double node(int i) const { return a + (i + 1) * h; }
  double length() const { return b - a; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid build_grid(double a, double b, int n_interior);

/// Nodal values at interior nodes; the function is zero on the complement
/// of (a, b).
struct GridFunction {
  Grid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(Grid g, Eigen::VectorXd v);

  static GridFunction zeros(const Grid& g);
  static GridFunction constant(const Grid& g, double c);

  template <typename Fn>
  static GridFunction sample(const Grid& g, Fn&& fn) {
    Eigen::VectorXd v(g.n_interior);
    for (int i = 0; i < g.n_interior; ++i) v[i] = fn(g.node(i));
    return {g, std::move(v)};
  }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double sup_norm() const;
};

/// Throws std::invalid_argument if the two functions live on different grids.
void require_same_grid(const Grid& lhs, const Grid& rhs, const char* where);

struct AssemblyOptions {
  /// Gauss-Legendre points per half-cell for the far-field kernel moments.
  int quadrature_order = 10;
  /// Multiply the bilinear form by c(1, s). Off by default: the operator
  /// realizes B(u, v) = 1/2 * int int (u(x)-u(y))(v(x)-v(y)) |x-y|^(-1-2s).
  bool include_normalization = false;
};

/// Discrete operator A with h * v^T A u ~ B(u, v).
///
/// Row i reads (A u)_i = sum_{k>=1} w_k (2 u_i - u_{i+k} - u_{i-k}) with
/// u = 0 at exterior nodes, so A_ij = -w_|i-j| off the diagonal and
/// A_ii = sum_{j != i} w_|i-j| + tail_i. The weights come from integrating
/// the kernel against piecewise-linear hats in the offset variable; the
/// first cell uses the analytically integrated second-difference form.
/// Instances are immutable once assembled.
class DiscreteFractionalOperator {
 public:
  DiscreteFractionalOperator(Grid grid, double s, AssemblyOptions options);

  const Grid& grid() const { return grid_; }
  double s() const { return s_; }
  int size() const { return grid_.n_interior; }
  int quadrature_order() const { return options_.quadrature_order; }
  bool includes_normalization() const { return options_.include_normalization; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  /// Toeplitz weight w_k for offset k >= 1 (scaled, physical units).
  double weight(int k) const;
  /// Exterior contribution tail_i = (A 1)_i.
  double tail(int i) const { return tail_[static_cast<std::size_t>(i)]; }

  GridFunction apply(const GridFunction& u) const;
  /// h * v^T A u.
  double form(const GridFunction& u, const GridFunction& v) const;
  /// sqrt(h * u^T A u): the X-norm seen through the assembled matrix.
  double energy_norm(const GridFunction& u) const;

 private:
  Grid grid_;
  double s_;
  AssemblyOptions options_;
  double scale_ = 1.0;
  std::vector<double> unit_weights_;  // w_k / scale_, k = 1 .. n + 1
  std::vector<double> tail_;
  Eigen::MatrixXd matrix_;
};

std::shared_ptr<const DiscreteFractionalOperator> assemble_operator(
    const Grid& grid, double s, AssemblyOptions options = {});

GridFunction apply_operator(const DiscreteFractionalOperator& op, const GridFunction& u);

/// B(u, v) evaluated directly as a double sum over cell pairs of the
/// piecewise-linear reconstructions (zero outside the interval), plus the
/// exterior interaction int u v kappa with
/// kappa(x) = ((x-a)^(-2s) + (b-x)^(-2s)) / (2s).
/// Independent of the assembled matrix.
double gagliardo_form(const GridFunction& u, const GridFunction& v, double s);

/// sqrt(B(u, u)).
double xnorm(const GridFunction& u, double s);

/// Trapezoidal L^q(a, b) norm; the endpoint values are zero.
double lp_norm(const GridFunction& u, double q);

/// c(N, s) = (int_{R^N} (1 - cos z_1) / |z|^(N+2s) dz)^(-1), evaluated by
/// quadrature (near-origin and oscillatory tail handled separately).
double compute_normalization_constant(int N, double s);

/// Same quantity through an independent route (Ooura's double-exponential
/// sine transform after one integration by parts). Used for cross-checks.
double normalization_constant_ooura(int N, double s);

}  // namespace fracmp
