#include "fracmp/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace fracmp {

GridFunction principal_eigenvector(const DiscreteFractionalOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("principal_eigenvector: eigensolver failed");
  Eigen::VectorXd phi = es.eigenvectors().col(0);
  if (phi.sum() < 0.0) phi = -phi;
  phi /= phi.cwiseAbs().maxCoeff();
  return {op.grid(), std::move(phi)};
}

GridFunction find_endpoint(const EnergyContext& ctx, double rho, double e_scale_cap) {
  const GridFunction phi = principal_eigenvector(*ctx.op);
  for (int k = -64;; ++k) {
    const double t = std::ldexp(1.0, k);
    if (t > e_scale_cap)
      throw std::runtime_error("find_endpoint: e_scale_cap exceeded before J(e) < 0");
    GridFunction e{phi.grid, t * phi.values};
    if (energy(ctx, e) < 0.0 && ctx.op->energy_norm(e) > rho) return e;
  }
}

GridFunction find_endpoint(const EnergyContext& ctx) {
  return find_endpoint(ctx, mp_geometry(ctx, 1000).rho_lambda);
}

bool accept_as_original(const GridFunction& u, const TruncatedNonlinearity& tr, double tol) {
  for (int i = 0; i < u.size(); ++i)
    if (u[i] < -tol || u[i] > tr.R()) return false;
  return true;
}

namespace {

using Vec = Eigen::VectorXd;

class PathSearch {
 public:
  PathSearch(const EnergyContext& ctx, const MPConfig& cfg, const GridFunction& e)
      : ctx_(ctx), cfg_(cfg), grid_(e.grid), llt_(ctx.op->matrix()) {
    if (llt_.info() != Eigen::Success) throw std::runtime_error("run_mpa: operator is not SPD");
    const int P = cfg.path_points;
    nodes_.resize(static_cast<std::size_t>(P));
    values_.resize(static_cast<std::size_t>(P));
    for (int k = 0; k < P; ++k) set(k, (static_cast<double>(k) / (P - 1)) * e.values);
  }

  double J(const Vec& v) const { return energy(ctx_, GridFunction{grid_, v}); }

  int peak() const {
    const auto first = values_.begin() + 1;
    const auto last = values_.end() - 1;
    return static_cast<int>(std::max_element(first, last) - values_.begin());
  }

  // Move node k to the maximum of J over the two path segments adjacent to it.
  void slide(int k) {
    const Vec& left = nodes_[k - 1];
    const Vec& right = nodes_[k + 1];
    const Vec centre = nodes_[k];
    auto point = [&](double sigma) -> Vec {
      return sigma < 0.0 ? Vec(centre + (-sigma) * (left - centre))
                         : Vec(centre + sigma * (right - centre));
    };
    constexpr double inv_phi = 0.6180339887498949;
    double lo = -1.0, hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = J(point(x1)), f2 = J(point(x2));
    for (int it = 0; it < 48 && hi - lo > 1e-10; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = J(point(x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = J(point(x1));
      }
    }
    const double best = f1 > f2 ? x1 : x2;
    const double fbest = std::max(f1, f2);
    if (fbest > values_[k]) set(k, point(best), fbest);
  }

  // Returns false if no descent step was found.
  bool descend(int k, const Vec& res) {
    const Vec dir = -llt_.solve(res);
    const double slope = grid_.h * res.dot(dir);
    if (!(slope < 0.0)) return false;
    const double j0 = values_[k];
    for (double tau = cfg_.descent_step0; tau > 1e-14; tau *= 0.5) {
      Vec trial = nodes_[k] + tau * dir;
      const double jt = J(trial);
      if (jt <= j0 + 1e-4 * tau * slope) {
        set(k, std::move(trial), jt);
        return true;
      }
    }
    return false;
  }

  // Redistribute nodes by arclength on both sides of the peak, keeping the
  // peak at the middle index. Returns the new peak index.
  int retension(int k) {
    const int P = static_cast<int>(nodes_.size());
    const int mid = (P - 1) / 2;
    std::vector<Vec> left(nodes_.begin(), nodes_.begin() + k + 1);
    std::vector<Vec> right(nodes_.begin() + k, nodes_.end());
    std::vector<Vec> fresh(static_cast<std::size_t>(P));
    resample(left, mid, fresh, 0);
    resample(right, P - 1 - mid, fresh, mid);
    const double peak_value = values_[k];
    nodes_ = std::move(fresh);
    for (int j = 0; j < P; ++j)
      values_[j] = (j == mid) ? peak_value : J(nodes_[j]);
    return mid;
  }

  bool unbalanced(int k) const {
    const int P = static_cast<int>(nodes_.size());
    if (k <= 1 || k >= P - 2) return true;
    double lo = 1e300, hi = 0.0;
    for (int j = 0; j + 1 < P; ++j) {
      const double len = (nodes_[j + 1] - nodes_[j]).norm();
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    }
    return hi > 3.0 * lo;
  }

  const Vec& node(int k) const { return nodes_[k]; }
  double value(int k) const { return values_[k]; }

  Vec residual_vector(const Vec& u) const {
    Vec r = ctx_.op->matrix() * u;
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] -= ctx_.lambda * ctx_.tr(u[i]);
    return r;
  }

 private:
  void set(int k, Vec v) {
    values_[k] = J(v);
    nodes_[k] = std::move(v);
  }
  void set(int k, Vec v, double j) {
    values_[k] = j;
    nodes_[k] = std::move(v);
  }

  // Place segments + 1 points (offset .. offset + segments) uniformly along the polygon.
  static void resample(const std::vector<Vec>& poly, int segments, std::vector<Vec>& out, int offset) {
    std::vector<double> cum(poly.size(), 0.0);
    for (std::size_t j = 1; j < poly.size(); ++j) cum[j] = cum[j - 1] + (poly[j] - poly[j - 1]).norm();
    const double total = cum.back();
    std::size_t seg = 0;
    for (int j = 0; j <= segments; ++j) {
      if (j == 0) { out[offset] = poly.front(); continue; }
      if (j == segments) { out[offset + j] = poly.back(); continue; }
      const double target = total * j / segments;
      while (seg + 2 < poly.size() && cum[seg + 1] < target) ++seg;
      const double span = cum[seg + 1] - cum[seg];
      const double lam = span > 0.0 ? (target - cum[seg]) / span : 0.0;
      out[offset + j] = (1.0 - lam) * poly[seg] + lam * poly[seg + 1];
    }
  }

  const EnergyContext& ctx_;
  const MPConfig& cfg_;
  Grid grid_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::vector<Vec> nodes_;
  std::vector<double> values_;
};

// Newton iteration on A u - lambda f_R(u) = 0 started at a path node.
// Accepted only if it reaches the gradient tolerance close to the start,
// stays nonnegative and lands on a critical point of Morse index one.
// Returns the iteration count, or -1 (u untouched) when rejected.
int newton_refine(const EnergyContext& ctx, Vec& u, const MPConfig& cfg) {
  const Eigen::MatrixXd& A = ctx.op->matrix();
  const double h = ctx.grid().h;
  auto res = [&](const Vec& v) {
    Vec r = A * v;
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] -= ctx.lambda * ctx.tr(v[i]);
    return r;
  };
  auto hessian = [&](const Vec& v) {
    Eigen::MatrixXd jac = A;
    for (Eigen::Index i = 0; i < v.size(); ++i) jac(i, i) -= ctx.lambda * ctx.tr.derivative(v[i]);
    return jac;
  };
  const Vec start = u;
  const double size = start.cwiseAbs().maxCoeff();
  Vec w = u;
  Vec r = res(w);
  int it = 0;
  while (h * r.cwiseAbs().maxCoeff() > cfg.grad_tol) {
    if (it++ >= cfg.newton_max_iters) return -1;
    w -= hessian(w).partialPivLu().solve(r);
    if (!w.allFinite() || (w - start).cwiseAbs().maxCoeff() > 0.25 * size) return -1;
    r = res(w);
  }
  // A few extra steps push the residual down to roundoff.
  for (int extra = 0; extra < 2; ++extra) {
    const Vec next = w - hessian(w).partialPivLu().solve(r);
    const Vec rn = res(next);
    if (!(rn.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff())) break;
    w = next;
    r = rn;
  }
  if (w.minCoeff() < -cfg.grad_tol) return -1;
  if ((w - start).cwiseAbs().maxCoeff() > 0.25 * size) return -1;
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hessian(w), Eigen::EigenvaluesOnly).eigenvalues();
  if ((eig.array() < 0.0).count() != 1) return -1;
  u = w;
  return it;
}

}  // namespace

MPResult run_mpa(const EnergyContext& ctx, const MPConfig& cfg) {
  return run_mpa(ctx, cfg, mp_geometry(ctx, cfg.geometry_probes, cfg.seed));
}

MPResult run_mpa(const EnergyContext& ctx, const MPConfig& cfg, const GeometryConstants& geometry) {
  if (cfg.path_points < 3) throw std::invalid_argument("run_mpa: path_points must be >= 3");
  if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("run_mpa: grad_tol must be positive");
  if (cfg.max_iters < 0) throw std::invalid_argument("run_mpa: max_iters must be nonnegative");
  if (cfg.newton_every < 1) throw std::invalid_argument("run_mpa: newton_every must be >= 1");

  MPResult out;
  out.geometry = geometry;
  out.endpoint_e = find_endpoint(ctx, geometry.rho_lambda, cfg.e_scale_cap);

  {
    // max_t J(t e): sampled, then refined by golden section around the best sample
    const GridFunction& e = out.endpoint_e;
    auto along = [&](double t) { return energy(ctx, GridFunction{e.grid, t * e.values}); };
    constexpr int samples = 512;
    int best_j = 1;
    double best = along(1.0 / samples);
    for (int j = 2; j < samples; ++j) {
      const double v = along(static_cast<double>(j) / samples);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    constexpr double inv_phi = 0.6180339887498949;
    double lo = (best_j - 1.0) / samples, hi = (best_j + 1.0) / samples;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = along(x1), f2 = along(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = along(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = along(x1);
      }
    }
    out.segment_max = std::max({best, f1, f2});
  }

  PathSearch path(ctx, cfg, out.endpoint_e);
  const double h = ctx.grid().h;
  Vec u;
  for (out.iters = 0; out.iters < cfg.max_iters; ++out.iters) {
    const int k = path.peak();
    path.slide(k);
    const Vec res = path.residual_vector(path.node(k));
    out.path_grad_norm = h * res.cwiseAbs().maxCoeff();
    u = path.node(k);
    if (out.path_grad_norm <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
    if (cfg.newton_polish && (out.iters + 1) % cfg.newton_every == 0) {
      out.newton_iters = newton_refine(ctx, u, cfg);
      if (out.newton_iters >= 0) {
        out.converged = true;
        break;
      }
      out.newton_iters = 0;
      u = path.node(k);
    }
    if (!path.descend(k, res)) {
      out.diagnostic = "line search failed at path peak";
      break;
    }
    if (path.unbalanced(k)) path.retension(k);
  }
  if (!out.converged && out.diagnostic.empty()) out.diagnostic = "max_iters exceeded";
  if (!out.converged) u = path.node(path.peak());

  out.u = GridFunction{ctx.grid(), std::move(u)};
  out.level = energy(ctx, out.u);
  out.grad_norm = gradient(ctx, out.u).sup_norm();
  return out;
}

}  // namespace fracmp
