#include "fracmp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fracmp/energy.hpp"
#include "fracmp/experiments.hpp"
#include "fracmp/monotone.hpp"
#include "fracmp/nonlinearity.hpp"
#include "fracmp/probes.hpp"

namespace fracmp {

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

template <typename... Args>
std::string describe(const Args&... args) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << args);
  return os.str();
}

double smooth_bump(double x) {
  const double t = 1.0 - x * x;
  return t > 0.0 ? t * t : 0.0;
}

double form_mismatch(const Grid& g, double s) {
  const auto op = assemble_operator(g, s);
  const GridFunction u = GridFunction::sample(g, smooth_bump);
  const double exact = gagliardo_form(u, u, s);
  return std::abs(op->form(u, u) - exact) / exact;
}

}  // namespace

std::vector<CheckResult> operator_checks(const Grid& grid, double s, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const auto op = assemble_operator(grid, s);
  const Eigen::MatrixXd& A = op->matrix();
  const int n = op->size();

  out.push_back({"operator.symmetric", A == A.transpose(), ""});

  double worst_off = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) worst_off = std::max(worst_off, A(i, j));
  out.push_back({"operator.offdiag_nonpositive", n == 1 || worst_off <= 0.0,
                 describe("max off-diagonal ", worst_off)});
  out.push_back({"operator.diag_positive", A.diagonal().minCoeff() > 0.0,
                 describe("min diagonal ", A.diagonal().minCoeff())});

  if (n <= 256) {
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
    out.push_back({"operator.positive_definite", lmin > 0.0, describe("smallest eigenvalue ", lmin)});
  } else {
    const bool ok = Eigen::LLT<Eigen::MatrixXd>(A).info() == Eigen::Success;
    out.push_back({"operator.positive_definite", ok, "Cholesky"});
  }

  for (double M : {0.0, 1.0, 10.0}) {
    const ComparisonReport rep = comparison_check(*op, M, 20, seed);
    out.push_back({describe("operator.inverse_positive.M=", M), rep.passed(),
                   describe("min entry ", rep.min_inverse_entry, ", negative entries ",
                            rep.negative_inverse_entries, ", ordered-pair violations ",
                            rep.violations)});
  }

  ProbeGenerator gen(grid, seed);
  double worst_sym = 0.0;
  const double normA = A.norm();
  for (int t = 0; t < 20; ++t) {
    const GridFunction u = gen.next(), v = gen.next();
    const double lhs = op->apply(u).values.dot(v.values);
    const double rhs = u.values.dot(op->apply(v).values);
    worst_sym = std::max(worst_sym, std::abs(lhs - rhs) / (normA * u.values.norm() * v.values.norm()));
  }
  out.push_back({"operator.integration_by_parts", worst_sym <= 1e-12,
                 describe("max relative asymmetry ", worst_sym)});

  bool sign_rule = true;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 20 && n > 1; ++t) {
    GridFunction u = GridFunction::zeros(grid);
    for (int i = 0; i < n; ++i) u[i] = unif(rng);
    const int zero = static_cast<int>(unif(rng) * n) % n;
    u[zero] = 0.0;
    if (op->apply(u)[zero] > 0.0) sign_rule = false;
  }
  out.push_back({"operator.zero_node_sign", sign_rule, "(Au)_i <= 0 where u >= 0 vanishes"});

  double worst_identity = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 10; ++t) {
    const GridFunction v = gen.smooth();
    const GridFunction neg{grid, (-v.values).cwiseMax(0.0)};
    const double scale = gagliardo_form(v, v, s) + 1e-300;
    worst_identity = std::max(worst_identity,
                              (gagliardo_form(v, neg, s) + gagliardo_form(neg, neg, s)) / scale);
  }
  out.push_back({"operator.negative_part_identity", worst_identity <= 1e-12,
                 describe("max (B(v,v-) + B(v-,v-)) / B(v,v) = ", worst_identity)});

  const Grid fine = build_grid(grid.a, grid.b, 2 * grid.n_interior + 1);
  const double e1 = form_mismatch(grid, s), e2 = form_mismatch(fine, s);
  out.push_back({"operator.form_consistency", e2 < e1 && e1 < 0.1,
                 describe("relative mismatch ", e1, " -> ", e2, " under halving h")});
  return out;
}

std::vector<CheckResult> verify_all(const VerifyConfig& cfg) {
  std::vector<CheckResult> out = operator_checks(cfg.grid, cfg.s, cfg.seed);
  const Grid& grid = cfg.grid;

  {
    const double c = compute_normalization_constant(1, 0.5);
    const double err = std::abs(c - 1.0 / std::numbers::pi);
    out.push_back({"normalization.half", err <= 1e-6, describe("|c(1,1/2) - 1/pi| = ", err)});
    const double a = compute_normalization_constant(1, 0.25), b = normalization_constant_ooura(1, 0.25);
    out.push_back({"normalization.two_schemes", std::abs(a - b) <= 1e-8,
                   describe("c(1,1/4): ", a, " vs ", b)});
  }

  const NonlinearitySpec f = NonlinearitySpec::canonical(cfg.p);
  const double R = cfg.R > 0.0 ? cfg.R : default_truncation_level(f);
  const TruncatedNonlinearity tr(f, R);
  {
    double worst = 0.0;
    for (double t = -0.5; t <= 2.0; t += 0.0625) {
      const double step = 1e-6;
      const double fd = (tr.primitive(t + step) - tr.primitive(t - step)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - tr(t)));
    }
    out.push_back({"nonlinearity.primitive", f(0.0) == 0.0 && worst <= 1e-8,
                   describe("max |F_R' - f_R| = ", worst)});
    const AlphaBounds ab = alpha_bounds(tr);
    out.push_back({"nonlinearity.alpha_bounds", ab.condition,
                   describe("alpha0 = ", ab.alpha0, ", alpha1 = ", ab.alpha1, ", R = ", R)});
  }

  const auto op = assemble_operator(grid, cfg.s);
  const EnergyContext ctx(op, tr, cfg.lambda);
  {
    ProbeGenerator gen(grid, cfg.seed + 1);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      GridFunction u = gen.smooth();
      u.values = u.values.cwiseAbs() * (0.5 / std::max(u.sup_norm(), 1e-300));
      const GridFunction v = gen.smooth();
      const double analytic = gradient(ctx, u).values.dot(v.values);
      const double step = 1e-5;
      const GridFunction up{grid, u.values + step * v.values}, um{grid, u.values - step * v.values};
      const double fd = (energy(ctx, up) - energy(ctx, um)) / (2.0 * step);
      worst = std::max(worst, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-12));
    }
    out.push_back({"energy.gradient_fd", worst <= 1e-6, describe("max relative error ", worst)});
  }

  const MonotoneConfig mono = default_monotone_config(f, cfg.lambda);
  {
    const ComparisonReport rep = comparison_check(*op, mono.M, 100, cfg.seed);
    out.push_back({"monotone.comparison", rep.passed(),
                   describe("M = ", mono.M, ", violations ", rep.violations)});
  }
  {
    const Reaction reaction = [&f](double t) { return f(t); };
    const MonotoneResult r = monotone_iterate(
        *op, reaction, cfg.lambda, {GridFunction::zeros(grid), GridFunction::constant(grid, 1.0)}, mono);
    const bool ok = r.converged && r.monotonicity_violations == 0 && r.sandwich_violations == 0;
    out.push_back({"monotone.from_super", ok,
                   describe("iterations ", r.iters, ", residual ", r.residual,
                            r.diagnostic.empty() ? "" : ", ", r.diagnostic)});
  }

  {
    std::vector<double> xs, ys;
    for (int k = 1; k <= 8; ++k) {
      xs.push_back(std::pow(2.0, k));
      ys.push_back(std::pow(xs.back(), -2.0));
    }
    const SlopeFit fit = fit_slope(xs, ys);
    out.push_back({"experiments.fit_slope", std::abs(fit.slope + 2.0) <= 1e-12,
                   describe("slope ", fit.slope)});
  }
  if (1.0 > 2.0 * cfg.s && cfg.p < (1.0 + 2.0 * cfg.s) / (1.0 - 2.0 * cfg.s)) {
    const FracParams params = FracParams::make(1, cfg.s, cfg.p);
    const double a = moser_constant(params, 1.0, 1.0, 1e-10), b = moser_constant(params, 1.0, 1.0, 1e-12);
    out.push_back({"experiments.moser_constant", std::isfinite(a) && std::abs(a - b) <= 1e-10,
                   describe("C1 = ", a, " vs ", b)});
  }
  return out;
}

}  // namespace fracmp
