#include "fracmp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fracmp/probes.hpp"

namespace fracmp {

const char* const kSweepCsvColumns =
    "lambda,sup_norm_u,xnorm_u,mp_level,sup_norm_v,residual_u,residual_v,ordering_ok,"
    "strict_margin,accepted_original";

FracParams FracParams::make(int N, double s, double p) {
  FracParams out;
  out.N = N;
  out.s = s;
  out.p = p;
  out.two_star = (N > 2.0 * s) ? 2.0 * N / (N - 2.0 * s) : std::numeric_limits<double>::infinity();
  validate_params(out);
  return out;
}

double FracParams::critical_p() const { return (N + 2.0 * s) / (N - 2.0 * s); }

void validate_params(const FracParams& params) {
  if (params.N < 1) throw std::invalid_argument("N: dimension must be >= 1");
  if (!(params.s > 0.0 && params.s < 1.0)) throw std::invalid_argument("s: must lie in (0, 1)");
  if (!(params.N > 2.0 * params.s)) throw std::invalid_argument("s: experiments requires N > 2s");
  if (!(params.p > 1.0)) throw std::invalid_argument("p: exponent must exceed 1");
  if (!(params.p < params.critical_p()))
    throw std::invalid_argument("p: supercritical exponent (need p < (N+2s)/(N-2s))");
}

void validate_sweep_config(const SweepConfig& cfg) {
  validate_params(cfg.params);
  if (cfg.nonlinearity.p() != cfg.params.p)
    throw std::invalid_argument("p: nonlinearity exponent differs from params.p");
  if (cfg.R >= 1.0) throw std::invalid_argument("R: truncation level must be < 1");
  if (cfg.count < 4) throw std::invalid_argument("count: need at least 4 lambda values");
  if (cfg.lambda_min > 0.0 && !(cfg.lambda_max >= cfg.lambda_min))
    throw std::invalid_argument("lambda_max: must be >= lambda_min");
  if (cfg.lambda_min <= 0.0 && !(cfg.decades > 0.0))
    throw std::invalid_argument("decades: must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("threads: must be >= 1");
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw std::invalid_argument("geometric_grid: need 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) out[k] = lo * std::exp(step * k);
  out.back() = hi;
  return out;
}

double locate_lambda_star(const EnergyContext& base, const MPConfig& mp,
                          const GeometryConstants& geometry_at_one, double start,
                          int max_doublings) {
  if (!(start > 0.0)) throw std::invalid_argument("locate_lambda_star: start must be positive");
  double lambda = start;
  for (int k = 0; k <= max_doublings; ++k, lambda *= 2.0) {
    EnergyContext ctx(base.op, base.tr, lambda);
    const MPResult r = run_mpa(ctx, mp, geometry_at_one.rescaled(lambda));
    if (r.converged && accept_as_original(r.u, base.tr)) return lambda;
  }
  throw std::runtime_error("locate_lambda_star: no accepted solution up to start * 2^max_doublings");
}

namespace {

template <typename Fn>
void for_each_index(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) fn(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

SweepResult lambda_sweep(const SweepConfig& cfg_in) {
  validate_sweep_config(cfg_in);
  SweepResult out;
  out.config = cfg_in;
  SweepConfig& cfg = out.config;
  const double s = cfg.params.s;

  out.op = assemble_operator(cfg.grid, s);
  out.R = cfg.R > 0.0 ? cfg.R : default_truncation_level(cfg.nonlinearity);
  cfg.R = out.R;
  const TruncatedNonlinearity tr(cfg.nonlinearity, out.R);
  const EnergyContext unit(out.op, tr, 1.0);
  out.geometry = mp_geometry(unit, cfg.mp.geometry_probes, cfg.seed);

  if (cfg.lambda_min <= 0.0) {
    out.lambda_star = locate_lambda_star(unit, cfg.mp, out.geometry);
    cfg.lambda_min = out.lambda_star;
    cfg.lambda_max = out.lambda_star * std::pow(10.0, cfg.decades);
  }
  const std::vector<double> lambdas = geometric_grid(cfg.lambda_min, cfg.lambda_max, cfg.count);
  const int count = cfg.count;
  out.rows.resize(static_cast<std::size_t>(count));
  out.u.resize(static_cast<std::size_t>(count));

  for_each_index(count, cfg.threads, [&](int k) {
    SweepRecord& row = out.rows[k];
    row.lambda = lambdas[k];
    const EnergyContext ctx(out.op, tr, row.lambda);
    try {
      MPResult r = run_mpa(ctx, cfg.mp, out.geometry.rescaled(row.lambda));
      row.mp_converged = r.converged;
      row.mp_iters = r.iters;
      row.sup_norm_u = r.u.sup_norm();
      row.xnorm_u = xnorm(r.u, s);
      row.mp_level = r.level;
      row.residual_u = residual(ctx, r.u);
      row.accepted_original = r.converged && accept_as_original(r.u, tr);
      if (!r.converged) row.diagnostic = "mountain pass: " + r.diagnostic;
      out.u[k] = std::move(r.u);
    } catch (const std::exception& e) {
      row.diagnostic = std::string("mountain pass: ") + e.what();
      out.u[k] = GridFunction::zeros(cfg.grid);
    }
  });

  int first = -1;
  for (int k = 0; k < count; ++k)
    if (out.rows[k].accepted_original) {
      first = k;
      break;
    }
  out.v.resize(static_cast<std::size_t>(count), GridFunction::zeros(cfg.grid));
  if (first < 0) {
    for (auto& row : out.rows)
      if (row.diagnostic.empty()) row.diagnostic = "no accepted mountain-pass solution for lambda0";
    return out;
  }
  out.lambda0 = out.rows[first].lambda;
  const GridFunction& lower = out.u[first];
  const NonlinearitySpec& f = cfg.nonlinearity;
  const Reaction reaction = [&f](double t) { return f(t); };
  const double M0 = estimate_shift(f, 0.0, 1.1, 4096).M0;

  for_each_index(count, cfg.threads, [&](int k) {
    SweepRecord& row = out.rows[k];
    if (k < first) {
      if (row.diagnostic.empty()) row.diagnostic = "lambda below lambda0";
      return;
    }
    MonotoneConfig mono = cfg.mono;
    mono.direction = Direction::from_super;
    if (!(mono.M > 0.0)) mono.M = row.lambda * M0;
    try {
      MonotoneResult m = monotone_iterate(*out.op, reaction, row.lambda,
                                          {lower, GridFunction::constant(cfg.grid, 1.0)}, mono);
      row.mono_converged = m.converged;
      row.mono_iters = m.iters;
      row.monotonicity_violations = m.monotonicity_violations + m.sandwich_violations;
      row.residual_v = m.residual;
      row.sup_norm_v = m.u.sup_norm();
      if (!m.converged) {
        if (!row.diagnostic.empty()) row.diagnostic += "; ";
        row.diagnostic += "monotone: " + m.diagnostic;
      }
      const GridFunction& u = out.u[k];
      const double tol = cfg.ordering_tol;
      row.strict_margin = (m.u.values - u.values).minCoeff();
      row.ordering_ok = (u.values.array() >= -tol).all() &&
                        (u.values.array() <= m.u.values.array() + tol).all() &&
                        (m.u.values.array() <= 1.0 + tol).all();
      out.v[k] = std::move(m.u);
    } catch (const std::exception& e) {
      if (!row.diagnostic.empty()) row.diagnostic += "; ";
      row.diagnostic += std::string("monotone: ") + e.what();
    }
  });
  return out;
}

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_slope: xs and ys differ in length");
  if (xs.size() < 4) throw std::invalid_argument("fit_slope: need at least 4 points");
  const int n = static_cast<int>(xs.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (int i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("fit_slope: data must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_slope: xs must not all coincide");
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    sse += r * r;
  }
  fit.stderr_ = std::sqrt(sse / (n - 2) / sxx);
  return fit;
}

namespace {

void require_subcritical(const FracParams& params) {
  if (!(params.two_star > params.p + 1.0))
    throw std::invalid_argument("moser: supercritical exponent (need 2* > p + 1)");
}

double moser_ratio(const FracParams& params) {
  const double l = params.two_star / (params.two_star - (params.p - 1.0));
  return params.two_star / (2.0 * l);
}

}  // namespace

std::vector<double> moser_exponents(const FracParams& params, int count) {
  require_subcritical(params);
  const double q = moser_ratio(params);
  std::vector<double> out;
  double m = 1.0;
  for (int i = 1; i <= count; ++i) out.push_back(m *= q);
  return out;
}

double moser_constant(const FracParams& params, double rho, double C, double tol) {
  require_subcritical(params);
  if (!(rho > 0.0) || !(C > 0.0)) throw std::invalid_argument("moser_constant: rho and C must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("moser_constant: tol must be positive");
  const double q = moser_ratio(params);
  double log_prod = 0.0;
  double m = 1.0;
  for (int i = 1; i < 10000; ++i) {
    m *= q;
    const double inc = std::log(m * m / (2.0 * m - 1.0)) / (2.0 * m);
    log_prod += inc;
    if (std::abs(inc) < tol) break;
  }
  const double e = 1.0 / (params.two_star - params.p - 1.0);
  return std::pow(rho / C, e) * std::exp(log_prod);
}

MoserCheck moser_bound_check(const SweepRecord& record, const GridFunction& u,
                             const FracParams& params, double C1) {
  require_subcritical(params);
  MoserCheck out;
  const double d = params.two_star - params.p - 1.0;
  out.lhs = u.sup_norm();
  out.rhs = std::pow(record.lambda, 1.0 / d) * C1 *
            std::pow(lp_norm(u, params.two_star), (params.two_star - 2.0) / d);
  out.slack = out.lhs > 0.0 ? out.rhs / out.lhs : std::numeric_limits<double>::infinity();
  out.passed = out.lhs <= out.rhs;
  return out;
}

MoserInputs moser_inputs(const DiscreteFractionalOperator& op, const TruncatedNonlinearity& tr,
                         const FracParams& params, const std::vector<GridFunction>& solutions,
                         int random_probes, std::uint64_t seed) {
  MoserInputs out;
  out.rho = alpha_bounds(tr).alpha1;
  out.C = std::numeric_limits<double>::infinity();
  auto take = [&](const GridFunction& w) {
    const double norm = lp_norm(w, params.two_star);
    if (!(norm > 0.0)) return;
    out.C = std::min(out.C, 2.0 * op.form(w, w) / (norm * norm));
    ++out.probes;
  };
  ProbeGenerator gen(op.grid(), seed);
  for (int k = 0; k < random_probes; ++k) take(gen.next());
  for (int i = 0; i < op.size(); ++i) {
    GridFunction spike = GridFunction::zeros(op.grid());
    spike[i] = 1.0;
    take(spike);
  }
  const std::vector<double> powers = moser_exponents(params, 8);
  for (const auto& u : solutions) {
    const GridFunction up{u.grid, u.values.cwiseMax(0.0)};
    take(up);
    for (double m : powers) take(GridFunction{u.grid, up.values.array().pow(m).matrix()});
  }
  return out;
}

TwoSolutionReport two_solution_report(const SweepResult& sweep) {
  TwoSolutionReport rep;
  const double p = sweep.config.params.p;
  rep.lambda_star = sweep.lambda_star;
  rep.lambda0 = sweep.lambda0;
  rep.rows = static_cast<int>(sweep.rows.size());
  rep.sup_target = -1.0 / (p - 1.0);
  rep.level_target = -2.0 / (p - 1.0);

  std::vector<double> lam, sup, level;
  std::vector<GridFunction> mp_solutions;
  std::vector<int> mp_rows;
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;
  for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
    const SweepRecord& row = sweep.rows[k];
    if (row.converged()) ++rep.converged_rows;
    if (!row.mp_converged || !(row.mp_level > 0.0) || !(row.sup_norm_u > 0.0)) continue;
    lam.push_back(row.lambda);
    sup.push_back(row.sup_norm_u);
    level.push_back(row.mp_level);
    const double ratio = row.xnorm_u / std::sqrt(row.mp_level);
    rep.ratio_min = std::min(rep.ratio_min, ratio);
    rep.ratio_max = std::max(rep.ratio_max, ratio);
    mp_solutions.push_back(sweep.u[k]);
    mp_rows.push_back(static_cast<int>(k));
  }

  for (const SweepRecord& row : sweep.rows)
    if (row.converged() && row.ordering_ok && row.strict_margin > sweep.config.strict_margin_tol) {
      rep.lambda_bar = row.lambda;
      break;
    }
  rep.ordering_ok = rep.lambda_bar > 0.0;
  for (const SweepRecord& row : sweep.rows) {
    if (!row.converged() || row.lambda < rep.lambda_bar) continue;
    const double tol = sweep.config.mono.residual_tol;
    if (!row.ordering_ok || row.residual_v > tol) {
      ++rep.ordering_failures;
      rep.ordering_ok = false;
    }
  }

  if (lam.size() < 4 || rep.converged_rows < 4) {
    rep.inconclusive = true;
    rep.notes.push_back("fewer than 4 converged rows; fits skipped");
  } else {
    rep.inconclusive = false;
    rep.sup_fit = fit_slope(lam, sup);
    rep.level_fit = fit_slope(lam, level);
    rep.ratio_spread = rep.ratio_max / rep.ratio_min;
  }
  if (rep.lambda_bar == 0.0) rep.notes.push_back("no row with both solutions converged and strictly ordered");

  if (!mp_solutions.empty()) {
    const TruncatedNonlinearity tr(sweep.config.nonlinearity, sweep.R);
    rep.moser = moser_inputs(*sweep.op, tr, sweep.config.params, mp_solutions, 500, sweep.config.seed);
    rep.C1 = moser_constant(sweep.config.params, rep.moser.rho, rep.moser.C);
    rep.moser_min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < mp_solutions.size(); ++j) {
      const MoserCheck c =
          moser_bound_check(sweep.rows[mp_rows[j]], mp_solutions[j], sweep.config.params, rep.C1);
      ++rep.moser_checked;
      if (c.passed) ++rep.moser_passed;
      rep.moser_min_slack = std::min(rep.moser_min_slack, c.slack);
    }
  }
  return rep;
}

TwoSolutionReport two_solution_report(const SweepConfig& cfg) {
  return two_solution_report(lambda_sweep(cfg));
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep,
                     const std::vector<std::string>& provenance) {
  for (const auto& line : provenance) os << "# " << line << '\n';
  os << kSweepCsvColumns << '\n';
  for (const SweepRecord& r : sweep.rows) {
    os << format_real(r.lambda) << ',' << format_real(r.sup_norm_u) << ','
       << format_real(r.xnorm_u) << ',' << format_real(r.mp_level) << ','
       << format_real(r.sup_norm_v) << ',' << format_real(r.residual_u) << ','
       << format_real(r.residual_v) << ',' << (r.ordering_ok ? 1 : 0) << ','
       << format_real(r.strict_margin) << ',' << (r.accepted_original ? 1 : 0) << '\n';
  }
}

}  // namespace fracmp
