#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fracmp/experiments.hpp"
#include "fracmp/verification.hpp"

namespace fracmp::cli {

namespace {

using Json = nlohmann::ordered_json;

double resolve_R(const RunConfig& cfg) {
  return cfg.sweep.R > 0.0 ? cfg.sweep.R : default_truncation_level(cfg.sweep.nonlinearity);
}

std::filesystem::path output_file(const RunConfig& cfg, const std::string& stem) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir / (stem + (cfg.format == OutputFormat::csv ? ".csv" : ".json"));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Json metadata(const RunConfig& cfg, double R) {
  Json meta;
  for (const auto& [k, v] : config_echo(cfg))
    if (k != "output_dir") meta["config"][k] = v;
  meta["grid"] = {{"a", cfg.sweep.grid.a}, {"b", cfg.sweep.grid.b},
                  {"n_interior", cfg.sweep.grid.n_interior}, {"h", cfg.sweep.grid.h}};
  meta["s"] = cfg.sweep.params.s;
  meta["p"] = cfg.sweep.params.p;
  meta["R"] = R;
  meta["seed"] = cfg.seed;
  return meta;
}

Json checks_json(const std::vector<CheckResult>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return arr;
}

void write_checks(const RunConfig& cfg, const std::string& stem, const std::vector<CheckResult>& checks,
                  double R) {
  const auto path = output_file(cfg, stem);
  if (cfg.format == OutputFormat::json) {
    Json doc;
    doc["metadata"] = metadata(cfg, R);
    doc["checks"] = checks_json(checks);
    write_text(path, doc.dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  for (const auto& line : provenance(cfg, R)) os << "# " << line << '\n';
  os << "name,passed,detail\n";
  for (const auto& c : checks) os << c.name << ',' << (c.passed ? 1 : 0) << ",\"" << c.detail << "\"\n";
  write_text(path, os.str());
}

int report(const std::string& name, const std::vector<CheckResult>& checks, std::ostream& out) {
  int failures = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": ") << c.detail << '\n';
    if (!c.passed) ++failures;
  }
  out << name << ": " << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
      << '\n';
  return failures == 0 ? 0 : 1;
}

std::string real(double x) { return format_real(x); }

void write_solution(const RunConfig& cfg, const std::string& stem, double R,
                    const std::vector<std::pair<std::string, std::string>>& summary,
                    const std::vector<std::pair<std::string, const GridFunction*>>& columns,
                    const std::vector<CheckResult>& checks) {
  const auto path = output_file(cfg, stem);
  const Grid& g = cfg.sweep.grid;
  if (cfg.format == OutputFormat::json) {
    Json doc;
    doc["metadata"] = metadata(cfg, R);
    for (const auto& [k, v] : summary) doc["summary"][k] = v;
    Json x = Json::array();
    for (int i = 0; i < g.n_interior; ++i) x.push_back(g.node(i));
    doc["x"] = x;
    for (const auto& [col, u] : columns) {
      Json arr = Json::array();
      for (int i = 0; i < u->size(); ++i) arr.push_back((*u)[i]);
      doc[col] = arr;
    }
    doc["checks"] = checks_json(checks);
    write_text(path, doc.dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  for (const auto& line : provenance(cfg, R)) os << "# " << line << '\n';
  for (const auto& [k, v] : summary) os << "# " << k << " = " << v << '\n';
  os << 'x';
  for (const auto& col : columns) os << ',' << col.first;
  os << '\n';
  for (int i = 0; i < g.n_interior; ++i) {
    os << real(g.node(i));
    for (const auto& col : columns) os << ',' << real((*col.second)[i]);
    os << '\n';
  }
  write_text(path, os.str());
}

struct SingleLambda {
  std::shared_ptr<const DiscreteFractionalOperator> op;
  double R;
  double lambda;
  GeometryConstants geometry;
};

SingleLambda prepare(const RunConfig& cfg) {
  SingleLambda out;
  out.op = assemble_operator(cfg.sweep.grid, cfg.sweep.params.s);
  out.R = resolve_R(cfg);
  const TruncatedNonlinearity tr(cfg.sweep.nonlinearity, out.R);
  const EnergyContext unit(out.op, tr, 1.0);
  const GeometryConstants at_one = mp_geometry(unit, cfg.sweep.mp.geometry_probes, cfg.seed);
  // lambda* is searched with default solver budgets so that a deliberately
  // small max_iters only affects the requested solve
  MPConfig search;
  search.seed = cfg.seed;
  out.lambda = cfg.lambda > 0.0 ? cfg.lambda : locate_lambda_star(unit, search, at_one);
  out.geometry = at_one.rescaled(out.lambda);
  return out;
}

int cmd_assemble_check(const RunConfig& cfg, std::ostream& out) {
  const auto checks = operator_checks(cfg.sweep.grid, cfg.sweep.params.s, cfg.seed);
  write_checks(cfg, "assemble_check", checks, resolve_R(cfg));
  return report("assemble-check", checks, out);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  VerifyConfig vc;
  vc.grid = cfg.sweep.grid;
  vc.s = cfg.sweep.params.s;
  vc.p = cfg.sweep.params.p;
  vc.R = cfg.sweep.R;
  vc.lambda = cfg.lambda > 0.0 ? cfg.lambda : 100.0;
  vc.seed = cfg.seed;
  const auto checks = verify_all(vc);
  write_checks(cfg, "verify", checks, resolve_R(cfg));
  return report("verify", checks, out);
}

int cmd_solve_mp(const RunConfig& cfg, std::ostream& out) {
  const SingleLambda run = prepare(cfg);
  const TruncatedNonlinearity tr(cfg.sweep.nonlinearity, run.R);
  const EnergyContext ctx(run.op, tr, run.lambda);
  const MPResult r = run_mpa(ctx, cfg.sweep.mp, run.geometry);

  std::vector<CheckResult> checks;
  checks.push_back({"mp.converged", r.converged, r.converged ? "" : r.diagnostic});
  if (r.converged) {
    const double floor = r.u.values.minCoeff();
    checks.push_back({"mp.nonnegative", floor >= -cfg.sweep.mp.grad_tol, "min u = " + real(floor)});
    checks.push_back({"mp.level_above_beta", r.level >= 0.9 * r.geometry.beta_lambda,
                      "level " + real(r.level) + ", beta " + real(r.geometry.beta_lambda)});
    checks.push_back({"mp.level_below_segment_max", r.level <= r.segment_max * (1.0 + 1e-9),
                      "level " + real(r.level) + ", segment max " + real(r.segment_max)});
  }
  const std::vector<std::pair<std::string, std::string>> summary = {
      {"lambda", real(run.lambda)},
      {"level", real(r.level)},
      {"sup_norm_u", real(r.u.sup_norm())},
      {"xnorm_u", real(xnorm(r.u, cfg.sweep.params.s))},
      {"residual_u", real(residual(ctx, r.u))},
      {"grad_norm", real(r.grad_norm)},
      {"iters", std::to_string(r.iters)},
      {"newton_iters", std::to_string(r.newton_iters)},
      {"converged", r.converged ? "true" : "false"},
      {"accepted_original", r.converged && accept_as_original(r.u, tr) ? "true" : "false"},
      {"diagnostic", r.diagnostic}};
  write_solution(cfg, "solve_mp", run.R, summary, {{"u", &r.u}}, checks);
  for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
  return report("solve-mp", checks, out);
}

int cmd_solve_monotone(const RunConfig& cfg, std::ostream& out) {
  const SingleLambda run = prepare(cfg);
  const TruncatedNonlinearity tr(cfg.sweep.nonlinearity, run.R);
  const EnergyContext ctx(run.op, tr, run.lambda);
  const MPResult mp = run_mpa(ctx, cfg.sweep.mp, run.geometry);
  const bool use_mp = mp.converged && accept_as_original(mp.u, tr);
  const Grid& g = cfg.sweep.grid;
  const OrderedPair pair{use_mp ? mp.u : GridFunction::zeros(g), GridFunction::constant(g, 1.0)};

  MonotoneConfig mono = cfg.sweep.mono;
  if (!(mono.M > 0.0)) mono.M = run.lambda * estimate_shift(cfg.sweep.nonlinearity, 0.0, 1.1, 4096).M0;
  const NonlinearitySpec& f = cfg.sweep.nonlinearity;
  const MonotoneResult r = monotone_iterate(*run.op, [&f](double t) { return f(t); }, run.lambda, pair, mono);

  std::vector<CheckResult> checks;
  checks.push_back({"monotone.converged", r.converged, r.diagnostic});
  checks.push_back({"monotone.order", r.monotonicity_violations == 0,
                    std::to_string(r.monotonicity_violations) + " violations"});
  checks.push_back({"monotone.sandwich", r.sandwich_violations == 0,
                    std::to_string(r.sandwich_violations) + " violations"});
  checks.push_back({"monotone.residual", r.residual <= mono.residual_tol, "residual " + real(r.residual)});

  const std::vector<std::pair<std::string, std::string>> summary = {
      {"lambda", real(run.lambda)},
      {"M", real(mono.M)},
      {"direction", mono.direction == Direction::from_super ? "from_super" : "from_sub"},
      {"lower", use_mp ? "mountain-pass solution" : "zero"},
      {"sup_norm", real(r.u.sup_norm())},
      {"residual", real(r.residual)},
      {"iters", std::to_string(r.iters)},
      {"converged", r.converged ? "true" : "false"},
      {"diagnostic", r.diagnostic}};
  write_solution(cfg, "solve_monotone", run.R, summary, {{"lower", &pair.sub}, {"v", &r.u}}, checks);
  for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
  return report("solve-monotone", checks, out);
}

Json report_json(const TwoSolutionReport& rep) {
  Json j;
  j["lambda_star"] = rep.lambda_star;
  j["lambda0"] = rep.lambda0;
  j["lambda_bar"] = rep.lambda_bar;
  j["rows"] = rep.rows;
  j["converged_rows"] = rep.converged_rows;
  j["inconclusive"] = rep.inconclusive;
  j["sup_norm_slope"] = {{"slope", rep.sup_fit.slope}, {"stderr", rep.sup_fit.stderr_},
                         {"target", rep.sup_target}};
  j["mp_level_slope"] = {{"slope", rep.level_fit.slope}, {"stderr", rep.level_fit.stderr_},
                         {"target", rep.level_target}};
  j["norm_level_ratio"] = {{"min", rep.ratio_min}, {"max", rep.ratio_max}, {"spread", rep.ratio_spread}};
  j["ordering_ok"] = rep.ordering_ok;
  j["ordering_failures"] = rep.ordering_failures;
  j["moser"] = {{"rho", rep.moser.rho}, {"C", rep.moser.C},         {"C1", rep.C1},
                {"checked", rep.moser_checked}, {"passed", rep.moser_passed},
                {"min_slack", rep.moser_min_slack}};
  j["notes"] = rep.notes;
  return j;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const SweepResult sweep = lambda_sweep(cfg.sweep);
  const TwoSolutionReport rep = two_solution_report(sweep);
  const auto prov = provenance(cfg, sweep.R);

  const auto path = output_file(cfg, "sweep");
  if (cfg.format == OutputFormat::csv) {
    std::ostringstream os;
    write_sweep_csv(os, sweep, prov);
    write_text(path, os.str());
  } else {
    Json doc;
    doc["metadata"] = metadata(cfg, sweep.R);
    Json rows = Json::array();
    for (const auto& r : sweep.rows)
      rows.push_back({{"lambda", r.lambda},           {"sup_norm_u", r.sup_norm_u},
                      {"xnorm_u", r.xnorm_u},         {"mp_level", r.mp_level},
                      {"sup_norm_v", r.sup_norm_v},   {"residual_u", r.residual_u},
                      {"residual_v", r.residual_v},   {"ordering_ok", r.ordering_ok},
                      {"strict_margin", r.strict_margin}, {"accepted_original", r.accepted_original},
                      {"mp_converged", r.mp_converged}, {"mono_converged", r.mono_converged},
                      {"mp_iters", r.mp_iters},       {"mono_iters", r.mono_iters},
                      {"diagnostic", r.diagnostic}});
    doc["rows"] = rows;
    write_text(path, doc.dump(2) + "\n");
  }
  Json rdoc;
  rdoc["metadata"] = metadata(cfg, sweep.R);
  rdoc["report"] = report_json(rep);
  write_text(cfg.output_dir / "report.json", rdoc.dump(2) + "\n");

  std::vector<CheckResult> checks;
  checks.push_back({"sweep.rows", static_cast<int>(sweep.rows.size()) == cfg.sweep.count,
                    std::to_string(sweep.rows.size()) + " rows"});
  checks.push_back({"sweep.converged_rows", !rep.inconclusive,
                    std::to_string(rep.converged_rows) + " of " + std::to_string(rep.rows)});
  if (!rep.inconclusive) {
    const double ts = rep.sup_target, tl = rep.level_target;
    checks.push_back({"sweep.sup_norm_slope", std::abs(rep.sup_fit.slope - ts) <= 0.15 * std::abs(ts),
                      "slope " + real(rep.sup_fit.slope) + ", target " + real(ts)});
    checks.push_back({"sweep.level_slope", std::abs(rep.level_fit.slope - tl) <= 0.15 * std::abs(tl),
                      "slope " + real(rep.level_fit.slope) + ", target " + real(tl)});
    checks.push_back({"sweep.norm_level_ratio", rep.ratio_spread <= 3.0,
                      "max/min " + real(rep.ratio_spread)});
  }
  checks.push_back({"sweep.ordering", rep.ordering_ok,
                    "lambda_bar " + real(rep.lambda_bar) + ", failures " +
                        std::to_string(rep.ordering_failures)});
  checks.push_back({"sweep.moser_bound", rep.moser_checked > 0 && rep.moser_passed == rep.moser_checked,
                    std::to_string(rep.moser_passed) + "/" + std::to_string(rep.moser_checked) +
                        ", min slack " + real(rep.moser_min_slack)});
  for (const auto& r : sweep.rows)
    if (!r.diagnostic.empty()) out << "row lambda = " << real(r.lambda) << ": " << r.diagnostic << '\n';
  out << "wrote " << path.string() << '\n';
  return report("sweep", checks, out);
}

}  // namespace

std::vector<std::string> provenance(const RunConfig& cfg, double R) {
  std::vector<std::string> lines;
  for (const auto& [k, v] : config_echo(cfg))
    if (k != "output_dir") lines.push_back(k + " = " + v);
  const Grid& g = cfg.sweep.grid;
  lines.push_back("grid = (" + real(g.a) + ", " + real(g.b) + "), n_interior " +
                  std::to_string(g.n_interior) + ", h " + real(g.h));
  lines.push_back("resolved R = " + real(R));
  return lines;
}

int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out) {
  if (name == "assemble-check") return cmd_assemble_check(cfg, out);
  if (name == "verify") return cmd_verify(cfg, out);
  if (name == "solve-mp") return cmd_solve_mp(cfg, out);
  if (name == "solve-monotone") return cmd_solve_monotone(cfg, out);
  if (name == "sweep") return cmd_sweep(cfg, out);
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

}  // namespace fracmp::cli
