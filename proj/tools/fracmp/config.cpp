#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

namespace fracmp::cli {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double to_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(key, "expected a real number, got '" + text + "'");
  return value;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(key, "expected an integer, got '" + text + "'");
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const long long v = to_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail(key, "integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  fail(key, "expected true or false, got '" + text + "'");
}

std::string real_text(double x) { return format_real(x); }

std::string short_real(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_KEY(name, field)                                                          \
  Key {                                                                                \
    name, [](RunConfig& c, const std::string& v) { c.field = to_real(name, v); },      \
        [](const RunConfig& c) { return real_text(c.field); }                          \
  }
#define INT_KEY(name, field)                                                           \
  Key {                                                                                \
    name, [](RunConfig& c, const std::string& v) { c.field = to_int(name, v); },       \
        [](const RunConfig& c) { return std::to_string(c.field); }                     \
  }
#define BOOL_KEY(name, field)                                                          \
  Key {                                                                                \
    name, [](RunConfig& c, const std::string& v) { c.field = to_bool(name, v); },      \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }     \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "experiment") c.mode = Mode::experiment;
         else if (v == "operator") c.mode = Mode::operator_only;
         else fail("mode", "expected experiment or operator, got '" + v + "'");
       },
       [](const RunConfig& c) {
         return std::string(c.mode == Mode::experiment ? "experiment" : "operator");
       }},
      INT_KEY("N", sweep.params.N),
      REAL_KEY("s", sweep.params.s),
      REAL_KEY("p", sweep.params.p),
      REAL_KEY("a", a),
      REAL_KEY("b", b),
      INT_KEY("n", n),
      {"nonlinearity",
       [](RunConfig& c, const std::string& v) {
         if (v != "canonical" && v != "table")
           fail("nonlinearity", "expected canonical or table, got '" + v + "'");
         c.nonlinearity = v;
       },
       [](const RunConfig& c) { return c.nonlinearity; }},
      {"table_path", [](RunConfig& c, const std::string& v) { c.table_path = v; },
       [](const RunConfig& c) { return c.table_path.string(); }},
      REAL_KEY("R", sweep.R),
      REAL_KEY("lambda", lambda),
      REAL_KEY("lambda_min", sweep.lambda_min),
      REAL_KEY("lambda_max", sweep.lambda_max),
      INT_KEY("count", sweep.count),
      REAL_KEY("decades", sweep.decades),
      INT_KEY("path_points", sweep.mp.path_points),
      REAL_KEY("grad_tol", sweep.mp.grad_tol),
      INT_KEY("max_iters", sweep.mp.max_iters),
      REAL_KEY("descent_step0", sweep.mp.descent_step0),
      REAL_KEY("e_scale_cap", sweep.mp.e_scale_cap),
      INT_KEY("geometry_probes", sweep.mp.geometry_probes),
      BOOL_KEY("newton_polish", sweep.mp.newton_polish),
      INT_KEY("newton_every", sweep.mp.newton_every),
      INT_KEY("newton_max_iters", sweep.mp.newton_max_iters),
      REAL_KEY("M", sweep.mono.M),
      REAL_KEY("tol_sup", sweep.mono.tol_sup),
      REAL_KEY("residual_tol", sweep.mono.residual_tol),
      INT_KEY("mono_max_iters", sweep.mono.max_iters),
      {"direction",
       [](RunConfig& c, const std::string& v) {
         if (v == "from_super") c.sweep.mono.direction = Direction::from_super;
         else if (v == "from_sub") c.sweep.mono.direction = Direction::from_sub;
         else fail("direction", "expected from_super or from_sub, got '" + v + "'");
       },
       [](const RunConfig& c) {
         return std::string(c.sweep.mono.direction == Direction::from_super ? "from_super" : "from_sub");
       }},
      REAL_KEY("order_tol", sweep.mono.order_tol),
      REAL_KEY("pair_tol", sweep.mono.pair_tol),
      REAL_KEY("strict_margin_tol", sweep.strict_margin_tol),
      REAL_KEY("ordering_tol", sweep.ordering_tol),
      INT_KEY("threads", sweep.threads),
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const long long x = to_integer("seed", v);
         if (x < 0) fail("seed", "must be nonnegative");
         c.seed = static_cast<std::uint64_t>(x);
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"format",
       [](RunConfig& c, const std::string& v) {
         if (v == "csv") c.format = OutputFormat::csv;
         else if (v == "json") c.format = OutputFormat::json;
         else fail("format", "expected csv or json, got '" + v + "'");
       },
       [](const RunConfig& c) { return std::string(c.format == OutputFormat::csv ? "csv" : "json"); }},
  };
  return table;
}

#undef REAL_KEY
#undef INT_KEY
#undef BOOL_KEY

void require(bool ok, const std::string& key, const RunConfig& cfg, const std::string& what) {
  if (ok) return;
  for (const auto& k : keys())
    if (key == k.name) throw ConfigError(key + " = " + k.get(cfg) + ": " + what);
  fail(key, what);
}

RunConfig parse_items(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  std::vector<std::string> seen;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") fail(item.fullname(), "sections are not allowed");
    if (!item.parents.empty()) fail(item.fullname(), "unknown key (nested keys are not allowed)");
    const auto it = std::find_if(keys().begin(), keys().end(),
                                 [&](const Key& k) { return item.name == k.name; });
    if (it == keys().end()) fail(item.name, "unknown key");
    if (std::find(seen.begin(), seen.end(), item.name) != seen.end()) fail(item.name, "duplicate key");
    seen.push_back(item.name);
    if (item.inputs.size() != 1) fail(item.name, "expected a single value");
    it->set(cfg, item.inputs.front());
  }
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
  finalize(cfg);
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_items(in);
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_items(in);
}

RunConfig default_config() { return parse_config_text(""); }

void finalize(RunConfig& cfg) {
  FracParams& fp = cfg.sweep.params;
  require(fp.N == 1, "N", cfg, "only N = 1 is supported");
  require(fp.s > 0.0 && fp.s < 1.0, "s", cfg, "must lie in (0, 1)");
  if (cfg.mode == Mode::experiment) {
    require(fp.N > 2.0 * fp.s, "s", cfg, "experiment mode requires N > 2s");
    require(fp.p > 1.0, "p", cfg, "exponent must exceed 1");
    require(fp.p < fp.critical_p(), "p", cfg,
            "supercritical exponent (need p < (N+2s)/(N-2s) = " + short_real(fp.critical_p()) + ")");
    fp = FracParams::make(fp.N, fp.s, fp.p);
  } else {
    require(fp.p > 1.0, "p", cfg, "exponent must exceed 1");
    fp.two_star = fp.N > 2.0 * fp.s ? 2.0 * fp.N / (fp.N - 2.0 * fp.s)
                                    : std::numeric_limits<double>::infinity();
  }
  require(cfg.b > cfg.a, "b", cfg, "must exceed a");
  require(cfg.n >= 1, "n", cfg, "must be >= 1");
  cfg.sweep.grid = build_grid(cfg.a, cfg.b, cfg.n);

  if (cfg.nonlinearity == "table") {
    require(!cfg.table_path.empty(), "table_path", cfg, "required when nonlinearity = table");
    try {
      cfg.sweep.nonlinearity = load_nonlinearity_table(cfg.table_path, fp.p);
    } catch (const std::exception& e) {
      fail("table_path", e.what());
    }
  } else {
    cfg.sweep.nonlinearity = NonlinearitySpec::canonical(fp.p);
  }

  const SweepConfig& sw = cfg.sweep;
  require(sw.R >= 0.0 && sw.R < 1.0, "R", cfg, "must lie in [0, 1) (0 selects automatically)");
  require(cfg.lambda >= 0.0, "lambda", cfg, "must be >= 0 (0 locates lambda*)");
  require(sw.lambda_min >= 0.0, "lambda_min", cfg, "must be >= 0 (0 locates lambda*)");
  require(sw.lambda_min == 0.0 || sw.lambda_max >= sw.lambda_min, "lambda_max", cfg,
          "must be >= lambda_min");
  require(sw.count >= 4, "count", cfg, "must be >= 4 for slope fitting");
  require(sw.decades > 0.0, "decades", cfg, "must be positive");
  require(sw.mp.path_points >= 3, "path_points", cfg, "must be >= 3");
  require(sw.mp.grad_tol > 0.0, "grad_tol", cfg, "must be positive");
  require(sw.mp.max_iters >= 0, "max_iters", cfg, "must be >= 0");
  require(sw.mp.descent_step0 > 0.0, "descent_step0", cfg, "must be positive");
  require(sw.mp.e_scale_cap > 0.0, "e_scale_cap", cfg, "must be positive");
  require(sw.mp.geometry_probes >= 1, "geometry_probes", cfg, "must be >= 1");
  require(sw.mp.newton_every >= 1, "newton_every", cfg, "must be >= 1");
  require(sw.mp.newton_max_iters >= 1, "newton_max_iters", cfg, "must be >= 1");
  require(sw.mono.M >= 0.0, "M", cfg, "must be >= 0 (0 selects lambda * M0)");
  require(sw.mono.tol_sup > 0.0, "tol_sup", cfg, "must be positive");
  require(sw.mono.residual_tol > 0.0, "residual_tol", cfg, "must be positive");
  require(sw.mono.max_iters >= 1, "mono_max_iters", cfg, "must be >= 1");
  require(sw.mono.order_tol >= 0.0, "order_tol", cfg, "must be >= 0");
  require(sw.mono.pair_tol >= 0.0, "pair_tol", cfg, "must be >= 0");
  require(sw.strict_margin_tol >= 0.0, "strict_margin_tol", cfg, "must be >= 0");
  require(sw.ordering_tol >= 0.0, "ordering_tol", cfg, "must be >= 0");
  require(sw.threads >= 1, "threads", cfg, "must be >= 1");

  cfg.sweep.seed = cfg.seed;
  cfg.sweep.mp.seed = cfg.seed;
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

}  // namespace fracmp::cli
