#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fracmp/energy.hpp"
#include "fracmp/grid_operator.hpp"
#include "fracmp/monotone.hpp"
#include "fracmp/mountain_pass.hpp"
#include "fracmp/nonlinearity.hpp"

namespace fracmp {

/// Dimension, fractional order, exponent and the critical exponent 2N/(N-2s).
struct FracParams {
  int N = 1;
  double s = 0.4;
  double p = 2.0;
  double two_star = 10.0;

  /// Fills two_star and validates. Throws std::invalid_argument with
  /// "requires N > 2s" or "supercritical exponent".
  static FracParams make(int N, double s, double p);
  /// (N + 2s) / (N - 2s).
  double critical_p() const;
};

void validate_params(const FracParams& params);

struct SweepConfig {
  FracParams params;
  NonlinearitySpec nonlinearity = NonlinearitySpec::canonical(2.0);
  /// Truncation height; <= 0 picks default_truncation_level.
  double R = 0.0;
  /// lambda_min <= 0 locates lambda* first and sweeps [lambda*, lambda* 10^decades].
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int count = 8;
  double decades = 3.0;
  Grid grid = build_grid(-1.0, 1.0, 128);
  MPConfig mp;
  /// M <= 0 means lambda * M0 per row.
  MonotoneConfig mono;
  std::uint64_t seed = 7;
  int threads = 1;
  double strict_margin_tol = 1e-8;
  double ordering_tol = 1e-8;
};

/// Throws std::invalid_argument on the first violated precondition.
void validate_sweep_config(const SweepConfig& cfg);

/// count points from lo to hi, equally spaced in log.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct SweepRecord {
  double lambda = 0.0;
  double sup_norm_u = 0.0;
  double xnorm_u = 0.0;
  double mp_level = 0.0;
  double sup_norm_v = 0.0;
  double residual_u = 0.0;
  double residual_v = 0.0;
  bool ordering_ok = false;
  double strict_margin = 0.0;
  bool accepted_original = false;

  bool mp_converged = false;
  bool mono_converged = false;
  int mp_iters = 0;
  int mono_iters = 0;
  int monotonicity_violations = 0;
  std::string diagnostic;

  bool converged() const { return mp_converged && mono_converged; }
};

struct SweepResult {
  SweepConfig config;  ///< with R and the lambda range resolved
  std::shared_ptr<const DiscreteFractionalOperator> op;
  double R = 0.0;
  double lambda_star = 0.0;
  double lambda0 = 0.0;  ///< smallest accepted lambda; 0 if none
  GeometryConstants geometry;  ///< at lambda = 1
  std::vector<SweepRecord> rows;
  std::vector<GridFunction> u;  ///< mountain-pass solutions, one per row
  std::vector<GridFunction> v;  ///< monotone-iteration solutions (empty if not run)
};

/// Smallest dyadic lambda >= start whose mountain-pass solution converges
/// and satisfies 0 <= u <= R. Throws std::runtime_error after max_doublings.
double locate_lambda_star(const EnergyContext& base, const MPConfig& mp,
                          const GeometryConstants& geometry_at_one, double start = 1.0,
                          int max_doublings = 40);

/// Mountain pass per lambda, then monotone iteration from 1 down with the
/// pair (u_{lambda0}, 1). Per-row failures land in SweepRecord::diagnostic.
SweepResult lambda_sweep(const SweepConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// OLS of log y on log x. Needs >= 4 points, all positive.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// C1 = (rho / C)^(1/(2* - p - 1)) * prod_i ((k_i+1)^2 / (2 k_i + 1))^(1 / (2 (k_i+1)))
/// with k_i + 1 = (2* / (2 l))^i, l = 2* / (2* - (p - 1)). Partial products
/// stop once the log increment drops below tol.
double moser_constant(const FracParams& params, double rho, double C, double tol = 1e-12);

/// k_i + 1 for i = 1 .. count.
std::vector<double> moser_exponents(const FracParams& params, int count);

struct MoserCheck {
  bool passed = false;
  double lhs = 0.0;    ///< ||u||_inf
  double rhs = 0.0;    ///< lambda^(1/(2*-p-1)) C1 ||u||_{2*}^((2*-2)/(2*-p-1))
  double slack = 0.0;  ///< rhs / lhs (inf when lhs = 0)
};

MoserCheck moser_bound_check(const SweepRecord& record, const GridFunction& u,
                             const FracParams& params, double C1);

/// rho = sup f_R(t)/t^p and C = min 2 B(w, w) / ||w||_{2*}^2 over random
/// probes, the given solutions and their powers u^(k_i+1).
struct MoserInputs {
  double rho = 0.0;
  double C = 0.0;
  int probes = 0;
};

MoserInputs moser_inputs(const DiscreteFractionalOperator& op, const TruncatedNonlinearity& tr,
                         const FracParams& params, const std::vector<GridFunction>& solutions,
                         int random_probes = 500, std::uint64_t seed = 13);

struct TwoSolutionReport {
  double lambda_star = 0.0;
  double lambda0 = 0.0;
  double lambda_bar = 0.0;  ///< 0 when no row qualifies
  int rows = 0;
  int converged_rows = 0;
  bool inconclusive = true;

  SlopeFit sup_fit;
  SlopeFit level_fit;
  double sup_target = 0.0;
  double level_target = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double ratio_spread = 0.0;  ///< ratio_max / ratio_min of xnorm_u / mp_level^(1/2)

  bool ordering_ok = false;  ///< every converged row with lambda >= lambda_bar ordered
  int ordering_failures = 0;

  MoserInputs moser;
  double C1 = 0.0;
  int moser_checked = 0;
  int moser_passed = 0;
  double moser_min_slack = 0.0;
  std::vector<std::string> notes;
};

TwoSolutionReport two_solution_report(const SweepResult& sweep);
TwoSolutionReport two_solution_report(const SweepConfig& cfg);

/// "# key = value" lines followed by the fixed CSV header and one line per row.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep,
                     const std::vector<std::string>& provenance);

/// Shortest round-trip formatting used by the CSV writer.
std::string format_real(double x);

extern const char* const kSweepCsvColumns;

}  // namespace fracmp
