#pragma once

#include <filesystem>
#include <vector>

namespace fracmp {

/// Reaction term f with f(0) = 0, f >= 0 and f(t) ~ t^p as t -> 0+.
///
/// The canonical variant is f(t) = (t+)^p (1 - t)^2, which vanishes at 0
/// and 1 and is positive on (0, 1) and (1, 2). The table variant linearly
/// interpolates user-supplied (t, f(t)) samples and clamps outside them.
class NonlinearitySpec {
 public:
  enum class Variant { canonical, table };

  static NonlinearitySpec canonical(double p);
  static NonlinearitySpec table(double p, std::vector<double> t, std::vector<double> f);

  double p() const { return p_; }
  Variant variant() const { return variant_; }
  const std::vector<double>& table_t() const { return t_; }
  const std::vector<double>& table_f() const { return f_; }

  double operator()(double t) const;
  /// One-sided (right) derivative; used by Newton refinements.
  double derivative(double t) const;
  /// int_0^t f for t >= 0 (exact for both variants).
  double primitive(double t) const;

 private:
  NonlinearitySpec(double p, Variant v) : p_(p), variant_(v) {}
  int segment(double t) const;

  double p_;
  Variant variant_;
  std::vector<double> t_;
  std::vector<double> f_;
};

/// Reads a two-column text table "t f(t)" (blank lines and '#' comments
/// allowed). Rejects negative f, unsorted t and fewer than two rows.
NonlinearitySpec load_nonlinearity_table(const std::filesystem::path& path, double p);

double eval_f(const NonlinearitySpec& spec, double t);

/// f_R(t) = f(t+) for |t| <= R and (f(R)/R^p) (t+)^p otherwise.
class TruncatedNonlinearity {
 public:
  TruncatedNonlinearity(NonlinearitySpec base, double R);

  const NonlinearitySpec& base() const { return base_; }
  double R() const { return R_; }
  double p() const { return base_.p(); }
  /// f(R) / R^p, the coefficient of the power extension.
  double power_coefficient() const { return coefficient_; }

  double operator()(double t) const;
  double derivative(double t) const;
  /// F_R(t) = int_0^t f_R.
  double primitive(double t) const;

 private:
  NonlinearitySpec base_;
  double R_;
  double coefficient_;
  double primitive_at_R_;
};

double eval_truncated(const TruncatedNonlinearity& tr, double t);
double eval_primitive(const TruncatedNonlinearity& tr, double t);

struct ShiftEstimate {
  double M0 = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int sample_count = 0;
};

/// Smallest sampled M0 making t -> f(t) + M0 t nondecreasing on [lo, hi],
/// inflated by 10%.
ShiftEstimate estimate_shift(const NonlinearitySpec& spec, double lo, double hi, int samples);

/// True when t -> f(t) + M t is nondecreasing on `samples` uniform points.
bool shift_is_monotone(const NonlinearitySpec& spec, double M, double lo, double hi, int samples);

struct AlphaBounds {
  double alpha0 = 0.0;  ///< inf_{t>0} f_R(t) / t^p (sampled)
  double alpha1 = 0.0;  ///< sup_{t>0} f_R(t) / t^p (sampled)
  /// (p + 1) alpha0 > 2 alpha1: the superlinearity margin
  /// needed for the norm-level estimate under the 1/2-normalized form.
  bool condition = false;
};

/// Sampled envelope alpha0 t^p <= f_R(t) <= alpha1 t^p. Throws
/// std::domain_error when the lower envelope degenerates (R too large).
AlphaBounds alpha_bounds(const TruncatedNonlinearity& tr, int samples = 4096);

/// Largest dyadic R <= 1/2 whose alpha bounds satisfy the condition.
double default_truncation_level(const NonlinearitySpec& spec);

}  // namespace fracmp
