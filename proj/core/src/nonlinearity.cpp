#include "fracmp/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fracmp {

NonlinearitySpec NonlinearitySpec::canonical(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity: exponent p must exceed 1");
  return NonlinearitySpec(p, Variant::canonical);
}

NonlinearitySpec NonlinearitySpec::table(double p, std::vector<double> t, std::vector<double> f) {
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity: exponent p must exceed 1");
  if (t.size() != f.size()) throw std::invalid_argument("nonlinearity table: column lengths differ");
  if (t.size() < 2) throw std::invalid_argument("nonlinearity table: need at least two rows");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(f[k]))
      throw std::invalid_argument("nonlinearity table: non-finite entry at row " + std::to_string(k));
    if (f[k] < 0.0)
      throw std::invalid_argument("nonlinearity table: negative value at row " + std::to_string(k));
    if (k > 0 && !(t[k] > t[k - 1]))
      throw std::invalid_argument("nonlinearity table: t must be strictly increasing (row " +
                                  std::to_string(k) + ")");
  }
  NonlinearitySpec spec(p, Variant::table);
  spec.t_ = std::move(t);
  spec.f_ = std::move(f);
  return spec;
}

int NonlinearitySpec::segment(double t) const {
  // index k with t_[k] <= t < t_[k+1], clamped to [0, size - 2]
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto k = static_cast<int>(it - t_.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(t_.size()) - 2);
}

double NonlinearitySpec::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (variant_ == Variant::canonical) {
    const double one_minus = 1.0 - t;
    return std::pow(t, p_) * one_minus * one_minus;
  }
  if (t <= t_.front()) return f_.front();
  if (t >= t_.back()) return f_.back();
  const int k = segment(t);
  const double lam = (t - t_[k]) / (t_[k + 1] - t_[k]);
  return (1.0 - lam) * f_[k] + lam * f_[k + 1];
}

double NonlinearitySpec::derivative(double t) const {
  if (t <= 0.0) return 0.0;
  if (variant_ == Variant::canonical) {
    const double one_minus = 1.0 - t;
    return p_ * std::pow(t, p_ - 1.0) * one_minus * one_minus -
           2.0 * std::pow(t, p_) * one_minus;
  }
  if (t < t_.front() || t >= t_.back()) return 0.0;
  const int k = segment(t);
  return (f_[k + 1] - f_[k]) / (t_[k + 1] - t_[k]);
}

double NonlinearitySpec::primitive(double t) const {
  if (t <= 0.0) return 0.0;
  if (variant_ == Variant::canonical) {
    return std::pow(t, p_ + 1.0) / (p_ + 1.0) - 2.0 * std::pow(t, p_ + 2.0) / (p_ + 2.0) +
           std::pow(t, p_ + 3.0) / (p_ + 3.0);
  }
  // Piecewise-linear interpolant, constant outside the table, zero for t <= 0.
  double acc = 0.0;
  double lo = 0.0;
  if (lo < t_.front()) {
    const double hi = std::min(t, t_.front());
    acc += f_.front() * (hi - lo);
    lo = hi;
  }
  for (std::size_t k = 0; k + 1 < t_.size() && lo < t; ++k) {
    const double a = std::max(lo, t_[k]);
    const double b = std::min(t, t_[k + 1]);
    if (b <= a) continue;
    acc += 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
    lo = b;
  }
  if (t > t_.back()) acc += f_.back() * (t - std::max(lo, t_.back()));
  return acc;
}

NonlinearitySpec load_nonlinearity_table(const std::filesystem::path& path, double p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open nonlinearity table: " + path.string());
  std::vector<double> t, f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a)) continue;
    if (!(ss >> b))
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected two columns");
    std::string rest;
    if (ss >> rest)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": trailing data after two columns");
    t.push_back(a);
    f.push_back(b);
  }
  return NonlinearitySpec::table(p, std::move(t), std::move(f));
}

double eval_f(const NonlinearitySpec& spec, double t) { return spec(t); }

TruncatedNonlinearity::TruncatedNonlinearity(NonlinearitySpec base, double R)
    : base_(std::move(base)), R_(R) {
  if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("truncation: R must lie in (0, 1)");
  coefficient_ = base_(R_) / std::pow(R_, base_.p());
  primitive_at_R_ = base_.primitive(R_);
}

double TruncatedNonlinearity::operator()(double t) const {
  if (std::abs(t) <= R_) return base_(std::max(t, 0.0));
  return t > 0.0 ? coefficient_ * std::pow(t, base_.p()) : 0.0;
}

double TruncatedNonlinearity::derivative(double t) const {
  if (t <= 0.0) return 0.0;
  if (t <= R_) return base_.derivative(t);
  return coefficient_ * base_.p() * std::pow(t, base_.p() - 1.0);
}

double TruncatedNonlinearity::primitive(double t) const {
  if (t < 0.0) return -std::min(-t, R_) * base_(0.0);
  if (t <= R_) return base_.primitive(t);
  const double q = base_.p() + 1.0;
  return primitive_at_R_ + coefficient_ * (std::pow(t, q) - std::pow(R_, q)) / q;
}

double eval_truncated(const TruncatedNonlinearity& tr, double t) { return tr(t); }
double eval_primitive(const TruncatedNonlinearity& tr, double t) { return tr.primitive(t); }

ShiftEstimate estimate_shift(const NonlinearitySpec& spec, double lo, double hi, int samples) {
  if (!(hi > lo)) throw std::invalid_argument("estimate_shift: need lo < hi");
  if (samples < 2) throw std::invalid_argument("estimate_shift: need at least two samples");
  const double dt = (hi - lo) / (samples - 1);
  double worst = std::numeric_limits<double>::infinity();
  double prev = spec(lo);
  for (int k = 1; k < samples; ++k) {
    const double cur = spec(lo + k * dt);
    worst = std::min(worst, (cur - prev) / dt);
    prev = cur;
  }
  return {1.1 * std::max(0.0, -worst), lo, hi, samples};
}

bool shift_is_monotone(const NonlinearitySpec& spec, double M, double lo, double hi, int samples) {
  if (!(hi > lo) || samples < 2) throw std::invalid_argument("shift_is_monotone: bad sample set");
  const double dt = (hi - lo) / (samples - 1);
  double prev = spec(lo) + M * lo;
  for (int k = 1; k < samples; ++k) {
    const double t = lo + k * dt;
    const double cur = spec(t) + M * t;
    if (cur < prev - 1e-14 * std::max(1.0, std::abs(prev))) return false;
    prev = cur;
  }
  return true;
}

AlphaBounds alpha_bounds(const TruncatedNonlinearity& tr, int samples) {
  if (samples < 8) throw std::invalid_argument("alpha_bounds: need at least 8 samples");
  const double R = tr.R();
  const double p = tr.p();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  auto probe = [&](double t) {
    const double ratio = tr(t) / std::pow(t, p);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  };
  const int half = samples / 2;
  // geometric spacing resolves t -> 0+, uniform spacing the bulk of (0, R]
  for (int k = 0; k < half; ++k) probe(R * std::pow(1e-8, 1.0 - static_cast<double>(k) / (half - 1)));
  for (int k = 1; k <= samples - half; ++k) probe(R * k / (samples - half));
  // beyond R the ratio is the constant power coefficient
  for (double m : {1.0 + 1e-9, 2.0, 10.0}) probe(R * m);
  if (!(lo > 0.0))
    throw std::domain_error("alpha_bounds: f_R(t)/t^p is not bounded below on (0, R]; R too large");
  return {lo, hi, (p + 1.0) * lo > 2.0 * hi};
}

double default_truncation_level(const NonlinearitySpec& spec) {
  for (int k = 1; k <= 30; ++k) {
    const double R = std::ldexp(1.0, -k);
    try {
      if (alpha_bounds(TruncatedNonlinearity(spec, R)).condition) return R;
    } catch (const std::domain_error&) {
    }
  }
  throw std::domain_error("default_truncation_level: no dyadic R >= 2^-30 satisfies the alpha condition");
}

}  // namespace fracmp
