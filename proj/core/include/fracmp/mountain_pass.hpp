#pragma once

#include <cstdint>
#include <string>

#include "fracmp/energy.hpp"

namespace fracmp {

struct MPConfig {
  int path_points = 33;
  double grad_tol = 1e-9;
  int max_iters = 20000;
  double descent_step0 = 1.0;
  /// Largest dyadic multiple of the principal eigenvector tried for the endpoint.
  double e_scale_cap = 1099511627776.0;  // 2^40
  /// Random probes for the geometry constants.
  int geometry_probes = 1000;
  std::uint64_t seed = 7;
  /// Every newton_every sweeps, try Newton on A u = lambda f_R(u) from the
  /// path peak; the result is kept only if it converges nearby to a
  /// nonnegative critical point of Morse index one.
  bool newton_polish = true;
  int newton_every = 10;
  int newton_max_iters = 30;
};

struct MPResult {
  GridFunction u;
  double level = 0.0;      ///< J(u), the mountain-pass level
  double grad_norm = 0.0;  ///< sup-norm of the nodal gradient at u
  int iters = 0;
  GridFunction endpoint_e;
  bool converged = false;

  double path_grad_norm = 0.0;  ///< gradient at the path maximum before Newton polishing
  int newton_iters = 0;         ///< Newton steps of the accepted refinement (0 if none)
  double segment_max = 0.0;     ///< max_t J(t e) over the initial straight path
  GeometryConstants geometry;
  std::string diagnostic;
};

/// Positive principal eigenvector of A scaled to sup-norm one.
GridFunction principal_eigenvector(const DiscreteFractionalOperator& op);

/// e = t0 phi with t0 the first dyadic scale (from 2^-64 upward) such that
/// J(e) < 0 and ||e|| > rho. Throws std::runtime_error past e_scale_cap.
GridFunction find_endpoint(const EnergyContext& ctx, double rho, double e_scale_cap = 1099511627776.0);
GridFunction find_endpoint(const EnergyContext& ctx);

/// Path-deformation mountain-pass search on the polygon 0 -> e.
///
/// Each sweep locates the highest path node, slides it to the local
/// maximum along the adjacent path segments, and moves it by a
/// backtracking steepest-descent step measured in the X-metric
/// (direction -A^{-1} grad). The remaining nodes are then redistributed
/// by arclength on either side of the peak. Stops when the nodal gradient
/// at the peak has sup-norm <= grad_tol, or earlier when a periodic Newton
/// refinement from the peak is accepted.
MPResult run_mpa(const EnergyContext& ctx, const MPConfig& cfg);
MPResult run_mpa(const EnergyContext& ctx, const MPConfig& cfg, const GeometryConstants& geometry);

/// True iff -tol <= u_i <= R at every node, i.e. u also solves the untruncated problem.
bool accept_as_original(const GridFunction& u, const TruncatedNonlinearity& tr, double tol = 1e-10);

}  // namespace fracmp
