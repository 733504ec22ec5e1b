#pragma once

#include <cstdint>
#include <memory>

#include "fracmp/grid_operator.hpp"
#include "fracmp/nonlinearity.hpp"

namespace fracmp {

/// Operator, truncated reaction and lambda for J(u) = 1/2 h u^T A u - lambda h sum F_R(u_i).
struct EnergyContext {
  std::shared_ptr<const DiscreteFractionalOperator> op;
  TruncatedNonlinearity tr;
  double lambda;

  /// lambda = 0 is accepted for degenerate internal evaluations.
  EnergyContext(std::shared_ptr<const DiscreteFractionalOperator> op, TruncatedNonlinearity tr,
                double lambda);

  const Grid& grid() const { return op->grid(); }
};

double energy(const EnergyContext& ctx, const GridFunction& u);

/// Nodal gradient h (A u - lambda f_R(u)); <gradient, v> is the directional derivative.
GridFunction gradient(const EnergyContext& ctx, const GridFunction& u);

/// || A u - lambda f_R(u) ||_inf.
double residual(const EnergyContext& ctx, const GridFunction& u);

struct GeometryConstants {
  double C_emb = 0.0;
  double rho_lambda = 0.0;
  double beta_lambda = 0.0;
  double p = 2.0;
  int probes_used = 0;
  double sphere_min = 0.0;  ///< smallest sampled J on the sphere ||u|| = rho
  bool sphere_ok = false;   ///< sphere_min >= beta_lambda

  /// rho and beta for another lambda with the same C_emb.
  GeometryConstants rescaled(double lambda) const;
};

/// Estimates C in int alpha1 |u|^(p+1) <= C ||u||^(p+1) by random probes on
/// the unit sphere of the operator norm, sets rho = (8 lambda C)^(-1/(p-1))
/// and beta = rho^2 / 8, then samples J on the sphere of radius rho. A
/// failed sphere check doubles the probe count once.
GeometryConstants mp_geometry(const EnergyContext& ctx, int probes, std::uint64_t seed = 7);

}  // namespace fracmp
