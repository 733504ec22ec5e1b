#include "fracmp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracmp/probes.hpp"

namespace fracmp {

EnergyContext::EnergyContext(std::shared_ptr<const DiscreteFractionalOperator> op_,
                             TruncatedNonlinearity tr_, double lambda_)
    : op(std::move(op_)), tr(std::move(tr_)), lambda(lambda_) {
  if (!op) throw std::invalid_argument("EnergyContext: null operator");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("EnergyContext: lambda must be a finite nonnegative number");
}

double energy(const EnergyContext& ctx, const GridFunction& u) {
  require_same_grid(ctx.grid(), u.grid, "energy");
  double potential = 0.0;
  for (int i = 0; i < u.size(); ++i) potential += ctx.tr.primitive(u[i]);
  return 0.5 * ctx.op->form(u, u) - ctx.lambda * ctx.grid().h * potential;
}

GridFunction gradient(const EnergyContext& ctx, const GridFunction& u) {
  require_same_grid(ctx.grid(), u.grid, "gradient");
  GridFunction g = ctx.op->apply(u);
  for (int i = 0; i < u.size(); ++i) g[i] = ctx.grid().h * (g[i] - ctx.lambda * ctx.tr(u[i]));
  return g;
}

double residual(const EnergyContext& ctx, const GridFunction& u) {
  require_same_grid(ctx.grid(), u.grid, "residual");
  const GridFunction Au = ctx.op->apply(u);
  double worst = 0.0;
  for (int i = 0; i < u.size(); ++i)
    worst = std::max(worst, std::abs(Au[i] - ctx.lambda * ctx.tr(u[i])));
  return worst;
}

GeometryConstants GeometryConstants::rescaled(double lambda) const {
  GeometryConstants g = *this;
  g.rho_lambda = std::pow(8.0 * lambda * C_emb, -1.0 / (p - 1.0));
  g.beta_lambda = g.rho_lambda * g.rho_lambda / 8.0;
  return g;
}

GeometryConstants mp_geometry(const EnergyContext& ctx, int probes, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("mp_geometry: need at least one probe");
  if (!(ctx.lambda > 0.0)) throw std::invalid_argument("mp_geometry: need lambda > 0");
  const double p = ctx.tr.p();
  const double alpha1 = alpha_bounds(ctx.tr).alpha1;
  const double h = ctx.grid().h;

  ProbeGenerator gen(ctx.grid(), seed);
  std::vector<GridFunction> sphere;
  double C = 0.0;
  auto draw = [&](int count) {
    for (int k = 0; k < count; ++k) {
      GridFunction w = gen.next();
      const double norm = ctx.op->energy_norm(w);
      if (!(norm > 0.0)) continue;
      w.values /= norm;
      const double power = alpha1 * h * w.values.cwiseAbs().array().pow(p + 1.0).sum();
      C = std::max(C, power);
      sphere.push_back(std::move(w));
    }
  };

  GeometryConstants geo;
  geo.p = p;
  auto evaluate = [&] {
    geo.C_emb = C;
    geo = geo.rescaled(ctx.lambda);
    geo.probes_used = static_cast<int>(sphere.size());
    geo.sphere_min = std::numeric_limits<double>::infinity();
    for (const auto& w : sphere) {
      GridFunction on_sphere{w.grid, geo.rho_lambda * w.values};
      geo.sphere_min = std::min(geo.sphere_min, energy(ctx, on_sphere));
    }
    geo.sphere_ok = geo.sphere_min >= geo.beta_lambda;
  };

  draw(probes);
  evaluate();
  if (!geo.sphere_ok) {
    draw(probes);
    evaluate();
  }
  return geo;
}

}  // namespace fracmp
