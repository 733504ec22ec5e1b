#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracmp/energy.hpp"
#include "fracmp/mountain_pass.hpp"
#include "fracmp/probes.hpp"

using namespace fracmp;

namespace {

EnergyContext make_context(int n, double s, double lambda) {
  return {assemble_operator(build_grid(-1.0, 1.0, n), s),
          TruncatedNonlinearity(NonlinearitySpec::canonical(2.0), 0.125), lambda};
}

}  // namespace

TEST(Energy, ZeroFunction) {
  const auto ctx = make_context(32, 0.4, 100.0);
  const GridFunction zero = GridFunction::zeros(ctx.grid());
  EXPECT_EQ(energy(ctx, zero), 0.0);
  EXPECT_EQ(gradient(ctx, zero).sup_norm(), 0.0);
  EXPECT_EQ(residual(ctx, zero), 0.0);
}

TEST(Energy, QuadraticWhenLambdaVanishes) {
  const auto ctx = make_context(24, 0.3, 0.0);
  ProbeGenerator gen(ctx.grid(), 1);
  const GridFunction u = gen.next();
  EXPECT_NEAR(energy(ctx, u), 0.5 * ctx.op->form(u, u), 1e-14 * ctx.op->form(u, u));
}

TEST(Energy, RejectsInvalidContext) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, 8), 0.4);
  const TruncatedNonlinearity tr(NonlinearitySpec::canonical(2.0), 0.125);
  EXPECT_THROW(EnergyContext(nullptr, tr, 1.0), std::invalid_argument);
  EXPECT_THROW(EnergyContext(op, tr, -1.0), std::invalid_argument);
  EXPECT_THROW(EnergyContext(op, tr, INFINITY), std::invalid_argument);
}

TEST(Energy, GradientMatchesCentralDifferences) {
  const auto ctx = make_context(64, 0.4, 100.0);
  ProbeGenerator gen(ctx.grid(), 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(0.05, 0.6);
  for (int t = 0; t < 50; ++t) {
    GridFunction u = gen.next();
    u.values *= amp(rng) / std::max(u.sup_norm(), 1e-300);
    GridFunction v = gen.next();
    v.values /= std::max(v.sup_norm(), 1e-300);
    const double eps = 1e-5;
    const GridFunction up{u.grid, u.values + eps * v.values};
    const GridFunction dn{u.grid, u.values - eps * v.values};
    const double fd = (energy(ctx, up) - energy(ctx, dn)) / (2 * eps);
    const double exact = gradient(ctx, u).values.dot(v.values);
    EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << "pair " << t;
  }
}

TEST(Energy, ResidualIsScaledGradient) {
  const auto ctx = make_context(40, 0.6, 10.0);
  ProbeGenerator gen(ctx.grid(), 4);
  const GridFunction u = gen.next();
  EXPECT_NEAR(residual(ctx, u), gradient(ctx, u).sup_norm() / ctx.grid().h, 1e-10 * residual(ctx, u));
}

TEST(Geometry, SphereLevelAndScaling) {
  const auto ctx = make_context(64, 0.4, 100.0);
  const auto geo = mp_geometry(ctx, 300, 5);
  EXPECT_GT(geo.C_emb, 0.0);
  EXPECT_TRUE(geo.sphere_ok);
  EXPECT_GE(geo.sphere_min, geo.beta_lambda);
  EXPECT_DOUBLE_EQ(geo.beta_lambda, geo.rho_lambda * geo.rho_lambda / 8.0);
  EXPECT_NEAR(geo.rho_lambda, 1.0 / (8.0 * 100.0 * geo.C_emb), 1e-15);

  const auto other = mp_geometry(make_context(64, 0.4, 400.0), 300, 5);
  EXPECT_DOUBLE_EQ(other.C_emb, geo.C_emb);
  EXPECT_NEAR(geo.rescaled(400.0).rho_lambda, other.rho_lambda, 1e-15);
  EXPECT_NEAR(other.rho_lambda * 4.0, geo.rho_lambda, 1e-15);
}

TEST(Geometry, EnergyPositiveOnSmallSphereNegativeFarOut) {
  const auto ctx = make_context(64, 0.4, 100.0);
  const auto geo = mp_geometry(ctx, 200);
  GridFunction phi = principal_eigenvector(*ctx.op);
  phi.values /= ctx.op->energy_norm(phi);
  const GridFunction small{phi.grid, geo.rho_lambda * phi.values};
  EXPECT_GE(energy(ctx, small), geo.beta_lambda);
  const GridFunction far{phi.grid, 1e4 * phi.values};
  EXPECT_LT(energy(ctx, far), 0.0);
}

TEST(Geometry, RejectsBadArguments) {
  EXPECT_THROW(mp_geometry(make_context(16, 0.4, 1.0), 0), std::invalid_argument);
  EXPECT_THROW(mp_geometry(make_context(16, 0.4, 0.0), 10), std::invalid_argument);
}
