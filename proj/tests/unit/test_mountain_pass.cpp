#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "fracmp/mountain_pass.hpp"

using namespace fracmp;

namespace {

EnergyContext make_context(int n, double lambda) {
  return {assemble_operator(build_grid(-1.0, 1.0, n), 0.4),
          TruncatedNonlinearity(NonlinearitySpec::canonical(2.0), 0.125), lambda};
}

Eigen::VectorXd power_iteration_smallest(const Eigen::MatrixXd& A) {
  // power iteration on A^{-1}
  const auto lu = A.partialPivLu();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows());
  for (int k = 0; k < 2000; ++k) {
    v = lu.solve(v);
    v /= v.cwiseAbs().maxCoeff();
  }
  return v;
}

}  // namespace

TEST(PrincipalEigenvector, PositiveAndMatchesPowerIteration) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, 48), 0.4);
  const GridFunction phi = principal_eigenvector(*op);
  EXPECT_GT(phi.values.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(phi.sup_norm(), 1.0);
  EXPECT_LE((phi.values - power_iteration_smallest(op->matrix())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FindEndpoint, NegativeEnergyOutsideBall) {
  const auto ctx = make_context(32, 200.0);
  const double rho = mp_geometry(ctx, 200).rho_lambda;
  const GridFunction e = find_endpoint(ctx, rho);
  EXPECT_LT(energy(ctx, e), 0.0);
  EXPECT_GT(ctx.op->energy_norm(e), rho);
  EXPECT_THROW(find_endpoint(ctx, rho, 1e-30), std::runtime_error);
}

class ConvergedMountainPass : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ctx_ = new EnergyContext(make_context(48, 2000.0));
    MPConfig cfg;
    cfg.geometry_probes = 300;
    result_ = new MPResult(run_mpa(*ctx_, cfg));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete ctx_;
  }
  static EnergyContext* ctx_;
  static MPResult* result_;
};

EnergyContext* ConvergedMountainPass::ctx_ = nullptr;
MPResult* ConvergedMountainPass::result_ = nullptr;

TEST_F(ConvergedMountainPass, ConvergesWithSmallResidual) {
  const MPResult& r = *result_;
  ASSERT_TRUE(r.converged) << r.diagnostic;
  const MPConfig cfg;
  EXPECT_LE(r.grad_norm, cfg.grad_tol);
  EXPECT_LE(residual(*ctx_, r.u), 10.0 * cfg.grad_tol / ctx_->grid().h);
}

TEST_F(ConvergedMountainPass, LevelBetweenSphereBoundAndSegmentMaximum) {
  const MPResult& r = *result_;
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.level, energy(*ctx_, r.u), 1e-14 * std::abs(r.level));
  EXPECT_GE(r.level, 0.9 * r.geometry.beta_lambda);
  EXPECT_LE(r.level, r.segment_max * (1.0 + 1e-9));
}

TEST_F(ConvergedMountainPass, NonnegativeNontrivialSolution) {
  const MPResult& r = *result_;
  ASSERT_TRUE(r.converged);
  EXPECT_GE(r.u.values.minCoeff(), -1e-9);
  EXPECT_GT(xnorm(r.u, 0.4), 0.0);
  EXPECT_GT(r.u.sup_norm(), 0.0);
}

TEST_F(ConvergedMountainPass, MaximumAlongItsRay) {
  const MPResult& r = *result_;
  ASSERT_TRUE(r.converged);
  for (double t : {0.0, 0.25, 0.5, 0.9, 0.99, 1.01, 1.1, 2.0, 4.0}) {
    const GridFunction ray{r.u.grid, t * r.u.values};
    EXPECT_GE(r.level, energy(*ctx_, ray) - 1e-12 * std::abs(r.level)) << "t = " << t;
  }
}

TEST_F(ConvergedMountainPass, AcceptanceAgainstTruncationLevel) {
  const MPResult& r = *result_;
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(accept_as_original(r.u, ctx_->tr), r.u.values.maxCoeff() <= ctx_->tr.R());
}

TEST(RunMpa, IterationCapReportsDiagnostic) {
  const auto ctx = make_context(32, 2000.0);
  MPConfig cfg;
  cfg.geometry_probes = 100;
  cfg.max_iters = 2;
  cfg.newton_polish = false;
  const MPResult r = run_mpa(ctx, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.diagnostic, "max_iters exceeded");
  EXPECT_TRUE(std::isfinite(r.level));
}

TEST(RunMpa, RejectsBadConfig) {
  const auto ctx = make_context(16, 100.0);
  MPConfig cfg;
  cfg.path_points = 2;
  EXPECT_THROW(run_mpa(ctx, cfg), std::invalid_argument);
  cfg = MPConfig{};
  cfg.grad_tol = 0.0;
  EXPECT_THROW(run_mpa(ctx, cfg), std::invalid_argument);
  cfg = MPConfig{};
  cfg.newton_every = 0;
  EXPECT_THROW(run_mpa(ctx, cfg), std::invalid_argument);
}

TEST(AcceptAsOriginal, Examples) {
  const Grid g = build_grid(0.0, 1.0, 3);
  const TruncatedNonlinearity tr(NonlinearitySpec::canonical(2.0), 0.125);
  EXPECT_TRUE(accept_as_original(GridFunction(g, Eigen::Vector3d(0.0, 0.1, 0.125)), tr));
  EXPECT_FALSE(accept_as_original(GridFunction(g, Eigen::Vector3d(0.0, 0.13, 0.0)), tr));
  EXPECT_FALSE(accept_as_original(GridFunction(g, Eigen::Vector3d(-1e-6, 0.1, 0.0)), tr));
  EXPECT_TRUE(accept_as_original(GridFunction(g, Eigen::Vector3d(-1e-11, 0.1, 0.0)), tr));
}
