#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "fracmp/monotone.hpp"
#include "fracmp/mountain_pass.hpp"
#include "fracmp/probes.hpp"

using namespace fracmp;

namespace {

const NonlinearitySpec kF = NonlinearitySpec::canonical(2.0);

}  // namespace

TEST(ShiftedSolver, MatchesExplicitInverse) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, 40), 0.4);
  ProbeGenerator gen(op->grid(), 9);
  for (double M : {0.0, 1.0, 10.0}) {
    Eigen::MatrixXd shifted = op->matrix();
    shifted.diagonal().array() += M;
    const Eigen::MatrixXd inv = shifted.fullPivLu().inverse();
    const ShiftedSolver solver(*op, M);
    EXPECT_LE((solver.inverse() - inv).cwiseAbs().maxCoeff(), 1e-12 * inv.cwiseAbs().maxCoeff());
    const GridFunction rhs = gen.next();
    const GridFunction x = solve_shifted(*op, M, rhs);
    EXPECT_LE((x.values - inv * rhs.values).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + x.sup_norm()));
  }
}

TEST(SubSuper, ConstantOneIsSupersolutionZeroIsSubsolution) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, 32), 0.4);
  const GridFunction one = GridFunction::constant(op->grid(), 1.0);
  const GridFunction zero = GridFunction::zeros(op->grid());
  for (double lambda : {1.0, 100.0, 1e4}) {
    EXPECT_TRUE(is_supersolution(*op, kF, lambda, one, 0.0));
    EXPECT_TRUE(is_subsolution(*op, kF, lambda, zero, 0.0));
  }
  const GridFunction two = GridFunction::constant(op->grid(), 2.0);
  EXPECT_FALSE(is_supersolution(*op, kF, 1e4, two, 0.0));
}

TEST(DefaultConfig, ShiftScalesWithLambda) {
  const auto a = default_monotone_config(kF, 1.0);
  const auto b = default_monotone_config(kF, 50.0);
  EXPECT_NEAR(b.M, 50.0 * a.M, 1e-12 * b.M);
  EXPECT_TRUE(shift_is_monotone(kF, a.M, 0.0, 1.1, 5000));
}

class MonotoneFromPair : public ::testing::Test {
 protected:
  void SetUp() override { op_ = assemble_operator(build_grid(-1.0, 1.0, 48), 0.4); }
  std::shared_ptr<const DiscreteFractionalOperator> op_;
  const double lambda_ = 2000.0;
};

TEST_F(MonotoneFromPair, FromSuperIsNonincreasingAndOrdered) {
  const OrderedPair pair{GridFunction::zeros(op_->grid()), GridFunction::constant(op_->grid(), 1.0)};
  const auto cfg = default_monotone_config(kF, lambda_);
  const MonotoneResult r = monotone_iterate(*op_, kF, lambda_, pair, cfg);
  ASSERT_TRUE(r.converged) << r.diagnostic;
  EXPECT_EQ(r.monotonicity_violations, 0);
  EXPECT_EQ(r.sandwich_violations, 0);
  EXPECT_LE(r.residual, cfg.residual_tol);
  EXPECT_GE(r.u.values.minCoeff(), -1e-12);
  EXPECT_LE(r.u.values.maxCoeff(), 1.0 + 1e-12);
  EXPECT_GT(r.u.sup_norm(), 0.5);
}

TEST_F(MonotoneFromPair, MaximalSolutionDominatesMountainPassSolution) {
  const EnergyContext ctx(op_, TruncatedNonlinearity(kF, 0.125), lambda_);
  MPConfig mp;
  mp.geometry_probes = 200;
  const MPResult u = run_mpa(ctx, mp);
  ASSERT_TRUE(u.converged) << u.diagnostic;
  ASSERT_TRUE(accept_as_original(u.u, ctx.tr, 1e-9));

  const OrderedPair pair{u.u, GridFunction::constant(op_->grid(), 1.0)};
  const MonotoneResult v = monotone_iterate(*op_, kF, lambda_, pair, default_monotone_config(kF, lambda_));
  ASSERT_TRUE(v.converged) << v.diagnostic;
  EXPECT_GE((v.u.values - u.u.values).minCoeff(), 1e-3);
}

TEST_F(MonotoneFromPair, FromSubStaysAtZero) {
  const OrderedPair pair{GridFunction::zeros(op_->grid()), GridFunction::constant(op_->grid(), 1.0)};
  auto cfg = default_monotone_config(kF, lambda_, Direction::from_sub);
  const MonotoneResult r = monotone_iterate(*op_, kF, lambda_, pair, cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.u.sup_norm(), 0.0);
}

TEST_F(MonotoneFromPair, RejectsInvalidPairs) {
  const GridFunction zero = GridFunction::zeros(op_->grid());
  const GridFunction one = GridFunction::constant(op_->grid(), 1.0);
  const auto cfg = default_monotone_config(kF, lambda_);
  // unordered
  EXPECT_THROW(monotone_iterate(*op_, kF, lambda_, {one, zero}, cfg), std::invalid_argument);
  // upper function is not a supersolution
  const GridFunction half = GridFunction::constant(op_->grid(), 0.5);
  EXPECT_THROW(monotone_iterate(*op_, kF, lambda_, {zero, half}, cfg), std::invalid_argument);
  // shift must be positive
  auto bad = cfg;
  bad.M = -1.0;
  EXPECT_THROW(monotone_iterate(*op_, kF, lambda_, {zero, one}, bad), std::invalid_argument);
}

TEST_F(MonotoneFromPair, TooSmallShiftIsReported) {
  const EnergyContext ctx(op_, TruncatedNonlinearity(kF, 0.125), lambda_);
  MPConfig mp;
  mp.geometry_probes = 200;
  const MPResult u = run_mpa(ctx, mp);
  ASSERT_TRUE(u.converged) << u.diagnostic;
  // without enough shift the first iterate from 1 drops below the lower solution
  const OrderedPair pair{u.u, GridFunction::constant(op_->grid(), 1.0)};
  auto cfg = default_monotone_config(kF, lambda_);
  cfg.M = 1e-3;
  const MonotoneResult r = monotone_iterate(*op_, kF, lambda_, pair, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.monotonicity_violations + r.sandwich_violations, 0);
  EXPECT_NE(r.diagnostic.find("shift M too small"), std::string::npos);
}

TEST(ComparisonCheck, InversePositiveAcrossOrdersAndShifts) {
  for (double s : {0.25, 0.4, 0.75}) {
    const auto op = assemble_operator(build_grid(-1.0, 1.0, 32), s);
    for (double M : {0.0, 1.0, 10.0}) {
      const ComparisonReport rep = comparison_check(*op, M, 100);
      EXPECT_TRUE(rep.passed()) << "s = " << s << ", M = " << M << ": " << rep.first_violation;
      EXPECT_TRUE(rep.inverse_checked);
      EXPECT_EQ(rep.trials, 100);
      EXPECT_GE(rep.min_inverse_entry, 0.0);
    }
  }
}
