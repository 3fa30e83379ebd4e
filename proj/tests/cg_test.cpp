#include <gtest/gtest.h>

#include <random>

#include "ssn/cg.hpp"
#include "ssn/models.hpp"
#include "test_util.hpp"

namespace {

auto dense_op(const ssn_test::Dense& A) {
  return [&A](std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < A.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) s += A[i][j] * v[j];
      out[i] = s;
    }
  };
}

}  // namespace

TEST(CgSolve, IdentityConvergesInOneStep) {
  auto id = [](std::span<const double> v, std::span<double> out) {
    std::copy(v.begin(), v.end(), out.begin());
  };
  std::vector<double> rhs{1.0, -2.0, 0.5};
  auto r = ssn::cg_solve(id, rhs, 1e-12, 10);
  EXPECT_EQ(r.iters, 1u);
  EXPECT_EQ(r.status, ssn::CgStatus::Converged);
  EXPECT_EQ(r.d, rhs);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(CgSolve, ZeroRhsReturnsZero) {
  int calls = 0;
  auto op = [&](std::span<const double>, std::span<double>) { ++calls; };
  auto r = ssn::cg_solve(op, std::vector<double>(4, 0.0), 1e-6, 10);
  EXPECT_EQ(r.iters, 0u);
  EXPECT_EQ(r.d, std::vector<double>(4, 0.0));
  EXPECT_EQ(calls, 0);
}

TEST(CgSolve, MatchesDenseSolveOnJacobian) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const bool svc = trial % 2 == 0;
    auto in = ssn_test::random_instance(rng, 12, 8, 0.5, svc);
    auto w = ssn_test::random_vector(rng, 8);
    ssn::Problem p(in.data, svc ? ssn::Task::Svc : ssn::Task::Svr, 2.0, 0.05);
    auto s = ssn::refresh_state(p, w);
    auto rhs = ssn_test::random_vector(rng, 8);
    const double tol = 1e-10;
    auto op = [&](std::span<const double> v, std::span<double> out) {
      ssn::hessian_vec(p, s, v, out);
    };
    auto r = ssn::cg_solve(op, rhs, tol, 200);
    ASSERT_EQ(r.status, ssn::CgStatus::Converged);
    auto V = ssn_test::dense_jacobian(svc, in.x, in.y, w, 2.0, 0.05);
    auto direct = ssn_test::dense_solve(V, rhs);
    // ||d - d*|| <= ||V^-1|| ||V d - rhs|| <= ||V d - rhs|| since V >= I
    std::vector<double> res = ssn_test::dense_mul(V, r.d);
    for (std::size_t j = 0; j < 8; ++j) res[j] -= rhs[j];
    EXPECT_LE(ssn_test::vnorm(res), 1.01 * tol * ssn_test::vnorm(rhs) + 1e-14);
    EXPECT_NEAR(r.residual, ssn_test::vnorm(res), 1e-14);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(r.d[j], direct[j], 1e-8);
  }
}

TEST(CgSolve, StopsAtIterationCap) {
  ssn_test::Dense A(6, std::vector<double>(6, 0.0));
  for (std::size_t i = 0; i < 6; ++i) A[i][i] = 1.0 + static_cast<double>(i);
  std::vector<double> rhs(6, 1.0);
  auto r = ssn::cg_solve(dense_op(A), rhs, 1e-14, 2);
  EXPECT_EQ(r.status, ssn::CgStatus::MaxIter);
  EXPECT_EQ(r.iters, 2u);
  EXPECT_LT(r.residual, ssn_test::vnorm(rhs));
}

TEST(CgSolve, DetectsIndefiniteOperator) {
  ssn_test::Dense A{{1.0, 0.0}, {0.0, -1.0}};
  auto r = ssn::cg_solve(dense_op(A), std::vector<double>{0.0, 1.0}, 1e-8, 10);
  EXPECT_EQ(r.status, ssn::CgStatus::Breakdown);
}
