#include <cmath>

#include <gtest/gtest.h>

#include "ctgp/errors.hpp"
#include "ctgp/kernels.hpp"
#include "oracles/dense_gp.hpp"

namespace ctgp {
namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

TEST(Kernels, SquaredExponentialMatchesClosedForm) {
  const auto k = KernelSpec::squared_exponential(0.3);
  EXPECT_DOUBLE_EQ(k(pt({0.2}), pt({0.2})), 1.0);
  EXPECT_NEAR(k(pt({0.0, 0.0}), pt({0.3, 0.4})), oracle::se({0, 0}, {0.3, 0.4}, 0.3), 1e-15);
  EXPECT_NEAR(k(pt({0.0}), pt({0.3})), std::exp(-0.5), 1e-15);
}

TEST(Kernels, MaternMatchesClosedForms) {
  for (double nu : {0.5, 1.5, 2.5}) {
    const auto k = KernelSpec::matern(nu, 0.25);
    for (double r : {0.0, 0.05, 0.3, 1.2}) {
      EXPECT_NEAR(k(pt({0.0}), pt({r})), oracle::matern({0.0}, {r}, nu, 0.25), 1e-14) << nu << " " << r;
    }
  }
}

TEST(Kernels, MaternRejectsOtherNu) {
  EXPECT_THROW(KernelSpec::matern(2.0, 0.1), ConfigError);
}

TEST(Kernels, RejectsNonPositiveHyperparameters) {
  EXPECT_THROW(KernelSpec::squared_exponential(0.0), ConfigError);
  EXPECT_THROW(KernelSpec::linear(-1.0), ConfigError);
}

TEST(Kernels, DimensionMismatchIsInputError) {
  const auto k = KernelSpec::squared_exponential(1.0);
  EXPECT_THROW(static_cast<void>(k(pt({0.0}), pt({0.0, 1.0}))), InputError);
}

TEST(Kernels, SymmetricAndBounded) {
  const auto k = KernelSpec::matern(1.5, 0.2);
  const auto grid = DomainGrid::uniform(std::vector<double>{0, 0}, std::vector<double>{1, 1}, 5);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double a = k(grid.point(i), grid.point(j));
      EXPECT_EQ(a, k(grid.point(j), grid.point(i)));
      EXPECT_LE(a, 1.0);
    }
  }
}

TEST(Kernels, GramMatrixIsPositiveDefinite) {
  const auto grid = DomainGrid::uniform(std::vector<double>{0}, std::vector<double>{1}, 20);
  Eigen::MatrixXd K = gram_matrix(KernelSpec::squared_exponential(0.2), grid.points());
  K.diagonal().array() += kGramJitter;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(Kernels, UniformGridLayout) {
  const auto g = DomainGrid::uniform(std::vector<double>{0, -1}, std::vector<double>{1, 1}, 3);
  ASSERT_EQ(g.size(), 9u);
  ASSERT_EQ(g.dim(), 2u);
  // Last axis varies fastest.
  EXPECT_DOUBLE_EQ(g.point(0)(0), 0.0);
  EXPECT_DOUBLE_EQ(g.point(0)(1), -1.0);
  EXPECT_DOUBLE_EQ(g.point(1)(1), 0.0);
  EXPECT_DOUBLE_EQ(g.point(3)(0), 0.5);
  EXPECT_DOUBLE_EQ(g.point(8)(1), 1.0);
}

TEST(Kernels, GridRejectsDuplicatesAndNonFinite) {
  Eigen::MatrixXd dup(1, 2);
  dup << 0.5, 0.5;
  EXPECT_THROW(DomainGrid{dup}, InputError);
  Eigen::MatrixXd nan(1, 1);
  nan << std::nan("");
  EXPECT_THROW(DomainGrid{nan}, InputError);
  EXPECT_THROW(DomainGrid{Eigen::MatrixXd(1, 0)}, InputError);
}

TEST(Kernels, BallSelectsByDistance) {
  const auto g = DomainGrid::uniform(std::vector<double>{0}, std::vector<double>{1}, 11);
  const auto b = g.ball(g.point(5), 0.2 + 1e-12);
  EXPECT_EQ(b, (std::vector<std::size_t>{3, 4, 5, 6, 7}));
}

TEST(Kernels, GridKernelChecksNormalization) {
  const auto g = DomainGrid::uniform(std::vector<double>{0}, std::vector<double>{2}, 5);
  EXPECT_THROW(GridKernel(g, KernelSpec::linear(1.0)), ConfigError);
  EXPECT_NO_THROW(GridKernel(g, KernelSpec::linear(0.25)));
}

TEST(Kernels, GridKernelColumnMatchesGram) {
  const auto gk = make_grid_kernel(DomainGrid::uniform(std::vector<double>{0}, std::vector<double>{1}, 7),
                                   KernelSpec::squared_exponential(0.3));
  const Eigen::VectorXd c = gk->column(gk->grid().point(2));
  for (Eigen::Index i = 0; i < c.size(); ++i) EXPECT_DOUBLE_EQ(c(i), gk->gram()(i, 2));
}

}  // namespace
}  // namespace ctgp
