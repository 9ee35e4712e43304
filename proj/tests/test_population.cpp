#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "oracles.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/population.hpp"

namespace pp = phaseprobe;

namespace {

pp::Vector saddle_point(std::size_t d) {
  pp::Vector w(d, 0.0);
  w[1] = 1.0 / std::sqrt(3.0);
  return w;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

template <typename Term>
MeanSe monte_carlo(std::size_t n, Term&& term) {
  double s = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += term(i);
  const double mean = s / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = term(i) - mean;
    sq += e * e;
  }
  return {mean, std::sqrt(sq / (n - 1) / n)};
}

}  // namespace

TEST(PopLoss, ClosedFormValues) {
  const pp::Vector ws = pp::basis_vector(6, 0);
  EXPECT_EQ(pp::pop_loss(ws, ws), 0.0);
  EXPECT_DOUBLE_EQ(pp::pop_loss(pp::Vector(6, 0.0), ws), 0.75);
  EXPECT_NEAR(pp::pop_loss(saddle_point(6), ws), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(pp::pop_loss(pp::scaled(-1.0, ws), ws), 0.0);
}

TEST(PopGradient, VanishesOnCriticalSet) {
  const pp::Vector ws = pp::basis_vector(6, 0);
  EXPECT_LE(pp::norm(pp::pop_gradient(ws, ws)), 1e-15);
  EXPECT_LE(pp::norm(pp::pop_gradient(pp::Vector(6, 0.0), ws)), 0.0);
  EXPECT_LE(pp::norm(pp::pop_gradient(saddle_point(6), ws)), 1e-15);
}

TEST(PopGradient, HalfGroundTruthHasNormNineEighths) {
  const pp::Vector ws = pp::basis_vector(4, 0);
  EXPECT_NEAR(pp::norm(pp::pop_gradient(pp::scaled(0.5, ws), ws)), 9.0 / 8.0, 1e-15);
}

TEST(PopGradient, MatchesFiniteDifferencesOfPopLoss) {
  pp::Rng rng(5);
  const pp::Vector ws = pp::basis_vector(8, 0);
  for (int k = 0; k < 20; ++k) {
    const pp::Vector w = oracle::gaussian_vector(8, rng, 0.6);
    const pp::Vector fd = oracle::central_gradient([&](pp::ConstSpan x) { return pp::pop_loss(x, ws); }, w, 1e-5);
    EXPECT_LE(oracle::rel_error(pp::pop_gradient(w, ws), fd), 1e-8);
  }
}

TEST(PopHessian, DenseAgreesWithQuadraticForm) {
  pp::Rng rng(6);
  pp::Vector ws = oracle::gaussian_vector(7, rng);
  pp::scale(1.0 / pp::norm(ws), ws);
  for (int k = 0; k < 20; ++k) {
    const pp::Vector w = oracle::gaussian_vector(7, rng);
    const pp::Vector u = oracle::gaussian_vector(7, rng);
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), 7);
    const double dense = uv.dot(pp::pop_hessian_dense(w, ws) * uv);
    EXPECT_LE(std::abs(dense - pp::pop_hessian_quadratic(w, u, ws)), 1e-12 * std::max(1.0, std::abs(dense)));
  }
}

TEST(PopHessian, SpectrumAtGroundTruth) {
  const pp::Vector ws = pp::basis_vector(9, 0);
  const Eigen::VectorXd ev = eigenvalues(pp::pop_hessian_dense(ws, ws));
  EXPECT_NEAR(ev.minCoeff(), 2.0, 1e-9);
  EXPECT_NEAR(ev.maxCoeff(), 6.0, 1e-9);
  const Eigen::VectorXd mirrored = eigenvalues(pp::pop_hessian_dense(pp::scaled(-1.0, ws), ws));
  EXPECT_NEAR(mirrored.minCoeff(), 2.0, 1e-9);
}

TEST(PopHessian, SpectrumAtSaddle) {
  const std::size_t d = 9;
  const pp::Vector ws = pp::basis_vector(d, 0);
  const Eigen::VectorXd ev = eigenvalues(pp::pop_hessian_dense(saddle_point(d), ws));
  EXPECT_NEAR(ev(0), -2.0, 1e-9);
  for (std::size_t k = 1; k + 1 < d; ++k) EXPECT_NEAR(ev(static_cast<Eigen::Index>(k)), 0.0, 1e-9);
  EXPECT_NEAR(ev(static_cast<Eigen::Index>(d - 1)), 2.0, 1e-9);
}

TEST(PopHessian, FlatDirectionsAtSaddle) {
  const pp::Vector ws = pp::basis_vector(5, 0);
  EXPECT_NEAR(pp::pop_hessian_quadratic(saddle_point(5), pp::basis_vector(5, 3), ws), 0.0, 1e-15);
}

TEST(PopHessian, DenseRefusesHugeDimension) {
  const pp::Vector big(4097, 0.0);
  EXPECT_THROW(pp::pop_hessian_dense(big, pp::basis_vector(4097, 0)), pp::CapacityError);
}

TEST(PopOnepointRatio, KnownValues) {
  const pp::Vector ws = pp::basis_vector(3, 0);
  EXPECT_NEAR(pp::pop_onepoint_ratio(pp::scaled(2.0, ws), ws), 18.0, 1e-12);
  EXPECT_EQ(pp::pop_onepoint_ratio(pp::scaled(-1.0, ws), ws), 0.0);
  EXPECT_THROW(pp::pop_onepoint_ratio(ws, ws), pp::DegenerateError);
}

TEST(ClassifyCriticalPoint, AllCriticalFamilies) {
  const pp::Vector ws = pp::basis_vector(4, 0);
  EXPECT_EQ(pp::classify_critical_point(pp::Vector(4, 0.0), ws), pp::CriticalPoint::global_max);
  EXPECT_EQ(pp::classify_critical_point(ws, ws), pp::CriticalPoint::global_min);
  EXPECT_EQ(pp::classify_critical_point(pp::scaled(-1.0, ws), ws), pp::CriticalPoint::global_min);
  EXPECT_EQ(pp::classify_critical_point(saddle_point(4), ws), pp::CriticalPoint::strict_saddle);
  EXPECT_EQ(pp::classify_critical_point(pp::scaled(0.5, ws), ws), pp::CriticalPoint::not_critical);
  EXPECT_EQ(pp::to_string(pp::CriticalPoint::strict_saddle), "strict_saddle");
  EXPECT_THROW(pp::classify_critical_point(ws, ws, 0.0), pp::ParameterError);
}

TEST(ClassifyCriticalPoint, SaddlesHaveNegativeCurvatureAndSmallGradient) {
  pp::Rng rng(7);
  const std::size_t d = 6;
  const pp::Vector ws = pp::basis_vector(d, 0);
  for (int k = 0; k < 50; ++k) {
    pp::Vector w = oracle::gaussian_vector(d, rng);
    w[0] = 0.0;
    pp::scale(1.0 / (std::sqrt(3.0) * pp::norm(w)), w);
    ASSERT_EQ(pp::classify_critical_point(w, ws), pp::CriticalPoint::strict_saddle);
    EXPECT_LE(eigenvalues(pp::pop_hessian_dense(w, ws)).minCoeff(), -2.0 + 1e-9);
    EXPECT_LE(pp::norm(pp::pop_gradient(w, ws)), 1e-12);
  }
}

class PopulationMonteCarlo : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { inst_ = new pp::Instance(pp::generate_instance(10, 1000000, 2024)); }
  static void TearDownTestSuite() {
    delete inst_;
    inst_ = nullptr;
  }
  static pp::Instance* inst_;
};

pp::Instance* PopulationMonteCarlo::inst_ = nullptr;

TEST_F(PopulationMonteCarlo, LossMatchesAtMaxSaddleAndGenericPoint) {
  const pp::Instance& inst = *inst_;
  pp::Rng rng(8);
  pp::Vector generic = oracle::gaussian_vector(10, rng, 0.4);
  for (const pp::Vector& w : {pp::Vector(10, 0.0), saddle_point(10), generic}) {
    const MeanSe mc = monte_carlo(inst.size(), [&](std::size_t i) {
      const double b = pp::dot(w, inst.sample(i));
      const double r = b * b - inst.y_sq()[i];
      return 0.25 * r * r;
    });
    EXPECT_NEAR(mc.mean, pp::pop_loss(w, inst.w_star()), 3.0 * mc.se);
    EXPECT_NEAR(pp::loss(inst, w), mc.mean, 1e-9 * std::max(1.0, mc.mean));
  }
}

TEST_F(PopulationMonteCarlo, GradientCoordinatesMatch) {
  const pp::Instance& inst = *inst_;
  pp::Rng rng(9);
  const pp::Vector w = oracle::gaussian_vector(10, rng, 0.4);
  const pp::Vector pop = pp::pop_gradient(w, inst.w_star());
  const pp::Vector emp = pp::gradient(inst, w);
  for (std::size_t k : {0u, 3u}) {
    const MeanSe mc = monte_carlo(inst.size(), [&](std::size_t i) {
      const pp::ConstSpan x = inst.sample(i);
      const double b = pp::dot(w, x);
      return (b * b - inst.y_sq()[i]) * b * x[k];
    });
    EXPECT_NEAR(mc.mean, pop[k], 3.0 * mc.se) << "coordinate " << k;
    EXPECT_NEAR(emp[k], mc.mean, 1e-9 * std::max(1.0, std::abs(mc.mean)));
  }
}

TEST_F(PopulationMonteCarlo, HessianQuadraticMatches) {
  const pp::Instance& inst = *inst_;
  pp::Rng rng(10);
  const pp::Vector w = oracle::gaussian_vector(10, rng, 0.4);
  pp::Vector u = oracle::gaussian_vector(10, rng);
  pp::scale(1.0 / pp::norm(u), u);
  const MeanSe mc = monte_carlo(inst.size(), [&](std::size_t i) {
    const pp::ConstSpan x = inst.sample(i);
    const double b = pp::dot(w, x);
    const double ux = pp::dot(u, x);
    return (3.0 * b * b - inst.y_sq()[i]) * ux * ux;
  });
  EXPECT_NEAR(mc.mean, pp::pop_hessian_quadratic(w, u, inst.w_star()), 3.0 * mc.se);
  EXPECT_NEAR(pp::hessian_quadratic(inst, w, u), mc.mean, 1e-9 * std::max(1.0, std::abs(mc.mean)));
}
