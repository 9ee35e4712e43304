#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/optimize.hpp"
#include "phaseprobe/population.hpp"

namespace pp = phaseprobe;

namespace {

pp::Vector unit(pp::Vector v) {
  pp::scale(1.0 / pp::norm(v), v);
  return v;
}

pp::Objective squared_distance_to(pp::Vector a) {
  return [a = std::move(a)](pp::ConstSpan x, pp::MutSpan grad) {
    double value = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - a[i];
      value += r * r;
      grad[i] = 2.0 * r;
    }
    return value;
  };
}

}  // namespace

TEST(AdamConfig, PresetsMatchCaptionSchedules) {
  const pp::AdamConfig f2 = pp::AdamConfig::fig2();
  ASSERT_EQ(f2.schedule.size(), 3u);
  EXPECT_EQ(f2.total_steps(), 1000u);
  EXPECT_EQ(f2.schedule[1].learning_rate, 5e-4);
  const pp::AdamConfig f3 = pp::AdamConfig::fig3();
  EXPECT_EQ(f3.total_steps(), 3000u);
  EXPECT_EQ(f3.schedule[0].learning_rate, 1e-2);
  EXPECT_EQ(f3.epsilon, 1e-8);
}

TEST(AdamConfig, ValidateRejectsBadHyperparameters) {
  pp::AdamConfig cfg = pp::AdamConfig::fig3();
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), pp::ParameterError);
  cfg = pp::AdamConfig::fig3();
  cfg.beta2 = -0.1;
  EXPECT_THROW(cfg.validate(), pp::ParameterError);
  cfg = pp::AdamConfig::fig3();
  cfg.schedule[0].learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), pp::ParameterError);
}

TEST(Projections, UnitSphereArithmetic) {
  const pp::Vector p = pp::project_unit_sphere(pp::Vector{3.0, 4.0});
  EXPECT_DOUBLE_EQ(p[0], 0.6);
  EXPECT_DOUBLE_EQ(p[1], 0.8);
  EXPECT_THROW(pp::project_unit_sphere(pp::Vector{0.0, 0.0}), pp::DegenerateError);
}

TEST(Projections, BallKeepsInteriorPoints) {
  const pp::Vector c{1.0, -1.0, 2.0};
  const pp::Vector w{1.5, -1.0, 2.0};
  EXPECT_EQ(pp::project_ball(w, c, 1.0), w);
  const pp::Vector far = pp::project_ball(pp::Vector{5.0, -1.0, 2.0}, c, 1.0);
  EXPECT_DOUBLE_EQ(far[0], 2.0);
  EXPECT_THROW(pp::project_sphere(c, c, 1.0), pp::DegenerateError);
}

TEST(Projections, IdempotentOnRandomInputs) {
  pp::Rng rng(1);
  const pp::Vector c = oracle::gaussian_vector(6, rng);
  const std::vector<pp::Projection> projections = {
      pp::Projection::unit_sphere(), pp::Projection::ball_around(c, 0.3), pp::Projection::ball_around(c, 0.3, 0.1),
      pp::Projection::sphere_around(c, 0.7),
      pp::Projection::product(pp::Projection::unit_sphere(), 6, pp::Projection::ball_around(c, 0.2))};
  for (const auto& proj : projections) {
    for (int k = 0; k < 1000; ++k) {
      const std::size_t width = proj.kind() == pp::Projection::Kind::product ? 12 : 6;
      const pp::Vector v = oracle::gaussian_vector(width, rng, 2.0);
      const pp::Vector once = proj(v);
      const pp::Vector twice = proj(once);
      ASSERT_LE(pp::distance(once, twice), 1e-12);
      ASSERT_LE(proj.violation(once), 1e-12);
    }
  }
}

TEST(Projections, InnerRadiusPushesPointsOut) {
  const pp::Vector c{0.0, 0.0};
  const pp::Projection p = pp::Projection::ball_around(c, 1.0, 0.25);
  const pp::Vector out = p(pp::Vector{0.1, 0.0});
  EXPECT_DOUBLE_EQ(out[0], 0.25);
  EXPECT_THROW(p(c), pp::DegenerateError);
  EXPECT_THROW(pp::Projection::ball_around(c, 1.0, 2.0), pp::ParameterError);
}

TEST(ProjectedAdam, ConvergesToTargetOnSphere) {
  pp::Rng rng(2);
  const pp::Vector a = unit(oracle::gaussian_vector(5, rng));
  const pp::Vector init = unit(oracle::gaussian_vector(5, rng));
  pp::AdamConfig cfg;
  cfg.schedule = {{2000, 0.01}};
  const pp::Trace tr = pp::projected_adam(squared_distance_to(a), init, cfg, pp::Projection::unit_sphere());
  EXPECT_EQ(tr.values.size(), tr.steps + 1);
  EXPECT_EQ(tr.steps, 2000u);
  EXPECT_LE(tr.values.back(), 1e-6);
  EXPECT_LE(pp::distance(tr.final_iterate, a), 1e-3);
}

TEST(ProjectedAdam, EveryIterateIsFeasible) {
  pp::Rng rng(3);
  const pp::Vector center = oracle::gaussian_vector(4, rng);
  const pp::Projection proj = pp::Projection::ball_around(center, 0.1);
  const pp::Vector a = oracle::gaussian_vector(4, rng, 3.0);
  const pp::Objective f = squared_distance_to(a);
  double worst = 0.0;
  const pp::Objective checked = [&](pp::ConstSpan x, pp::MutSpan g) {
    worst = std::max(worst, proj.violation(x));
    return f(x, g);
  };
  pp::AdamConfig cfg;
  cfg.schedule = {{300, 0.05}};
  pp::projected_adam(checked, oracle::gaussian_vector(4, rng), cfg, proj);
  EXPECT_LE(worst, 1e-10);
}

TEST(ProjectedAdam, ZeroGradientLeavesIterateUnchanged) {
  const pp::Objective flat = [](pp::ConstSpan, pp::MutSpan) { return 1.0; };
  const pp::Vector init{0.6, 0.8};
  pp::AdamConfig cfg;
  cfg.schedule = {{50, 0.1}};
  const pp::Trace tr = pp::projected_adam(flat, init, cfg, pp::Projection::unit_sphere());
  EXPECT_EQ(tr.final_iterate, init);
  EXPECT_TRUE(tr.monotone_nonincreasing());
}

TEST(ProjectedAdam, BitIdenticalReruns) {
  pp::Rng rng(4);
  const pp::Vector a = oracle::gaussian_vector(8, rng);
  const pp::Vector init = unit(oracle::gaussian_vector(8, rng));
  const pp::AdamConfig cfg = pp::AdamConfig::fig2();
  const pp::Trace t1 = pp::projected_adam(squared_distance_to(a), init, cfg, pp::Projection::unit_sphere());
  const pp::Trace t2 = pp::projected_adam(squared_distance_to(a), init, cfg, pp::Projection::unit_sphere());
  EXPECT_EQ(t1.values, t2.values);
  EXPECT_EQ(t1.final_iterate, t2.final_iterate);
}

TEST(ProjectedAdam, NonFiniteObjectiveReportsStep) {
  int calls = 0;
  const pp::Objective bad = [&](pp::ConstSpan, pp::MutSpan g) {
    g[0] = 1.0;
    return ++calls > 5 ? std::nan("") : 1.0;
  };
  pp::AdamConfig cfg;
  cfg.schedule = {{20, 0.1}};
  try {
    pp::projected_adam(bad, pp::Vector{1.0, 0.0}, cfg, pp::Projection::unit_sphere());
    FAIL() << "expected a numerical error";
  } catch (const pp::NumericalError& e) {
    EXPECT_EQ(e.step(), 5u);
    EXPECT_NE(std::string(e.what()).find("step 5"), std::string::npos);
  }
}

TEST(GradientDescent, StartingAtGroundTruthStopsImmediately) {
  const pp::Instance inst = pp::generate_instance(8, 30, 5);
  const pp::Trace tr = pp::gradient_descent(inst, pp::Vector(inst.w_star().begin(), inst.w_star().end()), 0.1, 100,
                                            0.01);
  EXPECT_EQ(tr.steps, 0u);
  EXPECT_EQ(tr.distances.size(), 1u);
  EXPECT_EQ(tr.distances[0], 0.0);
}

TEST(GradientDescent, ContractsFromNearbyStart) {
  const pp::Instance inst = pp::generate_instance(32, 32 * 50, 6);
  pp::Rng rng(60);
  pp::Vector w0 = unit(oracle::gaussian_vector(32, rng));
  pp::scale(0.3, w0);
  pp::axpy(1.0, inst.w_star(), w0);
  const pp::Trace tr = pp::gradient_descent(inst, w0, 0.1, 500, 0.01);
  EXPECT_LE(tr.distances.back(), 0.01);
  EXPECT_LT(tr.steps, 500u);
  EXPECT_EQ(tr.values.size(), tr.steps + 1);
  EXPECT_EQ(tr.distances.size(), tr.steps + 1);
}

TEST(GradientDescent, LargeStepDivergesOrOscillates) {
  const pp::Instance inst = pp::generate_instance(32, 64, 7);
  pp::Rng rng(70);
  pp::Vector w0 = unit(oracle::gaussian_vector(32, rng));
  pp::scale(0.3, w0);
  pp::axpy(1.0, inst.w_star(), w0);
  bool flagged = false;
  try {
    const pp::Trace tr = pp::gradient_descent(inst, w0, 10.0, 200, 1e-12);
    flagged = !tr.monotone_nonincreasing();
  } catch (const pp::DivergenceError& e) {
    flagged = true;
    EXPECT_GE(e.step(), 1u);
  }
  EXPECT_TRUE(flagged);
}

TEST(GradientDescent, RejectsNonPositiveStep) {
  const pp::Instance inst = pp::generate_instance(4, 8, 8);
  EXPECT_THROW(pp::gradient_descent(inst, pp::Vector(4, 0.5), 0.0, 10, 0.1), pp::ParameterError);
}

TEST(GradientFlow, ConstantAtGroundTruth) {
  const pp::Vector ws = pp::basis_vector(5, 0);
  const pp::Trace tr = pp::gradient_flow(pp::population_field(ws), ws, 1e-3, 0.5);
  EXPECT_EQ(tr.steps, 500u);
  for (double v : tr.values) EXPECT_EQ(v, 0.0);
}

TEST(GradientFlow, PopulationDecayRateNearGroundTruth) {
  const std::size_t d = 6;
  const pp::Vector ws = pp::basis_vector(d, 0);
  pp::Rng rng(9);
  for (int k = 0; k < 5; ++k) {
    pp::Vector w0 = unit(oracle::gaussian_vector(d, rng));
    pp::scale(0.1, w0);
    pp::axpy(1.0, ws, w0);
    const pp::Trace tr = pp::gradient_flow(pp::population_field(ws), w0, 1e-3, 1.0);
    // least-squares slope of log |w_t - w*|^2 against t
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double m = static_cast<double>(tr.values.size());
    for (std::size_t j = 0; j < tr.values.size(); ++j) {
      const double t = j * 1e-3;
      const double y = std::log(tr.values[j]);
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
    }
    const double slope = (m * sty - st * sy) / (m * stt - st * st);
    EXPECT_LE(slope, -2.0 * 1.95) << "start " << k;
  }
}

TEST(GradientFlow, ContractionMatchesOnepointRatio) {
  const std::size_t d = 5;
  const pp::Vector ws = pp::basis_vector(d, 0);
  pp::Rng rng(10);
  pp::Vector w0 = unit(oracle::gaussian_vector(d, rng));
  pp::scale(0.4, w0);
  pp::axpy(1.0, ws, w0);
  const double dt = 1e-3;
  const pp::GradientField field = pp::population_field(ws);
  // Re-run step by step so the iterate at each step is available.
  pp::Vector w = w0;
  std::vector<pp::Vector> path{w};
  for (int k = 0; k < 400; ++k) {
    w = pp::gradient_flow(field, w, dt, dt).final_iterate;
    path.push_back(w);
  }
  const pp::Trace tr = pp::gradient_flow(field, w0, dt, 400 * dt);
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    ASSERT_NEAR(tr.values[k], pp::dot(pp::subtract(path[k], ws), pp::subtract(path[k], ws)), 1e-14);
    const double c = pp::pop_onepoint_ratio(path[k], ws);
    const double rate = (tr.values[k + 1] - tr.values[k - 1]) / (2.0 * dt);
    EXPECT_LE(rate, -2.0 * c * tr.values[k] + 1e-5 * tr.values[k]) << "step " << k;
  }
}

TEST(GradientFlow, EulerConvergesToRk4AtFirstOrder) {
  const pp::Instance inst = pp::generate_instance(6, 200, 11);
  pp::Rng rng(110);
  pp::Vector w0 = unit(oracle::gaussian_vector(6, rng));
  pp::scale(0.3, w0);
  pp::axpy(1.0, inst.w_star(), w0);
  const pp::GradientField field = pp::empirical_field(inst);
  const pp::Vector ref = pp::gradient_flow(field, w0, 1e-3, 1.0).final_iterate;
  const double e1 = pp::distance(pp::gradient_flow(field, w0, 1e-2, 1.0, pp::FlowMethod::euler).final_iterate, ref);
  const double e2 = pp::distance(pp::gradient_flow(field, w0, 5e-3, 1.0, pp::FlowMethod::euler).final_iterate, ref);
  EXPECT_LE(e1, 1e-2);
  EXPECT_GT(e1 / e2, 1.6);
  EXPECT_LT(e1 / e2, 2.4);
}

TEST(GradientFlow, RejectsBadTimeGrid) {
  const pp::Vector ws = pp::basis_vector(3, 0);
  EXPECT_THROW(pp::gradient_flow(pp::population_field(ws), ws, 0.0, 1.0), pp::ParameterError);
  EXPECT_THROW(pp::gradient_flow(pp::population_field(ws), ws, 0.1, 0.05), pp::ParameterError);
}
