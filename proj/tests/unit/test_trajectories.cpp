#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sivsim/dynamics.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/trajectories.hpp"

using namespace sivsim;

namespace {

const HilbertSpace kQubit({2});

LindbladModel decay_model(double gamma, double omega = 0.0) {
  return LindbladModel((0.5 * omega) * ops::sigma_x(), {{ops::transition(2, 0, 1), gamma, "S"}});
}

}  // namespace

TEST(Trajectories, GroundStateNeverClicks) {
  const auto recs = run_trajectories(decay_model(1.0), DensityState::basis(kQubit, 0), 50.0, 100, 3);
  ASSERT_EQ(recs.size(), 100u);
  for (const auto& r : recs) {
    EXPECT_TRUE(r.clicks.empty());
    EXPECT_DOUBLE_EQ(r.duration_ns, 50.0);
  }
}

TEST(Trajectories, FirstClickTimesAreExponential) {
  const double gamma = 0.8;
  const int n = 10000;
  const auto recs = run_trajectories(decay_model(gamma), DensityState::basis(kQubit, 1), 40.0 / gamma, n, 17);
  std::vector<double> t;
  for (const auto& r : recs) {
    ASSERT_EQ(r.clicks.size(), 1u);
    t.push_back(r.clicks[0].time_ns);
  }
  std::sort(t.begin(), t.end());
  // Kolmogorov-Smirnov statistic against 1 - exp(-gamma t).
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-gamma * t[static_cast<std::size_t>(i)]);
    d = std::max({d, std::abs(cdf - double(i) / n), std::abs(cdf - double(i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(double(n)));  // 1% critical value
}

TEST(Trajectories, IndependentOfWorkerCount) {
  const LindbladModel m = decay_model(1.0, 2.0);
  TrajectoryOptions one, three;
  three.workers = 3;
  three.batch_size = 7;
  const auto a = run_trajectories(m, DensityState::basis(kQubit, 0), 20.0, 50, 99, one);
  const auto b = run_trajectories(m, DensityState::basis(kQubit, 0), 20.0, 50, 99, three);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trajectory_id, b[i].trajectory_id);
    ASSERT_EQ(a[i].clicks.size(), b[i].clicks.size());
    for (std::size_t k = 0; k < a[i].clicks.size(); ++k) EXPECT_EQ(a[i].clicks[k].time_ns, b[i].clicks[k].time_ns);
  }
  const auto c = run_trajectories(m, DensityState::basis(kQubit, 0), 20.0, 50, 100, one);
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i) differs = a[i].clicks.size() != c[i].clicks.size();
  EXPECT_TRUE(differs);
}

TEST(Trajectories, EnsembleAverageMatchesMasterEquation) {
  const LindbladModel m = decay_model(0.7, 2.5);
  const DensityState rho0 = DensityState::basis(kQubit, 0);
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
  const std::vector<Operator> obs{ops::projector(2, 1), ops::sigma_y()};
  TrajectoryEngine engine(m);
  const auto samples = engine.sample(rho0, t, obs, 4000, 5);
  const auto exact = evolve(m, rho0, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double e = expectation(exact[i], obs[k]).real();
      const double se = std::max(samples.std_error[k][i], 1e-3);
      EXPECT_LT(std::abs(samples.mean[k][i] - e), 5.0 * se) << "t=" << t[i] << " obs=" << k;
    }
  }
}

TEST(Trajectories, ClickRateMatchesSteadyFlux) {
  const LindbladModel m = decay_model(1.0, 1.5);
  const double duration = 200.0;
  const int n = 200;
  const auto recs = run_trajectories(m, steady_state(m), duration, n, 8);
  double clicks = 0;
  for (const auto& r : recs) clicks += double(r.clicks.size());
  const double expected = flux(steady_state(m), {m.collapse("S")}) * duration * n;
  EXPECT_NEAR(clicks, expected, 5.0 * std::sqrt(expected));
}

TEST(Trajectories, NoJumpStateDecaysExcitedAmplitude) {
  const double gamma = 1.2;
  TrajectoryEngine engine(decay_model(gamma));
  Vector psi(2);
  psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const double t = 1.5;
  const Vector out = engine.no_jump_state(psi, t);
  const double r = std::exp(-0.5 * gamma * t);
  EXPECT_NEAR(std::abs(out(1)) / std::abs(out(0)), r, 1e-10);
  EXPECT_NEAR(out.norm(), 1.0, 1e-12);
}

TEST(Trajectories, RejectsBadArguments) {
  const LindbladModel m = decay_model(1.0);
  EXPECT_THROW(run_trajectories(m, DensityState::basis(kQubit, 0), 0.0, 1, 1), ParameterError);
  EXPECT_THROW(run_trajectories(m, DensityState::basis(kQubit, 0), 1.0, 0, 1), ParameterError);
  TrajectoryOptions o;
  o.record_channels = {"missing"};
  EXPECT_THROW(TrajectoryEngine(m, o), ParameterError);
}
