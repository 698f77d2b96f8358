//
// Copyright 2026 The Datamarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "datamarket/dp_training.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

constexpr LossKind kAllKinds[] = {LossKind::kLeastSquares, LossKind::kLogistic,
                                  LossKind::kSmoothedHinge};

LossSpec Spec(LossKind kind) {
  LossSpec s;
  s.kind = kind;
  // Smoothness bounds for features inside the unit ball.
  s.smoothness = kind == LossKind::kLeastSquares ? 2.0
                 : kind == LossKind::kLogistic   ? 0.25
                                                 : 1.0;
  s.lipschitz = kind == LossKind::kLeastSquares ? 2.0 * (s.radius + 1.0) : 1.0;
  return s;
}

Dataset UnitBallData(int n, int d, uint64_t seed, bool regression = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset data;
  for (int i = 0; i < n; ++i) {
    LabeledSample s;
    double norm = 0.0;
    for (int k = 0; k < d; ++k) {
      s.features.push_back(g(rng));
      norm += s.features.back() * s.features.back();
    }
    norm = std::sqrt(norm) * 1.25;
    for (double& x : s.features) x /= std::max(norm, 1.0);
    s.label = regression ? std::tanh(g(rng)) : (s.features[0] + 0.3 * g(rng) > 0 ? 1.0 : -1.0);
    data.push_back(s);
  }
  return data;
}

TEST(LossTest, ClosedFormValues) {
  const LabeledSample z{{0.3, -0.7}, 0.0};
  const std::vector<double> w(2, 0.0);
  const LossValue ls = LossAndGradient(Spec(LossKind::kLeastSquares), w, z);
  EXPECT_EQ(ls.loss, 0.0);
  EXPECT_EQ(ls.gradient, std::vector<double>(2, 0.0));
  for (double y : {-1.0, 1.0}) {
    const LossValue lg = LossAndGradient(Spec(LossKind::kLogistic), w, {{0.3, -0.7}, y});
    EXPECT_NEAR(lg.loss, std::log(2.0), 1e-15);
  }
  // Smoothed hinge: margin 0 sits on the boundary of the linear piece.
  const LossValue sh = LossAndGradient(Spec(LossKind::kSmoothedHinge), w, {{1.0, 0.0}, 1.0});
  EXPECT_DOUBLE_EQ(sh.loss, 0.5);
  const std::vector<double> far = {2.0, 0.0};
  EXPECT_EQ(LossAndGradient(Spec(LossKind::kSmoothedHinge), far, {{1.0, 0.0}, 1.0}).loss, 0.0);
}

TEST(LossTest, DimensionMismatch) {
  const std::vector<double> w(3, 0.0);
  try {
    LossAndGradient(LossSpec{}, w, {{1.0, 2.0}, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(LossTest, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constexpr double kH = 1e-6;
  for (LossKind kind : kAllKinds) {
    const LossSpec spec = Spec(kind);
    for (int probe = 0; probe < 100; ++probe) {
      std::vector<double> w(4);
      LabeledSample z;
      for (double& x : w) x = u(rng);
      for (int k = 0; k < 4; ++k) z.features.push_back(u(rng));
      z.label = u(rng) > 0 ? 1.0 : -1.0;
      const LossValue at = LossAndGradient(spec, w, z);
      double err = 0.0, norm = 0.0;
      for (size_t k = 0; k < w.size(); ++k) {
        std::vector<double> hi = w, lo = w;
        hi[k] += kH;
        lo[k] -= kH;
        const double fd = (LossAndGradient(spec, hi, z).loss -
                           LossAndGradient(spec, lo, z).loss) / (2 * kH);
        err += (fd - at.gradient[k]) * (fd - at.gradient[k]);
        norm += at.gradient[k] * at.gradient[k];
      }
      EXPECT_LE(std::sqrt(err), 1e-5 * std::max(std::sqrt(norm), 1e-3))
          << ToString(kind) << " probe " << probe;
    }
  }
}

TEST(LossTest, NamesRoundTrip) {
  for (LossKind kind : kAllKinds) EXPECT_EQ(ParseLossKind(ToString(kind)), kind);
  EXPECT_THROW(ParseLossKind("hinge"), Error);
}

TEST(LossTest, SpecValidation) {
  LossSpec s;
  s.lambda = 0.0;
  EXPECT_THROW(ValidateLossSpec(s), Error);
  s = LossSpec{};
  s.radius = -1;
  EXPECT_THROW(ValidateLossSpec(s), Error);
}

TEST(TrainErmTest, OneDimensionalQuadratic) {
  // (w - 1)^2 + 0.5 w^2 is minimised at w = 2/3.
  LossSpec spec = Spec(LossKind::kLeastSquares);
  spec.lambda = 0.5;
  const Dataset data = {{{1.0}, 1.0}};
  const std::vector<double> w = TrainErm(data, spec, 1e-14, 1);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NEAR(w[0], 2.0 / 3.0, 1e-6);
}

TEST(TrainErmTest, IdenticalLabelsArePredicted) {
  LossSpec spec = Spec(LossKind::kLogistic);
  spec.radius = 100.0;
  spec.lambda = 1e-3;
  Dataset data = UnitBallData(30, 3, 4);
  for (LabeledSample& s : data) {
    s.features.push_back(1.0);  // bias column
    s.label = 1.0;
  }
  const std::vector<double> w = TrainErm(data, spec, 1e-8, 2);
  EXPECT_DOUBLE_EQ(ClassificationAccuracy(w, data), 1.0);
}

TEST(TrainErmTest, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(21);
  for (LossKind kind : kAllKinds) {
    const LossSpec spec = Spec(kind);
    const Dataset data = UnitBallData(40, 3, 8, kind == LossKind::kLeastSquares);
    const std::vector<double> w = TrainErm(data, spec, 1e-10, 3);
    const double best = RegularizedObjective(spec, data, w);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int probe = 0; probe < 1000; ++probe) {
      std::vector<double> p(3);
      double norm = 0.0;
      for (double& x : p) x = g(rng), norm += x * x;
      const double r = spec.radius * std::cbrt(u(rng)) / std::sqrt(norm);
      for (double& x : p) x *= r;
      ASSERT_LE(best, RegularizedObjective(spec, data, p) + 1e-12);
    }
  }
}

TEST(TrainErmTest, StartPointDoesNotMatter) {
  for (LossKind kind : kAllKinds) {
    const LossSpec spec = Spec(kind);
    const Dataset data = UnitBallData(50, 4, 9, kind == LossKind::kLeastSquares);
    const double a = RegularizedObjective(spec, data, TrainErm(data, spec, 1e-8, 1));
    const double b = RegularizedObjective(spec, data, TrainErm(data, spec, 1e-8, 99));
    EXPECT_NEAR(a, b, 1e-4) << ToString(kind);
  }
}

TEST(TrainErmTest, StaysInsideTheBall) {
  LossSpec spec = Spec(LossKind::kLogistic);
  spec.radius = 0.5;
  spec.lambda = 1e-4;
  const Dataset data = UnitBallData(30, 2, 5);
  const std::vector<double> w = TrainErm(data, spec, 1e-9, 0);
  EXPECT_LE(std::hypot(w[0], w[1]), 0.5 + 1e-12);
}

TEST(TrainErmTest, GapCertificateHolds) {
  const LossSpec spec = Spec(LossKind::kSmoothedHinge);
  const Dataset data = UnitBallData(25, 3, 10);
  const std::vector<double> start(3, 1.0);
  const MinimizeResult r = MinimizeRegularized(spec, data, {}, start, 1e-9);
  EXPECT_LE(r.gap_bound, 1e-9);
  EXPECT_GT(r.iterations, 0);
  EXPECT_THROW(TrainErm({}, spec, 1e-6, 0), Error);
}

TEST(NoiseTest, ScalesFollowTheFormulas) {
  const NoiseScales s = ComputeNoiseScales(1.0, 1.0, 1.0, std::exp(-1.0), 0.5);
  EXPECT_NEAR(s.sigma1, 20.0, 1e-12);
  EXPECT_NEAR(s.sigma2, 20.0, 1e-12);
  const NoiseScales t = ComputeNoiseScales(2.0, 0.1, 0.5, 1e-6, 0.01);
  EXPECT_NEAR(t.sigma1, 20.0 * 4.0 * std::log(1e6) / 0.25, 1e-9);
  EXPECT_NEAR(t.sigma2, 40.0 * 0.01 * std::log(1e6) / (0.1 * 0.25), 1e-9);
  for (auto bad : {std::array<double, 3>{0.0, 0.5, 0.1}, {1.0, 1.0, 0.1}, {1.0, 0.5, 0.0}}) {
    try {
      ComputeNoiseScales(1.0, 1.0, bad[0], bad[1], bad[2]);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidPrivacyParams);
    }
  }
}

TEST(NoiseTest, EmpiricalStandardDeviation) {
  Rng rng(31);
  for (double sigma : {0.5, 20.0}) {
    const std::vector<double> v = SampleGaussian(100000, sigma, rng);
    double mean = 0.0, sq = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    for (double x : v) sq += (x - mean) * (x - mean);
    EXPECT_NEAR(std::sqrt(sq / (v.size() - 1)) / sigma, 1.0, 0.02);
  }
}

TEST(DpErmTest, DeterministicAndFeasible) {
  const LossSpec spec = Spec(LossKind::kLogistic);
  const Dataset data = UnitBallData(60, 3, 12);
  const DPModel a = TrainDpErm(data, spec, 1.0, 1e-6, 1e-3, 77);
  const DPModel b = TrainDpErm(data, spec, 1.0, 1e-6, 1e-3, 77);
  EXPECT_EQ(a.weights, b.weights);
  double norm = 0.0;
  for (double x : a.weights) norm += x * x;
  EXPECT_LE(std::sqrt(norm), spec.radius + 1e-12);
  EXPECT_LE(a.gap_bound, 1e-3);
  const DPModel c = TrainDpErm(data, spec, 1.0, 1e-6, 1e-3, 78);
  EXPECT_NE(a.weights, c.weights);
  EXPECT_THROW(TrainDpErm(data, spec, -1.0, 1e-6, 1e-3, 0), Error);
}

TEST(DpErmTest, LargeEpsilonApproachesNonPrivateModel) {
  LossSpec spec = Spec(LossKind::kLogistic);
  const Dataset data = UnitBallData(200, 3, 14);
  const std::vector<double> exact = TrainErm(data, spec, 1e-10, 0);
  const DPModel dp = TrainDpErm(data, spec, 1e4, 1e-6, 1e-10, 5);
  for (size_t k = 0; k < exact.size(); ++k) EXPECT_NEAR(dp.weights[k], exact[k], 1e-3);
}

TEST(ExcessLossTest, Examples) {
  EXPECT_NEAR(ExcessLossEstimate(10000, 1, 1.0, std::exp(-1.0)), 0.01, 1e-15);
  EXPECT_NEAR(ExcessLossEstimate(100, 100, 0.01, std::exp(-1.0)), 10.0, 1e-9);
  EXPECT_THROW(ExcessLossEstimate(0, 1, 1.0, 0.5), Error);
}

TEST(ExcessLossTest, NonIncreasingInEpsilonAndN) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double eps = 0.01 * std::pow(2.0, i);
      const int64_t n = 10 * (j + 1);
      const double here = ExcessLossEstimate(n, 5, eps, 1e-6);
      EXPECT_LE(ExcessLossEstimate(n, 5, eps * 2, 1e-6), here);
      EXPECT_LE(ExcessLossEstimate(n + 10, 5, eps, 1e-6), here);
    }
  }
}

TEST(AccuracyTest, SignRule) {
  const Dataset data = {{{1.0}, 1.0}, {{-1.0}, -1.0}, {{0.0}, 1.0}, {{2.0}, -1.0}};
  const std::vector<double> w = {1.0};
  EXPECT_DOUBLE_EQ(ClassificationAccuracy(w, data), 0.75);
  EXPECT_THROW(ClassificationAccuracy(w, {}), Error);
}

TEST(ConstantsTest, DeclaredBoundsHoldOnUnitBallData) {
  for (LossKind kind : {LossKind::kLogistic, LossKind::kSmoothedHinge}) {
    LossSpec spec = Spec(kind);
    const Dataset data = UnitBallData(50, 4, 15);
    const ConstantCheck c = CheckDeclaredConstants(spec, data, 500, 1);
    EXPECT_TRUE(c.ok) << ToString(kind);
    EXPECT_LE(c.max_gradient_norm, spec.lipschitz);
    spec.smoothness = 1e-3;
    EXPECT_FALSE(CheckDeclaredConstants(spec, data, 500, 1).ok);
  }
}

}  // namespace
}  // namespace datamarket
