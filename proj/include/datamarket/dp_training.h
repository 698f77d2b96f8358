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

#ifndef DATAMARKET_DP_TRAINING_H_
#define DATAMARKET_DP_TRAINING_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "datamarket/random.h"
#include "datamarket/types.h"

namespace datamarket {

enum class LossKind { kLeastSquares, kLogistic, kSmoothedHinge };

std::string_view ToString(LossKind kind);
LossKind ParseLossKind(std::string_view text);

// Per-sample convex loss plus the constants the privacy calibration relies
// on. The training objective is (1/n) sum l(w; z_i) + lambda ||w||^2 over
// the ball ||w|| <= radius.
//
//   least squares   l = (<w,x> - y)^2
//   logistic        l = log(1 + exp(-y <w,x>))
//   smoothed hinge  l = 0 for t >= 1, (1-t)^2/2 for 0 < t < 1,
//                   1/2 - t for t <= 0, with margin t = y <w,x>
struct LossSpec {
  LossKind kind = LossKind::kLogistic;
  double lambda = 0.01;
  double lipschitz = 1.0;
  double smoothness = 0.25;
  double radius = 10.0;
};

void ValidateLossSpec(const LossSpec& spec);

struct LossValue {
  double loss = 0.0;
  std::vector<double> gradient;
};

LossValue LossAndGradient(const LossSpec& spec, std::span<const double> weights,
                          const LabeledSample& sample);

// (1/n) sum l(w; z) + lambda ||w||^2 + (1/n) <linear_term, w>. An empty
// linear_term means no perturbation.
double RegularizedObjective(const LossSpec& spec, std::span<const LabeledSample> data,
                            std::span<const double> weights,
                            std::span<const double> linear_term = {});

struct MinimizeResult {
  std::vector<double> weights;
  // ||G||^2 / (2 lambda) with G the projected-gradient mapping; an upper
  // bound on the objective gap by strong convexity.
  double gap_bound = 0.0;
  int iterations = 0;
};

// Projected gradient descent with step 1/(beta + 2 lambda) from `start`,
// stopping once gap_bound <= tolerance. Throws kNonFinite if the iterates
// blow up, which only happens when `smoothness` understates the loss.
MinimizeResult MinimizeRegularized(const LossSpec& spec,
                                   std::span<const LabeledSample> data,
                                   std::span<const double> linear_term,
                                   std::span<const double> start,
                                   double tolerance);

// Non-private ERM. The start point is drawn uniformly from the feasible
// ball using `seed`; by strong convexity the answer does not depend on it
// beyond `tolerance`.
std::vector<double> TrainErm(std::span<const LabeledSample> data,
                             const LossSpec& spec, double tolerance,
                             uint64_t seed);

struct NoiseScales {
  double sigma1 = 0.0;  // objective perturbation
  double sigma2 = 0.0;  // output perturbation
};

// sigma1 = 20 L^2 log(1/delta) / eps^2
// sigma2 = 40 alpha log(1/delta) / (lambda eps^2)
NoiseScales ComputeNoiseScales(double lipschitz, double lambda, double epsilon,
                               double delta, double alpha);

// Draws a d-dimensional N(0, sigma^2 I) vector.
std::vector<double> SampleGaussian(size_t dim, double sigma, Rng& rng);

std::vector<double> ProjectToBall(std::vector<double> weights, double radius);

struct DPModel {
  std::vector<double> weights;
  ModelTier tier;
  std::vector<OwnerId> trained_on;
  double alpha = 0.0;
  uint64_t seed = 0;
  NoiseScales noise;
  double gap_bound = 0.0;
};

// Two-phase objective perturbation:
//   1. N1 ~ N(0, sigma1^2 I)
//   2. minimise L(w) + lambda ||w||^2 + (1/n) <N1, w> to gap <= alpha
//   3. N2 ~ N(0, sigma2^2 I)
//   4. return proj(w_hat + N2)
// Both noise vectors come from one generator seeded with `seed`, N1 first.
DPModel TrainDpErm(std::span<const LabeledSample> data, const LossSpec& spec,
                   double epsilon, double delta, double alpha, uint64_t seed);

// max{1/sqrt(n), sqrt(d log(1/delta)) / (eps n)}: the order of the excess
// population loss of the private learner, used to describe tiers to buyers.
double ExcessLossEstimate(int64_t n, int64_t d, double epsilon, double delta);

// Fraction of `data` where sign(<w,x>) matches the label (ties predict +1).
double ClassificationAccuracy(std::span<const double> weights,
                              std::span<const LabeledSample> data);

struct ConstantCheck {
  double max_gradient_norm = 0.0;
  double max_smoothness_ratio = 0.0;
  bool ok = false;
};

// Samples random weight pairs in the feasible ball and checks that per-sample
// gradient norms stay below `lipschitz` and gradient differences stay below
// `smoothness` times the weight distance.
ConstantCheck CheckDeclaredConstants(const LossSpec& spec,
                                     std::span<const LabeledSample> data,
                                     int probes, uint64_t seed);

}  // namespace datamarket

#endif  // DATAMARKET_DP_TRAINING_H_
