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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

constexpr int kMaxIterations = 1'000'000;

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double SquaredNorm(std::span<const double> a) { return Dot(a, a); }

void CheckDims(std::span<const double> weights, const LabeledSample& sample) {
  if (weights.size() != sample.features.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weights have dimension " + std::to_string(weights.size()) +
                    " but sample has " +
                    std::to_string(sample.features.size()));
  }
}

// Derivative of the loss with respect to the linear score <w,x>.
double ScoreDerivative(LossKind kind, double score, double label) {
  switch (kind) {
    case LossKind::kLeastSquares:
      return 2.0 * (score - label);
    case LossKind::kLogistic: {
      const double margin = label * score;
      // d/dm log(1 + e^-m) = -1 / (1 + e^m)
      return -label / (1.0 + std::exp(margin));
    }
    case LossKind::kSmoothedHinge: {
      const double margin = label * score;
      if (margin >= 1.0) return 0.0;
      if (margin <= 0.0) return -label;
      return -label * (1.0 - margin);
    }
  }
  return 0.0;
}

double LossAtScore(LossKind kind, double score, double label) {
  switch (kind) {
    case LossKind::kLeastSquares: {
      const double r = score - label;
      return r * r;
    }
    case LossKind::kLogistic: {
      const double margin = label * score;
      if (margin < -30.0) return -margin + std::log1p(std::exp(margin));
      return std::log1p(std::exp(-margin));
    }
    case LossKind::kSmoothedHinge: {
      const double margin = label * score;
      if (margin >= 1.0) return 0.0;
      if (margin <= 0.0) return 0.5 - margin;
      return 0.5 * (1.0 - margin) * (1.0 - margin);
    }
  }
  return 0.0;
}

// Gradient of the full regularised objective.
std::vector<double> ObjectiveGradient(const LossSpec& spec,
                                      std::span<const LabeledSample> data,
                                      std::span<const double> weights,
                                      std::span<const double> linear_term) {
  const size_t d = weights.size();
  std::vector<double> grad(d, 0.0);
  for (const LabeledSample& z : data) {
    const double s = ScoreDerivative(spec.kind, Dot(weights, z.features), z.label);
    for (size_t k = 0; k < d; ++k) grad[k] += s * z.features[k];
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (size_t k = 0; k < d; ++k) {
    grad[k] = grad[k] * inv_n + 2.0 * spec.lambda * weights[k];
    if (!linear_term.empty()) grad[k] += linear_term[k] * inv_n;
  }
  return grad;
}

std::vector<double> RandomPointInBall(size_t dim, double radius, Rng& rng) {
  std::vector<double> v = SampleGaussian(dim, 1.0, rng);
  const double norm = std::sqrt(SquaredNorm(v));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  for (double& x : v) x = norm > 0.0 ? x / norm * r : 0.0;
  return v;
}

void CheckData(std::span<const LabeledSample> data) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training data is empty");
  }
  const size_t d = data.front().features.size();
  for (const LabeledSample& z : data) {
    if (z.features.size() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "samples have inconsistent dimensions");
    }
  }
}

}  // namespace

std::string_view ToString(LossKind kind) {
  switch (kind) {
    case LossKind::kLeastSquares: return "least_squares";
    case LossKind::kLogistic: return "logistic";
    case LossKind::kSmoothedHinge: return "smoothed_hinge";
  }
  return "logistic";
}

LossKind ParseLossKind(std::string_view text) {
  if (text == "least_squares") return LossKind::kLeastSquares;
  if (text == "logistic") return LossKind::kLogistic;
  if (text == "smoothed_hinge") return LossKind::kSmoothedHinge;
  throw Error(ErrorCode::kParseError,
              "unknown loss kind '" + std::string(text) + "'");
}

void ValidateLossSpec(const LossSpec& spec) {
  if (!(spec.lambda > 0.0) || !(spec.lipschitz > 0.0) ||
      !(spec.smoothness > 0.0) || !(spec.radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda, lipschitz, smoothness and radius must be positive");
  }
}

LossValue LossAndGradient(const LossSpec& spec, std::span<const double> weights,
                          const LabeledSample& sample) {
  CheckDims(weights, sample);
  const double score = Dot(weights, sample.features);
  LossValue out;
  out.loss = LossAtScore(spec.kind, score, sample.label);
  const double s = ScoreDerivative(spec.kind, score, sample.label);
  out.gradient.resize(weights.size());
  for (size_t k = 0; k < weights.size(); ++k) {
    out.gradient[k] = s * sample.features[k];
  }
  return out;
}

double RegularizedObjective(const LossSpec& spec,
                            std::span<const LabeledSample> data,
                            std::span<const double> weights,
                            std::span<const double> linear_term) {
  CheckData(data);
  double total = 0.0;
  for (const LabeledSample& z : data) {
    CheckDims(weights, z);
    total += LossAtScore(spec.kind, Dot(weights, z.features), z.label);
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double value = total * inv_n + spec.lambda * SquaredNorm(weights);
  if (!linear_term.empty()) value += Dot(linear_term, weights) * inv_n;
  return value;
}

std::vector<double> ProjectToBall(std::vector<double> weights, double radius) {
  const double norm = std::sqrt(SquaredNorm(weights));
  if (norm > radius) {
    const double scale = radius / norm;
    for (double& w : weights) w *= scale;
  }
  return weights;
}

MinimizeResult MinimizeRegularized(const LossSpec& spec,
                                   std::span<const LabeledSample> data,
                                   std::span<const double> linear_term,
                                   std::span<const double> start,
                                   double tolerance) {
  ValidateLossSpec(spec);
  CheckData(data);
  const size_t d = data.front().features.size();
  if (start.size() != d || (!linear_term.empty() && linear_term.size() != d)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "start point or perturbation has the wrong dimension");
  }
  const double step = 1.0 / (spec.smoothness + 2.0 * spec.lambda);
  MinimizeResult result;
  result.weights = ProjectToBall({start.begin(), start.end()}, spec.radius);
  std::vector<double> next(d);
  for (int it = 0; it <= kMaxIterations; ++it) {
    const std::vector<double> grad =
        ObjectiveGradient(spec, data, result.weights, linear_term);
    for (size_t k = 0; k < d; ++k) next[k] = result.weights[k] - step * grad[k];
    next = ProjectToBall(std::move(next), spec.radius);
    double mapping_sq = 0.0;
    for (size_t k = 0; k < d; ++k) {
      const double g = (result.weights[k] - next[k]) / step;
      mapping_sq += g * g;
    }
    if (!std::isfinite(mapping_sq)) {
      throw Error(ErrorCode::kNonFinite,
                  "gradient descent diverged; is the smoothness bound right?");
    }
    result.gap_bound = mapping_sq / (2.0 * spec.lambda);
    result.iterations = it;
    if (result.gap_bound <= tolerance) break;
    result.weights.swap(next);
    next.assign(d, 0.0);
  }
  return result;
}

std::vector<double> TrainErm(std::span<const LabeledSample> data,
                             const LossSpec& spec, double tolerance,
                             uint64_t seed) {
  CheckData(data);
  Rng rng(seed);
  const std::vector<double> start =
      RandomPointInBall(data.front().features.size(), spec.radius, rng);
  return MinimizeRegularized(spec, data, {}, start, tolerance).weights;
}

NoiseScales ComputeNoiseScales(double lipschitz, double lambda, double epsilon,
                               double delta, double alpha) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidPrivacyParams,
                "need epsilon > 0, 0 < delta < 1 and alpha > 0");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  NoiseScales s;
  s.sigma1 = 20.0 * lipschitz * lipschitz * log_inv_delta / (epsilon * epsilon);
  s.sigma2 = 40.0 * alpha * log_inv_delta / (lambda * epsilon * epsilon);
  return s;
}

std::vector<double> SampleGaussian(size_t dim, double sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = sigma * normal(rng);
  return v;
}

DPModel TrainDpErm(std::span<const LabeledSample> data, const LossSpec& spec,
                   double epsilon, double delta, double alpha, uint64_t seed) {
  ValidateLossSpec(spec);
  const NoiseScales noise =
      ComputeNoiseScales(spec.lipschitz, spec.lambda, epsilon, delta, alpha);
  CheckData(data);
  const size_t d = data.front().features.size();

  Rng rng(seed);
  const std::vector<double> n1 = SampleGaussian(d, noise.sigma1, rng);
  const std::vector<double> zero(d, 0.0);
  MinimizeResult approx = MinimizeRegularized(spec, data, n1, zero, alpha);
  const std::vector<double> n2 = SampleGaussian(d, noise.sigma2, rng);
  for (size_t k = 0; k < d; ++k) approx.weights[k] += n2[k];

  DPModel model;
  model.weights = ProjectToBall(std::move(approx.weights), spec.radius);
  model.tier.epsilon = epsilon;
  model.tier.delta = delta;
  model.alpha = alpha;
  model.seed = seed;
  model.noise = noise;
  model.gap_bound = approx.gap_bound;
  return model;
}

double ExcessLossEstimate(int64_t n, int64_t d, double epsilon, double delta) {
  if (n < 1 || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need n >= 1 and d >= 1");
  }
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidPrivacyParams,
                "need epsilon > 0 and 0 < delta < 1");
  }
  const double nd = static_cast<double>(n);
  const double sampling = 1.0 / std::sqrt(nd);
  const double privacy =
      std::sqrt(static_cast<double>(d) * std::log(1.0 / delta)) /
      (epsilon * nd);
  return std::max(sampling, privacy);
}

double ClassificationAccuracy(std::span<const double> weights,
                              std::span<const LabeledSample> data) {
  if (data.empty()) {
    throw Error(ErrorCode::kEmptyEvalSet, "evaluation set is empty");
  }
  int64_t correct = 0;
  for (const LabeledSample& z : data) {
    CheckDims(weights, z);
    const double predicted = Dot(weights, z.features) >= 0.0 ? 1.0 : -1.0;
    if (predicted == (z.label > 0.0 ? 1.0 : -1.0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

ConstantCheck CheckDeclaredConstants(const LossSpec& spec,
                                     std::span<const LabeledSample> data,
                                     int probes, uint64_t seed) {
  CheckData(data);
  const size_t d = data.front().features.size();
  Rng rng(seed);
  std::uniform_int_distribution<size_t> pick(0, data.size() - 1);
  ConstantCheck check;
  for (int p = 0; p < probes; ++p) {
    const LabeledSample& z = data[pick(rng)];
    const std::vector<double> w1 = RandomPointInBall(d, spec.radius, rng);
    const std::vector<double> w2 = RandomPointInBall(d, spec.radius, rng);
    const LossValue g1 = LossAndGradient(spec, w1, z);
    const LossValue g2 = LossAndGradient(spec, w2, z);
    check.max_gradient_norm =
        std::max({check.max_gradient_norm, std::sqrt(SquaredNorm(g1.gradient)),
                  std::sqrt(SquaredNorm(g2.gradient))});
    double diff_g = 0.0, diff_w = 0.0;
    for (size_t k = 0; k < d; ++k) {
      diff_g += (g1.gradient[k] - g2.gradient[k]) *
                (g1.gradient[k] - g2.gradient[k]);
      diff_w += (w1[k] - w2[k]) * (w1[k] - w2[k]);
    }
    if (diff_w > 0.0) {
      check.max_smoothness_ratio =
          std::max(check.max_smoothness_ratio, std::sqrt(diff_g / diff_w));
    }
  }
  check.ok = check.max_gradient_norm <= spec.lipschitz &&
             check.max_smoothness_ratio <= spec.smoothness;
  return check;
}

}  // namespace datamarket
