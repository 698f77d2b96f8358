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

#include "datamarket/valuation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "datamarket/errors.h"
#include "datamarket/random.h"

namespace datamarket {
namespace {

using Bits = std::vector<uint64_t>;

struct BitsHash {
  size_t operator()(const Bits& bits) const {
    uint64_t h = 0x84222325cbf29ce4ULL;
    for (uint64_t w : bits) h = MixSeed(h, w);
    return static_cast<size_t>(h);
  }
};

void CheckDistinct(std::span<const OwnerId> owners) {
  std::set<OwnerId> seen(owners.begin(), owners.end());
  if (seen.size() != owners.size()) {
    throw Error(ErrorCode::kInvalidArgument, "owner ids must be distinct");
  }
}

// Evaluates coalitions given as bitsets over positions in `owners`, with
// memoisation for the lifetime of one report.
class CoalitionEvaluator {
 public:
  CoalitionEvaluator(std::span<const OwnerId> owners,
                     const UtilityOracle& oracle)
      : owners_(owners), oracle_(oracle) {}

  double operator()(const Bits& bits) {
    auto it = memo_.find(bits);
    if (it != memo_.end()) return it->second;
    std::vector<OwnerId> ids;
    for (size_t i = 0; i < owners_.size(); ++i) {
      if ((bits[i / 64] >> (i % 64)) & 1ULL) ids.push_back(owners_[i]);
    }
    std::sort(ids.begin(), ids.end());
    const double u = oracle_.Evaluate(ids);
    ++calls_;
    memo_.emplace(bits, u);
    return u;
  }

  int64_t calls() const { return calls_; }

 private:
  std::span<const OwnerId> owners_;
  const UtilityOracle& oracle_;
  std::unordered_map<Bits, double, BitsHash> memo_;
  int64_t calls_ = 0;
};

double MajorityRate(std::span<const LabeledSample> eval_set) {
  int64_t positive = 0;
  for (const LabeledSample& z : eval_set) {
    if (z.label > 0.0) ++positive;
  }
  const int64_t n = static_cast<int64_t>(eval_set.size());
  return static_cast<double>(std::max(positive, n - positive)) /
         static_cast<double>(n);
}

}  // namespace

double UtilityAccuracy(std::span<const LabeledSample> train,
                       std::span<const LabeledSample> eval_set,
                       const LossSpec& loss, uint64_t training_seed,
                       double tolerance) {
  if (eval_set.empty()) {
    throw Error(ErrorCode::kEmptyEvalSet, "evaluation set is empty");
  }
  if (train.empty()) return MajorityRate(eval_set);
  const std::vector<double> w = TrainErm(train, loss, tolerance, training_seed);
  return ClassificationAccuracy(w, eval_set);
}

AccuracyOracle::AccuracyOracle(std::span<const DataOwner> owners,
                               Dataset eval_set, LossSpec loss,
                               uint64_t training_seed, double tolerance)
    : eval_set_(std::move(eval_set)),
      loss_(loss),
      training_seed_(training_seed),
      tolerance_(tolerance) {
  if (eval_set_.empty()) {
    throw Error(ErrorCode::kEmptyEvalSet, "evaluation set is empty");
  }
  for (const DataOwner& o : owners) samples_.emplace(o.id, o.sample);
}

double AccuracyOracle::Evaluate(std::span<const OwnerId> subset) const {
  Dataset train;
  train.reserve(subset.size());
  for (OwnerId id : subset) {
    auto it = samples_.find(id);
    if (it == samples_.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "oracle has no sample for owner " + std::to_string(id));
    }
    train.push_back(it->second);
  }
  return UtilityAccuracy(train, eval_set_, loss_, training_seed_, tolerance_);
}

ShapleyReport ExactShapley(std::span<const OwnerId> owners,
                           const UtilityOracle& oracle) {
  const size_t n = owners.size();
  if (n > kMaxExactOwners) {
    throw Error(ErrorCode::kTooManyOwners,
                std::to_string(n) + " owners exceeds the exact limit of " +
                    std::to_string(kMaxExactOwners));
  }
  CheckDistinct(owners);

  const uint64_t full = (n == 0) ? 1 : (1ULL << n);
  std::vector<double> utility(full);
  std::vector<OwnerId> ids;
  for (uint64_t mask = 0; mask < full; ++mask) {
    ids.clear();
    for (size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1ULL) ids.push_back(owners[i]);
    }
    std::sort(ids.begin(), ids.end());
    utility[mask] = oracle.Evaluate(ids);
  }

  // weight[s] = s! (n-1-s)! / n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(n);
  for (size_t s = 0; s < n; ++s) {
    double binom = 1.0;
    for (size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(n - 1 - s + k) / static_cast<double>(k);
    }
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
  }

  ShapleyReport report;
  report.owners.assign(owners.begin(), owners.end());
  report.values.assign(n, 0.0);
  report.marginal_stddev.assign(n, 0.0);
  report.exact = true;
  report.utility_empty = utility.front();
  report.utility_full = utility[full - 1];
  report.oracle_calls = static_cast<int64_t>(full);
  for (size_t i = 0; i < n; ++i) {
    const uint64_t bit = 1ULL << i;
    double sum = 0.0;
    for (uint64_t mask = 0; mask < full; ++mask) {
      if (mask & bit) continue;
      const int size = __builtin_popcountll(mask);
      sum += weight[size] * (utility[mask | bit] - utility[mask]);
    }
    report.values[i] = sum;
  }
  return report;
}

ShapleyReport MonteCarloShapley(std::span<const OwnerId> owners,
                                const UtilityOracle& oracle,
                                const MonteCarloOptions& options) {
  if (options.permutations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "permutations must be >= 1");
  }
  CheckDistinct(owners);
  const size_t n = owners.size();
  const size_t words = (n + 63) / 64 + (n == 0 ? 1 : 0);
  const int64_t every =
      options.checkpoint_every > 0
          ? options.checkpoint_every
          : std::max<int64_t>(1, options.permutations / 20);

  CoalitionEvaluator evaluate(owners, oracle);
  ShapleyReport report;
  report.owners.assign(owners.begin(), owners.end());
  report.seed = options.seed;
  const Bits empty(words, 0);
  report.utility_empty = evaluate(empty);

  // Welford accumulators per owner.
  std::vector<double> mean(n, 0.0), m2(n, 0.0);
  std::vector<size_t> order(n);
  std::vector<double> previous_checkpoint;
  int64_t k = 0;
  while (k < options.permutations) {
    Rng rng(MixSeed(options.seed, static_cast<uint64_t>(k)));
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    ++k;
    Bits prefix = empty;
    double previous = report.utility_empty;
    for (size_t pos : order) {
      prefix[pos / 64] |= 1ULL << (pos % 64);
      const double u = evaluate(prefix);
      const double marginal = u - previous;
      previous = u;
      const double delta = marginal - mean[pos];
      mean[pos] += delta / static_cast<double>(k);
      m2[pos] += delta * (marginal - mean[pos]);
    }
    if (k == 1 && n > 0) report.utility_full = previous;
    if (k % every == 0 || k == options.permutations) {
      report.checkpoints.push_back(k);
      report.running_mean_history.push_back(mean);
      if (options.relative_tolerance > 0.0 && !previous_checkpoint.empty()) {
        double scale = 0.0, change = 0.0;
        for (size_t i = 0; i < n; ++i) {
          scale = std::max(scale, std::abs(mean[i]));
          change = std::max(change, std::abs(mean[i] - previous_checkpoint[i]));
        }
        if (change <= options.relative_tolerance * std::max(scale, 1e-12)) {
          break;
        }
      }
      previous_checkpoint = mean;
    }
  }
  if (n == 0) report.utility_full = report.utility_empty;

  report.permutations_used = k;
  report.values = mean;
  report.marginal_stddev.assign(n, 0.0);
  if (k > 1) {
    for (size_t i = 0; i < n; ++i) {
      report.marginal_stddev[i] =
          std::sqrt(m2[i] / static_cast<double>(k - 1));
    }
  }
  report.oracle_calls = evaluate.calls();
  return report;
}

}  // namespace datamarket
