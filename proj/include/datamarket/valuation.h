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

#ifndef DATAMARKET_VALUATION_H_
#define DATAMARKET_VALUATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "datamarket/dp_training.h"
#include "datamarket/types.h"

namespace datamarket {

// Maps a coalition of owners to a utility in [0, 1]. Implementations must be
// deterministic and safe for concurrent const use. Subsets arrive sorted by
// owner id.
class UtilityOracle {
 public:
  virtual ~UtilityOracle() = default;
  virtual double Evaluate(std::span<const OwnerId> subset) const = 0;
};

// Adapts a callable; handy for synthetic games in tests and bindings.
class FunctionOracle : public UtilityOracle {
 public:
  using Fn = std::function<double(std::span<const OwnerId>)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  double Evaluate(std::span<const OwnerId> subset) const override {
    return fn_(subset);
  }

 private:
  Fn fn_;
};

// Utility = accuracy on `eval_set` of a non-private ERM model trained on the
// coalition's samples with a fixed seed. The empty coalition scores the
// majority-class rate of the evaluation set.
class AccuracyOracle : public UtilityOracle {
 public:
  AccuracyOracle(std::span<const DataOwner> owners, Dataset eval_set,
                 LossSpec loss, uint64_t training_seed,
                 double tolerance = 1e-8);

  double Evaluate(std::span<const OwnerId> subset) const override;

 private:
  std::unordered_map<OwnerId, LabeledSample> samples_;
  Dataset eval_set_;
  LossSpec loss_;
  uint64_t training_seed_;
  double tolerance_;
};

// Accuracy of a model trained on `train` and evaluated on `eval_set`; the
// empty training set yields the majority-class baseline.
double UtilityAccuracy(std::span<const LabeledSample> train,
                       std::span<const LabeledSample> eval_set,
                       const LossSpec& loss, uint64_t training_seed,
                       double tolerance = 1e-8);

struct ShapleyReport {
  std::vector<OwnerId> owners;
  std::vector<double> values;
  // Sample standard deviation of each owner's per-permutation marginal
  // contribution (Monte Carlo only; zero for exact reports).
  std::vector<double> marginal_stddev;
  int64_t permutations_used = 0;
  // Running mean after each checkpoint; one row per checkpoint.
  std::vector<int64_t> checkpoints;
  std::vector<std::vector<double>> running_mean_history;
  uint64_t seed = 0;
  bool exact = false;
  double utility_full = 0.0;
  double utility_empty = 0.0;
  int64_t oracle_calls = 0;
};

inline constexpr size_t kMaxExactOwners = 20;

// Shapley values by full subset enumeration. Throws kTooManyOwners above
// kMaxExactOwners.
ShapleyReport ExactShapley(std::span<const OwnerId> owners,
                           const UtilityOracle& oracle);

struct MonteCarloOptions {
  int64_t permutations = 1000;
  uint64_t seed = 0;
  // Record the running mean every this many permutations; 0 picks roughly
  // twenty checkpoints.
  int64_t checkpoint_every = 0;
  // If positive, stop at a checkpoint once no running mean moved by more
  // than this relative amount since the previous checkpoint.
  double relative_tolerance = 0.0;
};

// Permutation-sampling estimate: for each random ordering, walk the
// prefixes and credit each owner with U(prefix + owner) - U(prefix); the
// estimate is the mean over permutations. Permutation k is shuffled by its
// own generator seeded from (seed, k).
ShapleyReport MonteCarloShapley(std::span<const OwnerId> owners,
                                const UtilityOracle& oracle,
                                const MonteCarloOptions& options);

}  // namespace datamarket

#endif  // DATAMARKET_VALUATION_H_
