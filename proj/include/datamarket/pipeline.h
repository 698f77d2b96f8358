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

#ifndef DATAMARKET_PIPELINE_H_
#define DATAMARKET_PIPELINE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "datamarket/allocation.h"
#include "datamarket/dp_training.h"
#include "datamarket/money.h"
#include "datamarket/pricing.h"
#include "datamarket/rational.h"
#include "datamarket/types.h"
#include "datamarket/valuation.h"

namespace datamarket {

struct PipelineConfig {
  std::vector<ModelTier> tiers;
  LossSpec loss;
  int64_t shapley_permutations = 200;
  uint64_t shapley_seed = 0;
  Solver solver = Solver::kPseudoPolyDp;
  double guess_alpha = 0.5;
  // Expected number of survey answers; informational only.
  int64_t survey_size_hint = 0;
  // Optimisation accuracy of the private training step.
  double alpha_opt = 1e-3;
  uint64_t training_seed = 0;
  // Gap tolerance of the non-private training inside the utility oracle.
  double valuation_tolerance = 1e-6;
  // Value every tier with the first tier's Shapley report instead of
  // recomputing it over each tier's eligible owners. Owners missing from
  // the first tier's report are valued at zero.
  bool reuse_tier1_valuations = false;
  // Run the per-tier valuation, selection and training concurrently.
  bool parallel_tiers = true;
};

void ValidatePipelineConfig(const PipelineConfig& config);

struct TierOutcome {
  ModelTier tier;
  std::vector<OwnerId> eligible;
  ShapleyReport shapley;
  // Selection-time costs of the eligible owners, aligned with `eligible`.
  std::vector<CompItem> items;
  SelectionResult selection;
  // False when nobody was eligible or selected; `model` is then empty.
  bool trained = false;
  DPModel model;
  double model_accuracy = 0.0;  // on the evaluation set
  double excess_loss = 0.0;
  ExactRational exact_price;
  Money price;
  bool zero_demand = false;
  // Share of the realised revenue paid out to this tier's owners.
  Money pool;
};

struct TierShare {
  int tier = 1;
  Money base;
  Money extra;
};

struct CompensationRecord {
  OwnerId owner = 0;
  std::vector<TierShare> tiers;  // only tiers that selected the owner
  Money base;
  Money extra;
  Money total;
  // What the owner was quoted at selection time, summed over tiers.
  Money selection_cost;
};

struct FinalAllocation {
  std::vector<Money> tier_pools;
  // Sum of the pools of tiers that selected at least one owner.
  Money distributed;
  std::vector<CompensationRecord> records;  // ascending owner id
};

// Splits `opt_revenue` across tiers in proportion to price, then pays each
// tier's owners: extra compensation first, the rest in proportion to
// (clipped) Shapley value. When the extras exceed the pool they are scaled
// down to fit and no base share is paid. Every split rounds down and hands
// leftover units to the largest remainders, lower index first, so the
// records always sum to `distributed` exactly. `subsets[m]`, `shapley[m]`
// and `extra[m]` are aligned per tier. Throws kZeroTotalPrice.
FinalAllocation AllocateFinalCompensation(
    std::span<const ExactRational> prices, Money opt_revenue,
    std::span<const std::vector<OwnerId>> subsets,
    std::span<const std::vector<double>> shapley,
    std::span<const std::vector<Money>> extra);

struct MarketReport {
  std::vector<TierOutcome> tiers;
  PriceSchedule schedule;
  RevenueSummary revenue;
  Money opt_revenue;
  Money distributed;
  std::vector<CompensationRecord> compensation;
  Money selection_cost_total;
  // Realised revenue falls short of what owners were quoted at selection.
  bool deficit = false;
};

// Values, selects and trains every tier, prices the tiers against the
// survey and pays the owners out of the realised revenue.
MarketReport RunPipeline(const PipelineConfig& config,
                         std::span<const DataOwner> owners,
                         const Dataset& eval_set,
                         std::span<const SurveyPoint> survey);

}  // namespace datamarket

#endif  // DATAMARKET_PIPELINE_H_
