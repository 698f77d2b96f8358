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

#ifndef DATAMARKET_PRICING_H_
#define DATAMARKET_PRICING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datamarket/money.h"
#include "datamarket/rational.h"
#include "datamarket/types.h"

namespace datamarket {

// Where a candidate price came from: a surveyed bid, the image of a bid on
// the unit-price line of a cheaper tier, or a bid copied down from a more
// expensive tier.
enum class PointKind { kSurvey, kSubadditivity, kMonotonicity };

std::string_view ToString(PointKind kind);

struct PricePoint {
  int model_index = 1;  // 1-based tier
  ExactRational price;
  PointKind kind = PointKind::kSurvey;
  // Number of surveyed buyers of this tier bidding exactly this price.
  int64_t survey_count = 0;

  bool is_survey() const { return survey_count > 0; }
};

// Candidate prices per tier (index 0 is tier 1), ascending and distinct.
using SolutionSpace = std::vector<std::vector<PricePoint>>;

std::vector<ExactRational> ExactEpsilons(std::span<const double> epsilons);
void ValidateEpsilons(std::span<const ExactRational> epsilons);

// Complete candidate set: every survey bid on its own tier, its scaled image
// bid * eps^k / eps^m on every later tier k, and a copy of the bid on every
// earlier tier. Coinciding prices within a tier merge, keeping the survey
// multiplicity.
SolutionSpace BuildSolutionSpace(std::span<const SurveyPoint> survey,
                                 std::span<const ExactRational> epsilons);

// Survey bids only, without the derived candidates.
SolutionSpace SurveyOnlySpace(std::span<const SurveyPoint> survey,
                              int num_tiers);

enum class PricingMethod { kDealerPlus, kDealer, kLinear, kLow, kMedian, kHigh };

std::string_view ToString(PricingMethod method);
PricingMethod ParsePricingMethod(std::string_view text);

struct PriceSchedule {
  std::vector<ExactRational> exact_prices;
  std::vector<Money> prices;  // exact prices rounded down
  ExactRational exact_revenue;
  Money revenue;  // exact revenue rounded down
  PricingMethod method = PricingMethod::kDealerPlus;
  // Tiers nobody in the survey asked for.
  std::vector<bool> zero_demand;
  // False when the restricted candidate set admits no arbitrage-free
  // schedule; prices are then all zero.
  bool feasible = true;
};

struct PricingResult {
  PriceSchedule schedule;
  // opt[m][j]: best revenue over tiers 1..m+1 with tier m+1 priced at its
  // j-th candidate; nullopt when no feasible predecessor exists.
  std::vector<std::vector<std::optional<ExactRational>>> opt;
  // Index of the chosen predecessor on the previous tier, -1 if none.
  std::vector<std::vector<int>> predecessor;
  // Predecessor examinations (literal scan) or window operations.
  int64_t cell_updates = 0;
};

enum class PredecessorSearch {
  // Every predecessor of every cell is examined.
  kScan,
  // Feasible predecessors form a contiguous price range that only moves
  // right, so a monotone deque yields the range maximum in amortised O(1).
  kSlidingWindow,
};

// Revenue-maximising monotone schedule with non-increasing unit price,
// restricted to `space`. Ties pick the lowest price, both for the final
// tier and when backtracking. Throws kEmptySolutionSpace if `space` does
// not have one non-empty candidate list per tier while the survey is
// non-empty.
PricingResult MaximizeRevenueDp(
    const SolutionSpace& space, std::span<const SurveyPoint> survey,
    std::span<const ExactRational> epsilons,
    PredecessorSearch search = PredecessorSearch::kSlidingWindow);

// Convenience: build the complete space first.
PricingResult MaximizeRevenueDp(
    std::span<const SurveyPoint> survey,
    std::span<const ExactRational> epsilons,
    PredecessorSearch search = PredecessorSearch::kSlidingWindow);

// Same recursion over survey bids only. Reports feasible = false instead of
// throwing when the bids alone cannot form a valid schedule.
PricingResult MaximizeRevenueSurveyOnly(std::span<const SurveyPoint> survey,
                                        std::span<const ExactRational> epsilons);

// Linear: lowest tier-1 bid to highest tier-M bid, interpolated in between.
// Low / Median / High: the global minimum, lower median or maximum bid on
// every tier. Throws kEmptySurvey.
PriceSchedule BaselinePrices(PricingMethod kind,
                             std::span<const SurveyPoint> survey,
                             int num_tiers);

struct RevenueSummary {
  ExactRational revenue;
  int64_t buyers = 0;
  int64_t affordable = 0;
  double affordability_ratio = 0.0;  // 0 for an empty survey
  std::vector<ExactRational> tier_revenue;
  std::vector<int64_t> tier_buyers;
  std::vector<int64_t> tier_affordable;
};

RevenueSummary RevenueAndAffordability(std::span<const ExactRational> prices,
                                       std::span<const SurveyPoint> survey);
RevenueSummary RevenueAndAffordability(std::span<const Money> prices,
                                       std::span<const SurveyPoint> survey);

struct ArbitrageReport {
  bool monotone = true;
  bool relaxed_subadditive = true;
  // Only tier triples with eps_c == eps_a + eps_b are checkable.
  bool sum_subadditive = true;
  std::vector<std::string> violations;

  bool ok() const { return monotone && relaxed_subadditive && sum_subadditive; }
};

ArbitrageReport CheckArbitrageFree(std::span<const ExactRational> prices,
                                   std::span<const ExactRational> epsilons);

inline constexpr uint64_t kMaxBruteForceCombinations = 10'000'000;

// Exhaustive search over every per-tier combination of candidates from
// `space` under monotonicity and non-increasing unit price.
PriceSchedule RrmBruteForceOverSpace(const SolutionSpace& space,
                                     std::span<const SurveyPoint> survey,
                                     std::span<const ExactRational> epsilons);
PriceSchedule RrmBruteForce(std::span<const SurveyPoint> survey,
                            std::span<const ExactRational> epsilons);

// Exhaustive search over the complete space under monotonicity and
// p(a) + p(b) >= p(c) wherever eps_c == eps_a + eps_b.
PriceSchedule RmBruteForce(std::span<const SurveyPoint> survey,
                           std::span<const ExactRational> epsilons);

}  // namespace datamarket

#endif  // DATAMARKET_PRICING_H_
