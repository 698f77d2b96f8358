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

#ifndef DATAMARKET_ALLOCATION_H_
#define DATAMARKET_ALLOCATION_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "datamarket/money.h"
#include "datamarket/types.h"

namespace datamarket {

// One candidate training sample for a tier: its value and what it costs.
struct CompItem {
  OwnerId owner_id = 0;
  double shapley = 0.0;
  Money base_comp;
  Money extra_comp;

  Money total_cost() const { return base_comp + extra_comp; }
};

enum class Solver { kBruteForce, kPseudoPolyDp, kGreedy, kGuessGreedy };

std::string_view ToString(Solver solver);
Solver ParseSolver(std::string_view text);

struct SelectionResult {
  std::vector<OwnerId> chosen;  // ascending
  double total_value = 0.0;
  Money total_cost;
  Solver solver = Solver::kGreedy;
};

// Negative values are clipped to zero before any selection or split.
double ClipShapley(double value);

// Splits `budget` proportionally to the (clipped) values, rounding down to
// minor units. Leftover units go to the largest value; among equal values
// the last one wins. Throws kAllZeroShapley when nothing is positive.
std::vector<Money> BaseCompensation(std::span<const double> shapley,
                                    Money budget);

// rho * base * g^k with g = max(0, eps_model - eps_prefer) and k = 1, 2 or
// 1/2 for linear, convex and concave curves; rounded half-up to minor units.
Money ExtraCompensation(CompensationCurve curve, double rho, Money base_comp,
                        double eps_prefer, double eps_model);

// Owners a tier may train on. Hard owners qualify iff eps_model <=
// eps_prefer; negotiable owners always qualify.
std::vector<OwnerId> EligibleOwnerIds(std::span<const DataOwner> owners,
                                      const ModelTier& tier);

// Cost items for the eligible owners of `tier`, in eligible-id order.
// `shapley` and `base_comp` are aligned with EligibleOwnerIds(owners, tier).
// Hard owners cost their base compensation; negotiable owners add the
// extra compensation of their curve.
std::vector<CompItem> EligibleItems(std::span<const DataOwner> owners,
                                    const ModelTier& tier,
                                    std::span<const double> shapley,
                                    std::span<const Money> base_comp);

inline constexpr size_t kMaxBruteForceItems = 22;
inline constexpr uint64_t kMaxDpCells = uint64_t{1} << 28;
inline constexpr uint64_t kMaxGuessSubsets = 1'000'000;

// Exhaustive search. Ties go to the smaller total cost, then to the
// lexicographically smallest owner-id list.
SelectionResult BcmvpBruteForce(std::span<const CompItem> items, Money budget);

// Pseudo-polynomial knapsack table over budget / a columns, where a is the
// gcd of all costs and the budget, followed by a backtrack.
SelectionResult BcmvpDp(std::span<const CompItem> items, Money budget);

// Takes items by decreasing value per unit cost and stops at the first one
// that does not fit. Zero-cost items come first. Density ties prefer the
// larger value, then the smaller owner id.
SelectionResult BcmvpGreedy(std::span<const CompItem> items, Money budget);

// Enumerates every guess of 1..ceil(1/alpha) items that fits the budget,
// drops remaining items worth more than the cheapest-valued guessed item,
// and fills the leftover budget greedily. Returns the best combination.
SelectionResult BcmvpGuessGreedy(std::span<const CompItem> items, Money budget,
                                 double alpha);

SelectionResult SolveBcmvp(Solver solver, std::span<const CompItem> items,
                           Money budget, double guess_alpha);

}  // namespace datamarket

#endif  // DATAMARKET_ALLOCATION_H_
