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

#include "datamarket/pricing.h"

#include <algorithm>
#include <deque>
#include <map>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

using TierCounts = std::vector<std::map<int64_t, int64_t>>;

// Bid multiplicities per tier.
TierCounts CountBids(std::span<const SurveyPoint> survey, int num_tiers) {
  ValidateSurvey(survey, num_tiers);
  TierCounts counts(num_tiers);
  for (const SurveyPoint& p : survey) ++counts[p.target_model - 1][p.bid.units()];
  return counts;
}

void AddPoint(std::map<ExactRational, PricePoint>& tier, int model_index,
              const ExactRational& price, PointKind kind, int64_t count) {
  auto [it, inserted] = tier.try_emplace(price);
  PricePoint& point = it->second;
  if (inserted) {
    point.model_index = model_index;
    point.price = price;
    point.kind = kind;
  } else if (kind < point.kind) {
    point.kind = kind;
  }
  point.survey_count += count;
}

SolutionSpace Flatten(std::vector<std::map<ExactRational, PricePoint>>& tiers) {
  SolutionSpace space(tiers.size());
  for (size_t m = 0; m < tiers.size(); ++m) {
    for (auto& [price, point] : tiers[m]) space[m].push_back(point);
  }
  return space;
}

// Revenue of tier m at each candidate: price times the number of buyers of
// that tier bidding at least the price (suffix sum of multiplicities).
std::vector<ExactRational> TierRevenue(const std::vector<PricePoint>& points) {
  std::vector<ExactRational> revenue(points.size());
  int64_t suffix = 0;
  for (size_t j = points.size(); j-- > 0;) {
    suffix += points[j].survey_count;
    revenue[j] = points[j].price * ExactRational(suffix);
  }
  return revenue;
}

PriceSchedule MakeSchedule(std::vector<ExactRational> exact_prices,
                           std::span<const SurveyPoint> survey,
                           PricingMethod method) {
  PriceSchedule s;
  s.method = method;
  const RevenueSummary summary = RevenueAndAffordability(exact_prices, survey);
  s.exact_revenue = summary.revenue;
  s.revenue = Money::FromUnits(summary.revenue.Floor());
  for (const ExactRational& p : exact_prices) {
    s.prices.push_back(Money::FromUnits(p.Floor()));
  }
  for (int64_t buyers : summary.tier_buyers) s.zero_demand.push_back(buyers == 0);
  s.exact_prices = std::move(exact_prices);
  return s;
}

PriceSchedule ZeroSchedule(size_t num_tiers, std::span<const SurveyPoint> survey,
                           PricingMethod method, bool feasible) {
  PriceSchedule s =
      MakeSchedule(std::vector<ExactRational>(num_tiers), survey, method);
  s.feasible = feasible;
  return s;
}

PricingResult RunDp(const SolutionSpace& space,
                    std::span<const SurveyPoint> survey,
                    std::span<const ExactRational> epsilons,
                    PredecessorSearch search, PricingMethod method) {
  const size_t num_tiers = epsilons.size();
  PricingResult result;
  result.opt.resize(num_tiers);
  result.predecessor.resize(num_tiers);
  for (size_t m = 0; m < num_tiers; ++m) {
    result.opt[m].assign(space[m].size(), std::nullopt);
    result.predecessor[m].assign(space[m].size(), -1);
  }

  const std::vector<ExactRational> first = TierRevenue(space[0]);
  for (size_t j = 0; j < space[0].size(); ++j) result.opt[0][j] = first[j];

  for (size_t m = 1; m < num_tiers; ++m) {
    const std::vector<PricePoint>& prev = space[m - 1];
    const std::vector<PricePoint>& cur = space[m];
    const auto& prev_opt = result.opt[m - 1];
    const std::vector<ExactRational> revenue = TierRevenue(cur);
    const ExactRational ratio = epsilons[m - 1] / epsilons[m];

    std::deque<size_t> window;
    size_t next = 0;
    for (size_t j = 0; j < cur.size(); ++j) {
      const ExactRational& price = cur[j].price;
      // Predecessor q is feasible iff price * ratio <= q <= price.
      const ExactRational lower = price * ratio;
      int best = -1;
      if (search == PredecessorSearch::kScan) {
        for (size_t k = 0; k < prev.size(); ++k) {
          ++result.cell_updates;
          if (!prev_opt[k] || prev[k].price > price || prev[k].price < lower) {
            continue;
          }
          if (best < 0 || *prev_opt[k] > *prev_opt[best]) best = static_cast<int>(k);
        }
      } else {
        while (next < prev.size() && prev[next].price <= price) {
          if (prev_opt[next]) {
            while (!window.empty() && *prev_opt[window.back()] < *prev_opt[next]) {
              window.pop_back();
              ++result.cell_updates;
            }
            window.push_back(next);
            ++result.cell_updates;
          }
          ++next;
        }
        while (!window.empty() && prev[window.front()].price < lower) {
          window.pop_front();
          ++result.cell_updates;
        }
        ++result.cell_updates;
        if (!window.empty()) best = static_cast<int>(window.front());
      }
      if (best >= 0) {
        result.opt[m][j] = *prev_opt[best] + revenue[j];
        result.predecessor[m][j] = best;
      }
    }
  }

  int last = -1;
  const auto& final_opt = result.opt[num_tiers - 1];
  for (size_t j = 0; j < final_opt.size(); ++j) {
    if (final_opt[j] && (last < 0 || *final_opt[j] > *final_opt[last])) {
      last = static_cast<int>(j);
    }
  }
  if (last < 0) {
    result.schedule = ZeroSchedule(num_tiers, survey, method, false);
    return result;
  }
  std::vector<ExactRational> prices(num_tiers);
  int j = last;
  for (size_t m = num_tiers; m-- > 0;) {
    prices[m] = space[m][j].price;
    j = result.predecessor[m][j];
  }
  result.schedule = MakeSchedule(std::move(prices), survey, method);
  return result;
}

// Depth-first enumeration shared by the two brute-force searches.
// `admissible(m, chosen)` checks tier m's choice against tiers < m.
template <typename Admissible>
PriceSchedule Exhaust(const SolutionSpace& space,
                      std::span<const SurveyPoint> survey,
                      PricingMethod method, Admissible admissible) {
  const size_t num_tiers = space.size();
  uint64_t combos = 1;
  for (const auto& tier : space) {
    if (tier.empty()) {
      throw Error(ErrorCode::kEmptySolutionSpace, "a tier has no candidates");
    }
    combos *= tier.size();
    if (combos > kMaxBruteForceCombinations) {
      throw Error(ErrorCode::kSearchSpaceTooLarge,
                  "more than " + std::to_string(kMaxBruteForceCombinations) +
                      " price combinations");
    }
  }
  std::vector<std::vector<ExactRational>> revenue;
  for (const auto& tier : space) revenue.push_back(TierRevenue(tier));

  std::vector<ExactRational> chosen(num_tiers);
  std::optional<ExactRational> best_revenue;
  std::vector<ExactRational> best_prices;
  auto visit = [&](auto&& self, size_t m, const ExactRational& acc) -> void {
    if (m == num_tiers) {
      if (!best_revenue || acc > *best_revenue) {
        best_revenue = acc;
        best_prices = chosen;
      }
      return;
    }
    for (size_t j = 0; j < space[m].size(); ++j) {
      chosen[m] = space[m][j].price;
      if (!admissible(m, chosen)) continue;
      self(self, m + 1, acc + revenue[m][j]);
    }
  };
  visit(visit, 0, ExactRational(0));
  if (!best_revenue) return ZeroSchedule(num_tiers, survey, method, false);
  return MakeSchedule(std::move(best_prices), survey, method);
}

// Triples (a, b, c), a <= b, with eps_a + eps_b == eps_c, grouped by c.
std::vector<std::vector<std::pair<size_t, size_t>>> SumTriples(
    std::span<const ExactRational> epsilons) {
  const size_t n = epsilons.size();
  std::vector<std::vector<std::pair<size_t, size_t>>> triples(n);
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a; b < n; ++b) {
      const ExactRational sum = epsilons[a] + epsilons[b];
      for (size_t c = 0; c < n; ++c) {
        if (epsilons[c] == sum) triples[c].emplace_back(a, b);
      }
    }
  }
  return triples;
}

}  // namespace

std::string_view ToString(PointKind kind) {
  switch (kind) {
    case PointKind::kSurvey: return "SV";
    case PointKind::kSubadditivity: return "SC";
    case PointKind::kMonotonicity: return "MC";
  }
  return "SV";
}

std::string_view ToString(PricingMethod method) {
  switch (method) {
    case PricingMethod::kDealerPlus: return "complete_dp";
    case PricingMethod::kDealer: return "survey_dp";
    case PricingMethod::kLinear: return "linear";
    case PricingMethod::kLow: return "low";
    case PricingMethod::kMedian: return "median";
    case PricingMethod::kHigh: return "high";
  }
  return "complete_dp";
}

PricingMethod ParsePricingMethod(std::string_view text) {
  for (PricingMethod m :
       {PricingMethod::kDealerPlus, PricingMethod::kDealer,
        PricingMethod::kLinear, PricingMethod::kLow, PricingMethod::kMedian,
        PricingMethod::kHigh}) {
    if (ToString(m) == text) return m;
  }
  throw Error(ErrorCode::kParseError,
              "unknown pricing method '" + std::string(text) + "'");
}

std::vector<ExactRational> ExactEpsilons(std::span<const double> epsilons) {
  std::vector<ExactRational> out;
  out.reserve(epsilons.size());
  for (double e : epsilons) out.push_back(ExactRational::FromDouble(e));
  ValidateEpsilons(out);
  return out;
}

void ValidateEpsilons(std::span<const ExactRational> epsilons) {
  if (epsilons.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one tier is required");
  }
  for (size_t i = 0; i < epsilons.size(); ++i) {
    if (epsilons[i] <= ExactRational(0) ||
        (i > 0 && epsilons[i] <= epsilons[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "epsilons must be positive and strictly increasing");
    }
  }
}

SolutionSpace BuildSolutionSpace(std::span<const SurveyPoint> survey,
                                 std::span<const ExactRational> epsilons) {
  ValidateEpsilons(epsilons);
  const int num_tiers = static_cast<int>(epsilons.size());
  const TierCounts counts = CountBids(survey, num_tiers);
  std::vector<std::map<ExactRational, PricePoint>> tiers(num_tiers);
  for (int m = 0; m < num_tiers; ++m) {
    for (const auto& [bid, count] : counts[m]) {
      const ExactRational price(bid);
      AddPoint(tiers[m], m + 1, price, PointKind::kSurvey, count);
      for (int k = m + 1; k < num_tiers; ++k) {
        AddPoint(tiers[k], k + 1, price * epsilons[k] / epsilons[m],
                 PointKind::kSubadditivity, 0);
      }
      for (int k = 0; k < m; ++k) {
        AddPoint(tiers[k], k + 1, price, PointKind::kMonotonicity, 0);
      }
    }
  }
  return Flatten(tiers);
}

SolutionSpace SurveyOnlySpace(std::span<const SurveyPoint> survey,
                              int num_tiers) {
  const TierCounts counts = CountBids(survey, num_tiers);
  std::vector<std::map<ExactRational, PricePoint>> tiers(num_tiers);
  for (int m = 0; m < num_tiers; ++m) {
    for (const auto& [bid, count] : counts[m]) {
      AddPoint(tiers[m], m + 1, ExactRational(bid), PointKind::kSurvey, count);
    }
  }
  return Flatten(tiers);
}

PricingResult MaximizeRevenueDp(const SolutionSpace& space,
                                std::span<const SurveyPoint> survey,
                                std::span<const ExactRational> epsilons,
                                PredecessorSearch search) {
  ValidateEpsilons(epsilons);
  ValidateSurvey(survey, static_cast<int>(epsilons.size()));
  PricingResult result;
  if (survey.empty()) {
    result.schedule = ZeroSchedule(epsilons.size(), survey,
                                   PricingMethod::kDealerPlus, true);
    return result;
  }
  if (space.size() != epsilons.size() ||
      std::any_of(space.begin(), space.end(),
                  [](const auto& tier) { return tier.empty(); })) {
    throw Error(ErrorCode::kEmptySolutionSpace,
                "solution space must have candidates for every tier");
  }
  return RunDp(space, survey, epsilons, search, PricingMethod::kDealerPlus);
}

PricingResult MaximizeRevenueDp(std::span<const SurveyPoint> survey,
                                std::span<const ExactRational> epsilons,
                                PredecessorSearch search) {
  return MaximizeRevenueDp(BuildSolutionSpace(survey, epsilons), survey,
                           epsilons, search);
}

PricingResult MaximizeRevenueSurveyOnly(std::span<const SurveyPoint> survey,
                                        std::span<const ExactRational> epsilons) {
  ValidateEpsilons(epsilons);
  const SolutionSpace space =
      SurveyOnlySpace(survey, static_cast<int>(epsilons.size()));
  PricingResult result;
  if (survey.empty()) {
    result.schedule =
        ZeroSchedule(epsilons.size(), survey, PricingMethod::kDealer, true);
    return result;
  }
  if (std::any_of(space.begin(), space.end(),
                  [](const auto& tier) { return tier.empty(); })) {
    result.schedule =
        ZeroSchedule(epsilons.size(), survey, PricingMethod::kDealer, false);
    return result;
  }
  return RunDp(space, survey, epsilons, PredecessorSearch::kSlidingWindow,
               PricingMethod::kDealer);
}

PriceSchedule BaselinePrices(PricingMethod kind,
                             std::span<const SurveyPoint> survey,
                             int num_tiers) {
  if (survey.empty()) {
    throw Error(ErrorCode::kEmptySurvey, "baseline pricing needs survey data");
  }
  if (num_tiers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "at least one tier is required");
  }
  ValidateSurvey(survey, num_tiers);
  std::vector<int64_t> bids;
  for (const SurveyPoint& p : survey) bids.push_back(p.bid.units());
  std::sort(bids.begin(), bids.end());

  std::vector<ExactRational> prices(num_tiers);
  switch (kind) {
    case PricingMethod::kLow:
      prices.assign(num_tiers, ExactRational(bids.front()));
      break;
    case PricingMethod::kHigh:
      prices.assign(num_tiers, ExactRational(bids.back()));
      break;
    case PricingMethod::kMedian:
      prices.assign(num_tiers, ExactRational(bids[(bids.size() - 1) / 2]));
      break;
    case PricingMethod::kLinear: {
      std::optional<int64_t> low, high;
      for (const SurveyPoint& p : survey) {
        if (p.target_model == 1 && (!low || p.bid.units() < *low)) low = p.bid.units();
        if (p.target_model == num_tiers && (!high || p.bid.units() > *high)) {
          high = p.bid.units();
        }
      }
      const ExactRational lo(low.value_or(bids.front()));
      const ExactRational hi(high.value_or(bids.back()));
      for (int m = 0; m < num_tiers; ++m) {
        prices[m] = num_tiers == 1
                        ? lo
                        : lo + (hi - lo) * ExactRational(m, num_tiers - 1);
      }
      break;
    }
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "not a baseline pricing method: " + std::string(ToString(kind)));
  }
  return MakeSchedule(std::move(prices), survey, kind);
}

RevenueSummary RevenueAndAffordability(std::span<const ExactRational> prices,
                                       std::span<const SurveyPoint> survey) {
  const int num_tiers = static_cast<int>(prices.size());
  ValidateSurvey(survey, num_tiers);
  RevenueSummary s;
  s.tier_revenue.assign(num_tiers, ExactRational(0));
  s.tier_buyers.assign(num_tiers, 0);
  s.tier_affordable.assign(num_tiers, 0);
  for (const SurveyPoint& p : survey) {
    const int m = p.target_model - 1;
    ++s.buyers;
    ++s.tier_buyers[m];
    if (prices[m] <= ExactRational(p.bid.units())) {
      ++s.affordable;
      ++s.tier_affordable[m];
      s.tier_revenue[m] += prices[m];
      s.revenue += prices[m];
    }
  }
  if (s.buyers > 0) {
    s.affordability_ratio =
        static_cast<double>(s.affordable) / static_cast<double>(s.buyers);
  }
  return s;
}

RevenueSummary RevenueAndAffordability(std::span<const Money> prices,
                                       std::span<const SurveyPoint> survey) {
  std::vector<ExactRational> exact;
  for (Money p : prices) exact.emplace_back(p.units());
  return RevenueAndAffordability(exact, survey);
}

ArbitrageReport CheckArbitrageFree(std::span<const ExactRational> prices,
                                   std::span<const ExactRational> epsilons) {
  if (prices.size() != epsilons.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one price per tier is required");
  }
  ArbitrageReport report;
  const size_t n = prices.size();
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      if (epsilons[a] >= epsilons[b]) continue;
      const std::string pair =
          "tiers " + std::to_string(a + 1) + "," + std::to_string(b + 1);
      if (prices[a] > prices[b]) {
        report.monotone = false;
        report.violations.push_back("monotonicity: " + pair + " price " +
                                    prices[a].ToString() + " > " +
                                    prices[b].ToString());
      }
      if (prices[b] / epsilons[b] > prices[a] / epsilons[a]) {
        report.relaxed_subadditive = false;
        report.violations.push_back(
            "unit price: " + pair + " " + (prices[a] / epsilons[a]).ToString() +
            " < " + (prices[b] / epsilons[b]).ToString());
      }
    }
  }
  const auto triples = SumTriples(epsilons);
  for (size_t c = 0; c < n; ++c) {
    for (const auto& [a, b] : triples[c]) {
      if (prices[a] + prices[b] < prices[c]) {
        report.sum_subadditive = false;
        report.violations.push_back(
            "subadditivity: p" + std::to_string(a + 1) + " + p" +
            std::to_string(b + 1) + " < p" + std::to_string(c + 1));
      }
    }
  }
  return report;
}

PriceSchedule RrmBruteForceOverSpace(const SolutionSpace& space,
                                     std::span<const SurveyPoint> survey,
                                     std::span<const ExactRational> epsilons) {
  ValidateEpsilons(epsilons);
  ValidateSurvey(survey, static_cast<int>(epsilons.size()));
  if (survey.empty()) {
    return ZeroSchedule(epsilons.size(), survey, PricingMethod::kDealerPlus, true);
  }
  if (space.size() != epsilons.size()) {
    throw Error(ErrorCode::kEmptySolutionSpace, "space/tier count mismatch");
  }
  return Exhaust(space, survey, PricingMethod::kDealerPlus,
                 [&](size_t m, const std::vector<ExactRational>& p) {
                   if (m == 0) return true;
                   return p[m - 1] <= p[m] &&
                          p[m] / epsilons[m] <= p[m - 1] / epsilons[m - 1];
                 });
}

PriceSchedule RrmBruteForce(std::span<const SurveyPoint> survey,
                            std::span<const ExactRational> epsilons) {
  return RrmBruteForceOverSpace(BuildSolutionSpace(survey, epsilons), survey,
                                epsilons);
}

PriceSchedule RmBruteForce(std::span<const SurveyPoint> survey,
                           std::span<const ExactRational> epsilons) {
  const SolutionSpace space = BuildSolutionSpace(survey, epsilons);
  if (survey.empty()) {
    return ZeroSchedule(epsilons.size(), survey, PricingMethod::kDealerPlus, true);
  }
  const auto triples = SumTriples(epsilons);
  return Exhaust(space, survey, PricingMethod::kDealerPlus,
                 [&](size_t m, const std::vector<ExactRational>& p) {
                   if (m > 0 && p[m - 1] > p[m]) return false;
                   for (const auto& [a, b] : triples[m]) {
                     if (p[a] + p[b] < p[m]) return false;
                   }
                   return true;
                 });
}

}  // namespace datamarket
