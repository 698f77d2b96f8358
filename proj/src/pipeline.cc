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

#include "datamarket/pipeline.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <unordered_map>

#include "datamarket/errors.h"
#include "datamarket/random.h"

namespace datamarket {
namespace {

// Floors each share and hands the missing units to the largest fractional
// parts, lower index first. `fraction(i)` orders the parts.
template <typename FractionLess>
void DistributeRemainder(std::vector<int64_t>& units, int64_t total,
                         FractionLess fraction_less) {
  int64_t assigned = std::accumulate(units.begin(), units.end(), int64_t{0});
  std::vector<size_t> order(units.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return fraction_less(b, a);
  });
  for (size_t k = 0; assigned < total && !order.empty(); ++k) {
    ++units[order[k % order.size()]];
    ++assigned;
  }
}

// Exact shares that sum to `total`.
std::vector<int64_t> SplitExact(int64_t total,
                                const std::vector<ExactRational>& shares) {
  std::vector<int64_t> units;
  std::vector<ExactRational> frac;
  for (const ExactRational& s : shares) {
    units.push_back(s.Floor());
    frac.push_back(s - ExactRational(units.back()));
  }
  DistributeRemainder(units, total,
                      [&](size_t a, size_t b) { return frac[a] < frac[b]; });
  return units;
}

// total * w_i / sum(w), integer weights, exact.
std::vector<int64_t> SplitInteger(int64_t total, std::span<const int64_t> w) {
  __int128 sum = 0;
  for (int64_t x : w) sum += x;
  std::vector<int64_t> units(w.size(), 0);
  std::vector<__int128> rem(w.size(), 0);
  if (sum == 0) return units;
  for (size_t i = 0; i < w.size(); ++i) {
    const __int128 scaled = static_cast<__int128>(total) * w[i];
    units[i] = static_cast<int64_t>(scaled / sum);
    rem[i] = scaled % sum;
  }
  DistributeRemainder(units, total,
                      [&](size_t a, size_t b) { return rem[a] < rem[b]; });
  return units;
}

// total * w_i / sum(w) for real weights; all-zero weights split equally.
std::vector<int64_t> SplitReal(int64_t total, std::span<const double> w) {
  long double sum = 0.0L;
  for (double x : w) sum += ClipShapley(x);
  std::vector<int64_t> units(w.size(), 0);
  if (w.empty()) return units;
  if (!(sum > 0.0L)) {
    const std::vector<int64_t> ones(w.size(), 1);
    return SplitInteger(total, ones);
  }
  std::vector<long double> frac(w.size());
  int64_t assigned = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    const long double exact = total * (ClipShapley(w[i]) / sum);
    units[i] = std::clamp<int64_t>(static_cast<int64_t>(std::floor(exact)), 0,
                                   total);
    frac[i] = exact - units[i];
    assigned += units[i];
  }
  // Rounding can overshoot by a unit or two; take it back from the end.
  for (size_t k = w.size(); assigned > total && k-- > 0;) {
    while (assigned > total && units[k] > 0) {
      --units[k];
      --assigned;
    }
  }
  DistributeRemainder(units, total,
                      [&](size_t a, size_t b) { return frac[a] < frac[b]; });
  return units;
}

Money Units(int64_t u) { return Money::FromUnits(u); }

TierOutcome RunTier(const PipelineConfig& config, size_t m,
                    std::span<const DataOwner> owners, const Dataset& eval_set,
                    const ShapleyReport* reused) {
  TierOutcome out;
  out.tier = config.tiers[m];
  out.eligible = EligibleOwnerIds(owners, out.tier);
  if (out.eligible.empty()) return out;

  if (reused != nullptr) {
    std::unordered_map<OwnerId, double> lookup;
    for (size_t i = 0; i < reused->owners.size(); ++i) {
      lookup.emplace(reused->owners[i], reused->values[i]);
    }
    out.shapley = *reused;
    out.shapley.owners = out.eligible;
    out.shapley.values.clear();
    out.shapley.marginal_stddev.clear();
    out.shapley.running_mean_history.clear();
    out.shapley.checkpoints.clear();
    for (OwnerId id : out.eligible) {
      auto it = lookup.find(id);
      out.shapley.values.push_back(it == lookup.end() ? 0.0 : it->second);
      out.shapley.marginal_stddev.push_back(0.0);
    }
  } else {
    const AccuracyOracle oracle(owners, eval_set, config.loss,
                                config.shapley_seed, config.valuation_tolerance);
    MonteCarloOptions options;
    options.permutations = config.shapley_permutations;
    options.seed = MixSeed(config.shapley_seed, m);
    out.shapley = MonteCarloShapley(out.eligible, oracle, options);
  }

  std::vector<double> clipped;
  for (double v : out.shapley.values) clipped.push_back(ClipShapley(v));
  std::vector<Money> base;
  for (int64_t u : SplitReal(out.tier.budget.units(), clipped)) {
    base.push_back(Units(u));
  }
  out.items = EligibleItems(owners, out.tier, clipped, base);
  out.selection =
      SolveBcmvp(config.solver, out.items, out.tier.budget, config.guess_alpha);
  if (out.selection.chosen.empty()) return out;

  std::unordered_map<OwnerId, const DataOwner*> by_id;
  for (const DataOwner& o : owners) by_id.emplace(o.id, &o);
  Dataset train;
  for (OwnerId id : out.selection.chosen) train.push_back(by_id.at(id)->sample);
  out.model = TrainDpErm(train, config.loss, out.tier.epsilon, out.tier.delta,
                         config.alpha_opt, MixSeed(config.training_seed, m));
  out.model.tier = out.tier;
  out.model.trained_on = out.selection.chosen;
  out.trained = true;
  out.model_accuracy = ClassificationAccuracy(out.model.weights, eval_set);
  out.excess_loss = ExcessLossEstimate(
      static_cast<int64_t>(train.size()),
      static_cast<int64_t>(train.front().features.size()), out.tier.epsilon,
      out.tier.delta);
  return out;
}

}  // namespace

void ValidatePipelineConfig(const PipelineConfig& config) {
  ValidateTiers(config.tiers);
  ValidateLossSpec(config.loss);
  if (config.shapley_permutations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "permutations must be >= 1");
  }
  if (!(config.alpha_opt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_opt must be positive");
  }
  if (config.solver == Solver::kGuessGreedy &&
      !(config.guess_alpha > 0.0 && config.guess_alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "guess_alpha must be in (0, 1)");
  }
}

FinalAllocation AllocateFinalCompensation(
    std::span<const ExactRational> prices, Money opt_revenue,
    std::span<const std::vector<OwnerId>> subsets,
    std::span<const std::vector<double>> shapley,
    std::span<const std::vector<Money>> extra) {
  const size_t num_tiers = prices.size();
  if (subsets.size() != num_tiers || shapley.size() != num_tiers ||
      extra.size() != num_tiers) {
    throw Error(ErrorCode::kDimensionMismatch, "one entry per tier expected");
  }
  ExactRational price_sum(0);
  for (const ExactRational& p : prices) price_sum += p;
  if (price_sum <= ExactRational(0)) {
    throw Error(ErrorCode::kZeroTotalPrice, "all tier prices are zero");
  }

  std::vector<ExactRational> exact_pools;
  const ExactRational revenue(opt_revenue.units());
  for (const ExactRational& p : prices) {
    exact_pools.push_back(p / price_sum * revenue);
  }
  const std::vector<int64_t> pools = SplitExact(opt_revenue.units(), exact_pools);

  FinalAllocation result;
  std::map<OwnerId, CompensationRecord> records;
  for (size_t m = 0; m < num_tiers; ++m) {
    result.tier_pools.push_back(Units(pools[m]));
    const auto& ids = subsets[m];
    if (shapley[m].size() != ids.size() || extra[m].size() != ids.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "tier " + std::to_string(m + 1) + " vectors misaligned");
    }
    if (ids.empty()) continue;
    result.distributed += result.tier_pools[m];

    std::vector<int64_t> owed;
    int64_t owed_total = 0;
    for (Money e : extra[m]) {
      owed.push_back(e.units());
      owed_total += e.units();
    }
    std::vector<int64_t> extra_paid, base_paid;
    if (owed_total <= pools[m]) {
      extra_paid = owed;
      base_paid = SplitReal(pools[m] - owed_total, shapley[m]);
    } else {
      extra_paid = SplitInteger(pools[m], owed);
      base_paid.assign(ids.size(), 0);
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      CompensationRecord& r = records[ids[i]];
      r.owner = ids[i];
      TierShare share{static_cast<int>(m + 1), Units(base_paid[i]),
                      Units(extra_paid[i])};
      r.base += share.base;
      r.extra += share.extra;
      r.total += share.base + share.extra;
      r.tiers.push_back(share);
    }
  }
  for (auto& [id, r] : records) result.records.push_back(std::move(r));
  return result;
}

MarketReport RunPipeline(const PipelineConfig& config,
                         std::span<const DataOwner> owners,
                         const Dataset& eval_set,
                         std::span<const SurveyPoint> survey) {
  ValidatePipelineConfig(config);
  if (owners.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no data owners");
  }
  if (eval_set.empty()) {
    throw Error(ErrorCode::kEmptyEvalSet, "evaluation set is empty");
  }
  const size_t num_tiers = config.tiers.size();
  ValidateSurvey(survey, static_cast<int>(num_tiers));

  MarketReport report;
  report.tiers.resize(num_tiers);
  size_t first = 0;
  const ShapleyReport* reused = nullptr;
  if (config.reuse_tier1_valuations) {
    report.tiers[0] = RunTier(config, 0, owners, eval_set, nullptr);
    if (!report.tiers[0].eligible.empty()) reused = &report.tiers[0].shapley;
    first = 1;
  }
  if (config.parallel_tiers) {
    std::vector<std::future<TierOutcome>> futures;
    for (size_t m = first; m < num_tiers; ++m) {
      futures.push_back(std::async(std::launch::async, RunTier, std::cref(config),
                                   m, owners, std::cref(eval_set), reused));
    }
    for (size_t m = first; m < num_tiers; ++m) {
      report.tiers[m] = futures[m - first].get();
    }
  } else {
    for (size_t m = first; m < num_tiers; ++m) {
      report.tiers[m] = RunTier(config, m, owners, eval_set, reused);
    }
  }

  std::vector<double> raw_eps;
  for (const ModelTier& t : config.tiers) raw_eps.push_back(t.epsilon);
  const std::vector<ExactRational> eps = ExactEpsilons(raw_eps);
  report.schedule = MaximizeRevenueDp(survey, eps).schedule;
  report.revenue = RevenueAndAffordability(report.schedule.exact_prices, survey);
  report.opt_revenue = report.schedule.revenue;

  std::vector<std::vector<OwnerId>> subsets(num_tiers);
  std::vector<std::vector<double>> values(num_tiers);
  std::vector<std::vector<Money>> extras(num_tiers);
  std::map<OwnerId, Money> quoted;
  for (size_t m = 0; m < num_tiers; ++m) {
    TierOutcome& t = report.tiers[m];
    t.exact_price = report.schedule.exact_prices[m];
    t.price = report.schedule.prices[m];
    t.zero_demand = report.schedule.zero_demand[m];
    std::unordered_map<OwnerId, const CompItem*> item_of;
    for (const CompItem& item : t.items) item_of.emplace(item.owner_id, &item);
    for (OwnerId id : t.selection.chosen) {
      const CompItem& item = *item_of.at(id);
      subsets[m].push_back(id);
      values[m].push_back(item.shapley);
      extras[m].push_back(item.extra_comp);
      quoted[id] += item.total_cost();
    }
    report.selection_cost_total += t.selection.total_cost;
  }

  ExactRational price_sum(0);
  for (const ExactRational& p : report.schedule.exact_prices) price_sum += p;
  if (price_sum > ExactRational(0)) {
    FinalAllocation paid = AllocateFinalCompensation(
        report.schedule.exact_prices, report.opt_revenue, subsets, values,
        extras);
    for (size_t m = 0; m < num_tiers; ++m) report.tiers[m].pool = paid.tier_pools[m];
    report.distributed = paid.distributed;
    report.compensation = std::move(paid.records);
  } else {
    for (const auto& [id, cost] : quoted) {
      CompensationRecord r;
      r.owner = id;
      report.compensation.push_back(r);
    }
  }
  for (CompensationRecord& r : report.compensation) r.selection_cost = quoted[r.owner];
  report.deficit = report.opt_revenue < report.selection_cost_total;
  return report;
}

}  // namespace datamarket
