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

#include "datamarket/allocation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

// Builds a result from item positions, summing values in position order so
// equal sets always produce bit-identical totals.
SelectionResult Summarize(std::span<const CompItem> items,
                          std::vector<size_t> positions, Solver solver) {
  std::sort(positions.begin(), positions.end());
  SelectionResult r;
  r.solver = solver;
  for (size_t p : positions) {
    r.total_value += ClipShapley(items[p].shapley);
    r.total_cost += items[p].total_cost();
    r.chosen.push_back(items[p].owner_id);
  }
  std::sort(r.chosen.begin(), r.chosen.end());
  return r;
}

// True if `a` should replace `b` as the incumbent best selection.
bool Better(const SelectionResult& a, const SelectionResult& b) {
  if (a.total_value != b.total_value) return a.total_value > b.total_value;
  if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
  return a.chosen < b.chosen;
}

// Density order used by the greedy solvers.
std::vector<size_t> GreedyOrder(std::span<const CompItem> items) {
  std::vector<size_t> order(items.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    const CompItem& a = items[x];
    const CompItem& b = items[y];
    const double va = ClipShapley(a.shapley), vb = ClipShapley(b.shapley);
    const int64_t ca = a.total_cost().units(), cb = b.total_cost().units();
    if (ca == 0 || cb == 0) {
      if (ca == 0 && cb != 0) return true;
      if (cb == 0 && ca != 0) return false;
    } else {
      const double lhs = va * static_cast<double>(cb);
      const double rhs = vb * static_cast<double>(ca);
      if (lhs != rhs) return lhs > rhs;
    }
    if (va != vb) return va > vb;
    return a.owner_id < b.owner_id;
  });
  return order;
}

// Prefix rule: walk `order`, skip positions rejected by `allowed`, stop at
// the first allowed item that does not fit.
template <typename Allowed>
std::vector<size_t> GreedyPrefix(std::span<const CompItem> items,
                                 const std::vector<size_t>& order, Money budget,
                                 Allowed allowed) {
  std::vector<size_t> taken;
  Money spent;
  for (size_t p : order) {
    if (!allowed(p)) continue;
    const Money cost = items[p].total_cost();
    if (cost > budget - spent) break;
    spent += cost;
    taken.push_back(p);
  }
  return taken;
}

uint64_t Binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  long double r = 1.0L;
  for (uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r > static_cast<long double>(std::numeric_limits<uint64_t>::max())
             ? std::numeric_limits<uint64_t>::max()
             : static_cast<uint64_t>(std::llround(r));
}

}  // namespace

std::string_view ToString(Solver solver) {
  switch (solver) {
    case Solver::kBruteForce: return "bruteforce";
    case Solver::kPseudoPolyDp: return "dp";
    case Solver::kGreedy: return "greedy";
    case Solver::kGuessGreedy: return "guess_greedy";
  }
  return "greedy";
}

Solver ParseSolver(std::string_view text) {
  if (text == "bruteforce") return Solver::kBruteForce;
  if (text == "dp") return Solver::kPseudoPolyDp;
  if (text == "greedy") return Solver::kGreedy;
  if (text == "guess_greedy") return Solver::kGuessGreedy;
  throw Error(ErrorCode::kParseError,
              "unknown solver '" + std::string(text) + "'");
}

double ClipShapley(double value) { return value > 0.0 ? value : 0.0; }

std::vector<Money> BaseCompensation(std::span<const double> shapley,
                                    Money budget) {
  long double total = 0.0L;
  for (double v : shapley) total += ClipShapley(v);
  if (!(total > 0.0L)) {
    throw Error(ErrorCode::kAllZeroShapley,
                "no owner has a positive Shapley value");
  }
  const int64_t b = budget.units();
  std::vector<int64_t> units(shapley.size());
  int64_t assigned = 0;
  for (size_t i = 0; i < shapley.size(); ++i) {
    const long double share = ClipShapley(shapley[i]) * static_cast<long double>(b) / total;
    units[i] = std::min<int64_t>(b, static_cast<int64_t>(std::floor(share)));
    assigned += units[i];
  }
  size_t largest = 0;
  for (size_t i = 1; i < shapley.size(); ++i) {
    if (ClipShapley(shapley[i]) >= ClipShapley(shapley[largest])) largest = i;
  }
  // Floating error can overshoot by a unit; take it back from the biggest.
  while (assigned > b) {
    const size_t k = static_cast<size_t>(
        std::max_element(units.begin(), units.end()) - units.begin());
    --units[k];
    --assigned;
  }
  units[largest] += b - assigned;
  std::vector<Money> out;
  out.reserve(units.size());
  for (int64_t u : units) out.push_back(Money::FromUnits(u));
  return out;
}

Money ExtraCompensation(CompensationCurve curve, double rho, Money base_comp,
                        double eps_prefer, double eps_model) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must be finite and >= 0");
  }
  const double gap = std::max(0.0, eps_model - eps_prefer);
  if (gap == 0.0) return Money();
  double factor = gap;
  if (curve == CompensationCurve::kConvex) factor = gap * gap;
  if (curve == CompensationCurve::kConcave) factor = std::sqrt(gap);
  const long double amount =
      static_cast<long double>(rho) * base_comp.units() * factor;
  if (amount >= static_cast<long double>(std::numeric_limits<int64_t>::max())) {
    throw Error(ErrorCode::kOverflow, "extra compensation too large");
  }
  return Money::FromUnits(static_cast<int64_t>(std::floor(amount + 0.5L)));
}

std::vector<OwnerId> EligibleOwnerIds(std::span<const DataOwner> owners,
                                      const ModelTier& tier) {
  std::vector<OwnerId> ids;
  for (const DataOwner& o : owners) {
    if (o.mode == RestrictionMode::kNegotiable || tier.epsilon <= o.eps_prefer) {
      ids.push_back(o.id);
    }
  }
  return ids;
}

std::vector<CompItem> EligibleItems(std::span<const DataOwner> owners,
                                    const ModelTier& tier,
                                    std::span<const double> shapley,
                                    std::span<const Money> base_comp) {
  std::vector<CompItem> items;
  for (const DataOwner& o : owners) {
    if (o.mode == RestrictionMode::kHard && tier.epsilon > o.eps_prefer) {
      continue;
    }
    const size_t k = items.size();
    if (k >= shapley.size() || k >= base_comp.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "shapley/base vectors shorter than the eligible set");
    }
    CompItem item;
    item.owner_id = o.id;
    item.shapley = ClipShapley(shapley[k]);
    item.base_comp = base_comp[k];
    if (o.mode == RestrictionMode::kNegotiable) {
      item.extra_comp =
          ExtraCompensation(o.curve, o.RhoForTier(tier.index - 1),
                            base_comp[k], o.eps_prefer, tier.epsilon);
    }
    items.push_back(item);
  }
  if (items.size() != shapley.size() || items.size() != base_comp.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "shapley/base vectors longer than the eligible set");
  }
  return items;
}

SelectionResult BcmvpBruteForce(std::span<const CompItem> items, Money budget) {
  const size_t n = items.size();
  if (n > kMaxBruteForceItems) {
    throw Error(ErrorCode::kTooManyItems,
                std::to_string(n) + " items exceeds the brute-force limit");
  }
  SelectionResult best = Summarize(items, {}, Solver::kBruteForce);
  std::vector<size_t> positions;
  for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
    int64_t cost = 0;
    double value = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1ULL) {
        cost += items[i].total_cost().units();
        value += ClipShapley(items[i].shapley);
      }
    }
    if (cost > budget.units()) continue;
    if (value < best.total_value ||
        (value == best.total_value && cost > best.total_cost.units())) {
      continue;
    }
    positions.clear();
    for (size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1ULL) positions.push_back(i);
    }
    SelectionResult candidate = Summarize(items, positions, Solver::kBruteForce);
    if (Better(candidate, best)) best = std::move(candidate);
  }
  return best;
}

SelectionResult BcmvpDp(std::span<const CompItem> items, Money budget) {
  const size_t n = items.size();
  int64_t a = budget.units();
  for (const CompItem& it : items) a = std::gcd(a, it.total_cost().units());
  std::vector<size_t> chosen;
  if (a == 0) {
    // Every cost and the budget are zero: everything fits.
    chosen.resize(n);
    std::iota(chosen.begin(), chosen.end(), size_t{0});
    return Summarize(items, chosen, Solver::kPseudoPolyDp);
  }
  const uint64_t columns = static_cast<uint64_t>(budget.units() / a) + 1;
  if (columns > kMaxDpCells / (n + 1)) {
    throw Error(ErrorCode::kBudgetTooLargeForTable,
                "table of " + std::to_string(n + 1) + " x " +
                    std::to_string(columns) + " cells is too large");
  }
  const size_t w = static_cast<size_t>(columns - 1);
  // value[j]: best value within j*a using the items seen so far. take[i][j]
  // records whether row i improved on row i-1 at column j.
  std::vector<double> value(columns, 0.0);
  std::vector<bool> take(n * columns, false);
  std::vector<size_t> weight(n);
  for (size_t i = 0; i < n; ++i) {
    weight[i] = static_cast<size_t>(items[i].total_cost().units() / a);
    if (weight[i] > w) continue;
    const double v = ClipShapley(items[i].shapley);
    for (size_t j = w + 1; j-- > weight[i];) {
      const double candidate = value[j - weight[i]] + v;
      if (candidate > value[j]) {
        value[j] = candidate;
        take[i * columns + j] = true;
      }
    }
  }
  size_t j = w;
  for (size_t i = n; i-- > 0;) {
    if (take[i * columns + j]) {
      chosen.push_back(i);
      j -= weight[i];
    }
  }
  return Summarize(items, chosen, Solver::kPseudoPolyDp);
}

SelectionResult BcmvpGreedy(std::span<const CompItem> items, Money budget) {
  const std::vector<size_t> order = GreedyOrder(items);
  return Summarize(items,
                   GreedyPrefix(items, order, budget, [](size_t) { return true; }),
                   Solver::kGreedy);
}

SelectionResult BcmvpGuessGreedy(std::span<const CompItem> items, Money budget,
                                 double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  const size_t n = items.size();
  const size_t h = static_cast<size_t>(std::ceil(1.0 / alpha - 1e-9));
  uint64_t total = 0;
  for (size_t i = 1; i <= std::min(h, n); ++i) {
    total += Binomial(n, i);
    if (total > kMaxGuessSubsets) {
      throw Error(ErrorCode::kEnumerationTooLarge,
                  "more than " + std::to_string(kMaxGuessSubsets) +
                      " guessed subsets");
    }
  }

  const std::vector<size_t> order = GreedyOrder(items);
  SelectionResult best = Summarize(items, {}, Solver::kGuessGreedy);
  std::vector<size_t> guess;
  std::vector<bool> in_guess(n, false);

  // Depth-first enumeration of guesses in increasing position order.
  auto visit = [&](auto&& self, size_t start, Money cost) -> void {
    if (!guess.empty()) {
      double min_value = std::numeric_limits<double>::infinity();
      for (size_t p : guess) min_value = std::min(min_value, ClipShapley(items[p].shapley));
      std::vector<size_t> picked = GreedyPrefix(
          items, order, budget - cost, [&](size_t p) {
            return !in_guess[p] && ClipShapley(items[p].shapley) <= min_value;
          });
      picked.insert(picked.end(), guess.begin(), guess.end());
      SelectionResult candidate =
          Summarize(items, std::move(picked), Solver::kGuessGreedy);
      if (Better(candidate, best)) best = std::move(candidate);
    }
    if (guess.size() == h) return;
    for (size_t p = start; p < n; ++p) {
      const Money c = items[p].total_cost();
      if (c > budget - cost) continue;
      guess.push_back(p);
      in_guess[p] = true;
      self(self, p + 1, cost + c);
      in_guess[p] = false;
      guess.pop_back();
    }
  };
  visit(visit, 0, Money());
  return best;
}

SelectionResult SolveBcmvp(Solver solver, std::span<const CompItem> items,
                           Money budget, double guess_alpha) {
  switch (solver) {
    case Solver::kBruteForce: return BcmvpBruteForce(items, budget);
    case Solver::kPseudoPolyDp: return BcmvpDp(items, budget);
    case Solver::kGreedy: return BcmvpGreedy(items, budget);
    case Solver::kGuessGreedy: return BcmvpGuessGreedy(items, budget, guess_alpha);
  }
  return BcmvpGreedy(items, budget);
}

}  // namespace datamarket
