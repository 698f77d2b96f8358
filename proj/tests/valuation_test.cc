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
#include <random>

#include <gtest/gtest.h>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

std::vector<OwnerId> Ids(size_t n) {
  std::vector<OwnerId> ids(n);
  std::iota(ids.begin(), ids.end(), OwnerId{1});
  return ids;
}

FunctionOracle Additive(std::vector<double> c) {
  return FunctionOracle([c](std::span<const OwnerId> s) {
    double u = 0.0;
    for (OwnerId id : s) u += c[id - 1];
    return u;
  });
}

// Reference values by averaging marginals over all n! orderings.
std::vector<double> PermutationShapley(size_t n, const UtilityOracle& oracle) {
  std::vector<OwnerId> order = Ids(n);
  std::vector<double> sum(n, 0.0);
  double count = 0.0;
  do {
    std::vector<OwnerId> prefix;
    double prev = oracle.Evaluate(prefix);
    for (OwnerId id : order) {
      prefix.push_back(id);
      std::vector<OwnerId> sorted = prefix;
      std::sort(sorted.begin(), sorted.end());
      const double u = oracle.Evaluate(sorted);
      sum[id - 1] += u - prev;
      prev = u;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : sum) v /= count;
  return sum;
}

// Random game on n players: a utility table indexed by bitmask.
FunctionOracle RandomGame(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> table(size_t{1} << n);
  for (double& t : table) t = u(rng);
  return FunctionOracle([table](std::span<const OwnerId> s) {
    size_t mask = 0;
    for (OwnerId id : s) mask |= size_t{1} << (id - 1);
    return table[mask];
  });
}

TEST(ExactShapleyTest, AdditiveGame) {
  const auto oracle = Additive({0.1, 0.2, 0.3});
  const ShapleyReport r = ExactShapley(Ids(3), oracle);
  EXPECT_TRUE(r.exact);
  ASSERT_EQ(r.values.size(), 3u);
  EXPECT_NEAR(r.values[0], 0.1, 1e-12);
  EXPECT_NEAR(r.values[1], 0.2, 1e-12);
  EXPECT_NEAR(r.values[2], 0.3, 1e-12);
}

TEST(ExactShapleyTest, UnanimityGameSplitsEvenly) {
  const FunctionOracle both([](std::span<const OwnerId> s) { return s.size() == 2 ? 1.0 : 0.0; });
  const ShapleyReport r = ExactShapley(Ids(2), both);
  EXPECT_DOUBLE_EQ(r.values[0], 0.5);
  EXPECT_DOUBLE_EQ(r.values[1], 0.5);
}

TEST(ExactShapleyTest, NearestNeighbourAccuracyMatchesPermutationAverage) {
  // Five owners on a line, ten evaluation points; utility is the accuracy
  // of the 1-nearest-neighbour rule built from the coalition (empty: +1).
  const std::vector<std::pair<double, double>> owners = {
      {-2.0, -1}, {-0.5, -1}, {0.3, 1}, {1.1, 1}, {2.5, -1}};
  const std::vector<std::pair<double, double>> eval = {
      {-3, -1}, {-1.5, -1}, {-1, -1}, {-0.2, -1}, {0.1, 1},
      {0.6, 1}, {1.4, 1},  {2.0, 1},  {2.8, -1}, {3.5, -1}};
  const FunctionOracle knn([&](std::span<const OwnerId> s) {
    int correct = 0;
    for (auto [x, y] : eval) {
      double label = 1.0, best = INFINITY;
      for (OwnerId id : s) {
        const double d = std::abs(owners[id - 1].first - x);
        if (d < best) best = d, label = owners[id - 1].second;
      }
      correct += (label == y);
    }
    return correct / 10.0;
  });
  const ShapleyReport r = ExactShapley(Ids(5), knn);
  const std::vector<double> ref = PermutationShapley(5, knn);
  for (size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.values[i], ref[i], 1e-12);
  const double total = std::accumulate(r.values.begin(), r.values.end(), 0.0);
  EXPECT_NEAR(total, r.utility_full - r.utility_empty, 1e-12);
}

TEST(ExactShapleyTest, AxiomsOnRandomGames) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const size_t n = 2 + seed % 7;
    const auto oracle = RandomGame(n, seed);
    const ShapleyReport r = ExactShapley(Ids(n), oracle);
    const double total = std::accumulate(r.values.begin(), r.values.end(), 0.0);
    const double gap = r.utility_full - r.utility_empty;
    EXPECT_LE(std::abs(total - gap), 1e-9 * std::max(1.0, std::abs(gap)));
    if (n <= 6) {
      const std::vector<double> ref = PermutationShapley(n, oracle);
      for (size_t i = 0; i < n; ++i) EXPECT_NEAR(r.values[i], ref[i], 1e-12);
    }
  }
}

TEST(ExactShapleyTest, SymmetricAndNullPlayers) {
  // Owners 1 and 2 are interchangeable; owner 3 never changes anything.
  const FunctionOracle game([](std::span<const OwnerId> s) {
    int k = 0;
    for (OwnerId id : s) k += (id != 3);
    return k == 0 ? 0.2 : (k == 1 ? 0.5 : 0.9);
  });
  const ShapleyReport r = ExactShapley(Ids(3), game);
  EXPECT_NEAR(r.values[0], r.values[1], 1e-12);
  EXPECT_NEAR(r.values[2], 0.0, 1e-15);
}

TEST(ExactShapleyTest, Guards) {
  const auto oracle = Additive(std::vector<double>(21, 0.01));
  try {
    ExactShapley(Ids(21), oracle);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyOwners);
  }
  const std::vector<OwnerId> dup = {1, 1};
  EXPECT_THROW(ExactShapley(dup, oracle), Error);
  const ShapleyReport none = ExactShapley({}, oracle);
  EXPECT_TRUE(none.values.empty());
}

TEST(MonteCarloShapleyTest, AdditiveGameIsExactForAnyCount) {
  const auto oracle = Additive({0.1, 0.2, 0.3});
  for (int64_t perms : {1, 7, 100}) {
    MonteCarloOptions opt;
    opt.permutations = perms;
    opt.seed = 42;
    const ShapleyReport r = MonteCarloShapley(Ids(3), oracle, opt);
    EXPECT_EQ(r.permutations_used, perms);
    EXPECT_NEAR(r.values[0], 0.1, 1e-12);
    EXPECT_NEAR(r.values[1], 0.2, 1e-12);
    EXPECT_NEAR(r.values[2], 0.3, 1e-12);
  }
}

TEST(MonteCarloShapleyTest, SinglePermutationGivesItsMarginals) {
  // U(S) = (|S|/4)^2: the k-th owner in any ordering adds (2k-1)/16.
  const FunctionOracle sq([](std::span<const OwnerId> s) {
    const double f = s.size() / 4.0;
    return f * f;
  });
  MonteCarloOptions opt;
  opt.permutations = 1;
  opt.seed = 9;
  ShapleyReport r = MonteCarloShapley(Ids(4), sq, opt);
  std::vector<double> v = r.values;
  std::sort(v.begin(), v.end());
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(v[k], (2 * k + 1) / 16.0, 1e-15);
}

TEST(MonteCarloShapleyTest, WithinThreeStandardErrorsOfExact) {
  const auto oracle = RandomGame(8, 123);
  const ShapleyReport exact = ExactShapley(Ids(8), oracle);
  MonteCarloOptions opt;
  opt.permutations = 2000;
  opt.seed = 5;
  const ShapleyReport mc = MonteCarloShapley(Ids(8), oracle, opt);
  for (size_t i = 0; i < 8; ++i) {
    const double se = mc.marginal_stddev[i] / std::sqrt(2000.0);
    EXPECT_LE(std::abs(mc.values[i] - exact.values[i]), 3.0 * se + 1e-12) << i;
  }
}

TEST(MonteCarloShapleyTest, DeterministicAndCheckpointed) {
  const auto oracle = RandomGame(6, 7);
  MonteCarloOptions opt;
  opt.permutations = 200;
  opt.seed = 3;
  const ShapleyReport a = MonteCarloShapley(Ids(6), oracle, opt);
  const ShapleyReport b = MonteCarloShapley(Ids(6), oracle, opt);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.checkpoints.size(), 20u);
  EXPECT_EQ(a.checkpoints.back(), 200);
  EXPECT_EQ(a.running_mean_history.back(), a.values);
  // Memoisation: at most 2^6 distinct coalitions are ever evaluated.
  EXPECT_LE(a.oracle_calls, 64);
}

TEST(MonteCarloShapleyTest, RunningMeanSettles) {
  const auto oracle = Additive({0.05, 0.15, 0.25, 0.35});
  MonteCarloOptions opt;
  opt.permutations = 500;
  opt.seed = 1;
  opt.checkpoint_every = 10;
  const ShapleyReport r = MonteCarloShapley(Ids(4), oracle, opt);
  const size_t n = r.running_mean_history.size();
  const size_t tail = std::max<size_t>(2, n / 10);
  double change = 0.0;
  for (size_t k = n - tail + 1; k < n; ++k) {
    for (size_t i = 0; i < 4; ++i) {
      change = std::max(change, std::abs(r.running_mean_history[k][i] -
                                         r.running_mean_history[k - 1][i]));
    }
  }
  EXPECT_LE(change, 1e-9);
}

TEST(MonteCarloShapleyTest, ToleranceStopsEarly) {
  const auto oracle = Additive({0.1, 0.2});
  MonteCarloOptions opt;
  opt.permutations = 1000;
  opt.checkpoint_every = 10;
  opt.relative_tolerance = 1e-6;
  const ShapleyReport r = MonteCarloShapley(Ids(2), oracle, opt);
  EXPECT_EQ(r.permutations_used, 20);
}

TEST(MonteCarloShapleyTest, RandomGamesConverge) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const size_t n = 3 + seed % 6;
    const auto oracle = RandomGame(n, 1000 + seed);
    const ShapleyReport exact = ExactShapley(Ids(n), oracle);
    MonteCarloOptions opt;
    opt.permutations = 5000;
    opt.seed = seed;
    const ShapleyReport mc = MonteCarloShapley(Ids(n), oracle, opt);
    double mae = 0.0;
    for (size_t i = 0; i < n; ++i) mae += std::abs(mc.values[i] - exact.values[i]);
    EXPECT_LE(mae / n, 0.02);
  }
}

TEST(MonteCarloShapleyTest, RejectsZeroPermutations) {
  MonteCarloOptions opt;
  opt.permutations = 0;
  EXPECT_THROW(MonteCarloShapley(Ids(2), Additive({1, 2}), opt), Error);
}

Dataset Blobs(int n, double gap, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    const double y = (i % 2) ? 1.0 : -1.0;
    d.push_back({{y * gap + u(rng), u(rng)}, y});
  }
  return d;
}

TEST(UtilityAccuracyTest, EmptyCoalitionScoresMajorityRate) {
  Dataset eval;
  for (int i = 0; i < 10; ++i) eval.push_back({{0.0}, i < 6 ? 1.0 : -1.0});
  EXPECT_DOUBLE_EQ(UtilityAccuracy({}, eval, LossSpec{}, 0), 0.6);
  for (auto& s : eval) s.label = -s.label;
  EXPECT_DOUBLE_EQ(UtilityAccuracy({}, eval, LossSpec{}, 0), 0.6);
}

TEST(UtilityAccuracyTest, SeparableBlobs) {
  const Dataset train = Blobs(40, 0.6, 1);
  const Dataset eval = Blobs(40, 0.6, 2);
  LossSpec loss;
  loss.lambda = 1e-3;
  EXPECT_DOUBLE_EQ(UtilityAccuracy(train, eval, loss, 0), 1.0);
  const Dataset one = {eval.front()};
  EXPECT_DOUBLE_EQ(UtilityAccuracy(train, one, loss, 0), 1.0);
  try {
    UtilityAccuracy(train, {}, loss, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyEvalSet);
  }
}

TEST(AccuracyOracleTest, IdenticalSamplesGetEqualValues) {
  std::vector<DataOwner> owners(4);
  const Dataset data = Blobs(4, 0.6, 3);
  for (int i = 0; i < 4; ++i) {
    owners[i].id = i + 1;
    owners[i].sample = data[i];
  }
  owners[3].sample = owners[2].sample;
  const AccuracyOracle oracle(owners, Blobs(20, 0.6, 4), LossSpec{}, 0);
  const ShapleyReport r = ExactShapley(Ids(4), oracle);
  EXPECT_NEAR(r.values[2], r.values[3], 1e-12);
  const std::vector<OwnerId> unknown = {99};
  EXPECT_THROW(oracle.Evaluate(unknown), Error);
}

}  // namespace
}  // namespace datamarket
