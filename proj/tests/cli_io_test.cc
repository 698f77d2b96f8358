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

#include "datamarket/cli_io.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "datamarket/errors.h"
#include "test_support.h"

namespace datamarket {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

constexpr char kOwners[] =
    "id,x1,x2,label,eps_prefer,curve,rho,mode\n"
    "1,0.5,-0.25,1,2.5,linear,0.1,hard\n"
    "2,0.125,0.75,-1,1,convex,0.2;0.3,negotiable\n";

TEST(OwnersCsvTest, Parses) {
  const auto owners = ParseOwnersCsv(kOwners);
  ASSERT_EQ(owners.size(), 2u);
  EXPECT_EQ(owners[0].id, 1);
  EXPECT_EQ(owners[0].sample.features, (std::vector<double>{0.5, -0.25}));
  EXPECT_EQ(owners[0].sample.label, 1.0);
  EXPECT_EQ(owners[0].mode, RestrictionMode::kHard);
  EXPECT_EQ(owners[1].curve, CompensationCurve::kConvex);
  EXPECT_EQ(owners[1].rho, (std::vector<double>{0.2, 0.3}));
  EXPECT_EQ(owners[1].mode, RestrictionMode::kNegotiable);
}

TEST(OwnersCsvTest, RoundTrips) {
  const auto owners = ParseOwnersCsv(kOwners);
  const std::string text = OwnersToCsv(owners);
  const auto again = ParseOwnersCsv(text);
  ASSERT_EQ(again.size(), owners.size());
  for (size_t i = 0; i < owners.size(); ++i) {
    EXPECT_EQ(again[i].id, owners[i].id);
    EXPECT_EQ(again[i].sample.features, owners[i].sample.features);
    EXPECT_EQ(again[i].eps_prefer, owners[i].eps_prefer);
    EXPECT_EQ(again[i].rho, owners[i].rho);
  }
  EXPECT_EQ(OwnersToCsv(again), text);
}

TEST(OwnersCsvTest, ZeroLabelMeansNegative) {
  const auto owners = ParseOwnersCsv(
      "x,label,eps_prefer,curve,rho,mode\n0.1,0,1,linear,0,hard\n");
  EXPECT_EQ(owners[0].sample.label, -1.0);
  EXPECT_EQ(owners[0].id, 1);
}

TEST(OwnersCsvTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseOwnersCsv(""); }), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseOwnersCsv("x,label,eps_prefer,curve,rho,mode\n0.1,2,1,linear,0,hard\n");
            }),
            ErrorCode::kInvalidLabel);
  const std::string bad_number = MessageOf([] {
    ParseOwnersCsv("x,label,eps_prefer,curve,rho,mode\n0.1,1,1,linear,0,hard\nabc,1,1,linear,0,hard\n");
  });
  EXPECT_NE(bad_number.find("line 3"), std::string::npos) << bad_number;
  EXPECT_NE(bad_number.find("column 'x'"), std::string::npos) << bad_number;
  EXPECT_EQ(CodeOf([] { ParseOwnersCsv("x,label,eps_prefer,curve,rho\n0.1,1,1,linear,0\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseOwnersCsv("x,label,eps_prefer,curve,rho,mode\nnan,1,1,linear,0,hard\n");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseOwnersCsv("id,x,label,eps_prefer,curve,rho,mode\n"
                             "1,0,1,1,linear,0,hard\n1,0,1,1,linear,0,hard\n");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseOwnersCsv("x,label,eps_prefer,curve,rho,mode\n0.1,1,1,cubic,0,hard\n");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseOwnersCsv("x,label,eps_prefer,curve,rho,mode\n0.1,1,1,linear,0\n");
            }),
            ErrorCode::kParseError);
}

TEST(EvalCsvTest, RoundTrips) {
  const Dataset eval = {{{0.5, 1.0}, 1.0}, {{-0.25, 0.0}, -1.0}};
  const Dataset again = ParseEvalCsv(EvalToCsv(eval));
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].features, eval[0].features);
  EXPECT_EQ(again[1].label, -1.0);
  EXPECT_EQ(CodeOf([] { ParseEvalCsv("x,label\n1,3\n"); }), ErrorCode::kInvalidLabel);
}

TEST(SurveyCsvTest, RoundTripsAndRejectsNegativeBids) {
  const auto survey = testing::WorkedSurvey();
  const auto again = ParseSurveyCsv(SurveyToCsv(survey));
  ASSERT_EQ(again.size(), survey.size());
  for (size_t i = 0; i < survey.size(); ++i) {
    EXPECT_EQ(again[i].target_model, survey[i].target_model);
    EXPECT_EQ(again[i].bid, survey[i].bid);
  }
  EXPECT_EQ(CodeOf([] { ParseSurveyCsv("target_model,bid_units\n1,-3\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseSurveyCsv("target_model,bid_units\n0,3\n"); }),
            ErrorCode::kParseError);
  EXPECT_TRUE(ParseSurveyCsv("target_model,bid_units\n").empty());
}

TEST(ItemsCsvTest, ExtraColumnIsOptional) {
  auto items = ParseItemsCsv("owner_id,shapley,base_units\n4,0.5,120\n");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].owner_id, 4);
  EXPECT_EQ(items[0].base_comp.units(), 120);
  EXPECT_EQ(items[0].extra_comp, Money());
  items = ParseItemsCsv("owner_id,shapley,base_units,extra_units\n4,0.5,120,7\n");
  EXPECT_EQ(items[0].total_cost().units(), 127);
}

TEST(TierListTest, CountOrList) {
  EXPECT_EQ(ParseTierList("3"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(ParseTierList("0.5,1,2"), (std::vector<double>{0.5, 1, 2}));
  EXPECT_THROW(ParseTierList("0"), Error);
  EXPECT_THROW(ParseTierList("a,b"), Error);
}

TEST(ManifestTest, ParsesAndResolvesPaths) {
  const RunManifest m = ParseManifest(R"({
    "seed": 9,
    "tiers": [{"epsilon": 0.5, "budget": "12.50"}, {"epsilon": 2, "budget_units": 900}],
    "loss": {"kind": "least_squares", "lambda": 0.2},
    "shapley": {"permutations": 33},
    "selection": {"solver": "greedy"},
    "data": {"owners": "o.csv", "eval": "/abs/e.csv"}
  })", "/base");
  ASSERT_EQ(m.config.tiers.size(), 2u);
  EXPECT_EQ(m.config.tiers[0].budget.units(), 1250);
  EXPECT_EQ(m.config.tiers[1].budget.units(), 900);
  EXPECT_EQ(m.config.tiers[1].index, 2);
  EXPECT_EQ(m.config.loss.kind, LossKind::kLeastSquares);
  EXPECT_DOUBLE_EQ(m.config.loss.lambda, 0.2);
  EXPECT_EQ(m.config.shapley_permutations, 33);
  EXPECT_EQ(m.config.solver, Solver::kGreedy);
  EXPECT_EQ(m.owners_path, "/base/o.csv");
  EXPECT_EQ(m.eval_path, "/abs/e.csv");
  EXPECT_TRUE(m.survey_path.empty());

  const RunManifest again = ParseManifest(ManifestToJson(m), "");
  EXPECT_EQ(ManifestToJson(again), ManifestToJson(m));
}

TEST(ManifestTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseManifest("{", ""); }), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseManifest(R"({"tiers": [{"epsilon": 1}]})", ""); }),
            ErrorCode::kParseError);
  EXPECT_THROW(ParseManifest(R"({"tiers": [{"epsilon": 1, "budget_units": 5}],
                                 "selection": {"solver": "magic"}})", ""),
               Error);
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kParseError), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kInvalidLabel), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIoError), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kTooManyOwners), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kBudgetTooLargeForTable), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kZeroTotalPrice), 3);
}

TEST(SurveyGeneratorTest, RangesAndCounts) {
  for (SurveyKind kind : {SurveyKind::kIndependentUniform, SurveyKind::kGaussianCounts}) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const auto survey = GenerateSurvey(kind, 10, 100, seed);
      ASSERT_EQ(survey.size(), 100u);
      for (const SurveyPoint& p : survey) {
        ASSERT_GE(p.target_model, 1);
        ASSERT_LE(p.target_model, 10);
        const int64_t shift = 100 * (p.target_model - 1);
        ASSERT_GE(p.bid.units(), (1000 + shift) * 100);
        ASSERT_LE(p.bid.units(), (5000 + shift) * 100);
      }
      EXPECT_EQ(SurveyToCsv(GenerateSurvey(kind, 10, 100, seed)), SurveyToCsv(survey));
    }
  }
  EXPECT_EQ(ParseSurveyKind("gaussian"), SurveyKind::kGaussianCounts);
  EXPECT_THROW(ParseSurveyKind("poisson"), Error);
}

TEST(SurveyGeneratorTest, UniformCountsAreBalanced) {
  std::map<int, int64_t> counts;
  for (const SurveyPoint& p : GenerateSurvey(SurveyKind::kIndependentUniform, 4, 40000, 3)) {
    ++counts[p.target_model];
  }
  for (int m = 1; m <= 4; ++m) EXPECT_NEAR(counts[m], 10000, 400);
}

TEST(GeneratorTest, ClassificationIsBoundedAndBalanced) {
  const Dataset d = GenerateClassification(400, 5, 1.5, 7);
  ASSERT_EQ(d.size(), 400u);
  int positive = 0;
  for (const LabeledSample& z : d) {
    double norm = 0.0;
    for (double x : z.features) norm += x * x;
    EXPECT_LE(norm, 1.0 + 1e-12);
    EXPECT_TRUE(z.label == 1.0 || z.label == -1.0);
    positive += z.label > 0;
  }
  EXPECT_GT(positive, 150);
  EXPECT_LT(positive, 250);
}

TEST(ReportTest, TablesRoundTripAndAreStable) {
  SyntheticMarketSpec spec;
  spec.owners = 10;
  spec.dim = 3;
  spec.eval_size = 50;
  spec.mode = RestrictionMode::kNegotiable;
  const SyntheticMarket m = GenerateMarket(spec, 11);
  PipelineConfig config;
  for (int k = 1; k <= 3; ++k) {
    ModelTier t;
    t.index = k;
    t.epsilon = k;
    t.budget = Money::FromUnits(200000);
    config.tiers.push_back(t);
  }
  config.shapley_permutations = 10;
  const auto survey = GenerateSurvey(SurveyKind::kIndependentUniform, 3, 30, 4);
  const MarketReport r = RunPipeline(config, m.owners, m.eval_set, survey);

  const auto prices = ParsePricesCsv(PricesCsv(r));
  ASSERT_EQ(prices.size(), 3u);
  int64_t revenue = 0, pools = 0;
  for (size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(prices[k].tier, static_cast<int>(k) + 1);
    EXPECT_EQ(prices[k].price_units, r.tiers[k].price.units());
    revenue += prices[k].revenue_units;
    pools += prices[k].pool_units;
  }
  EXPECT_EQ(pools, r.opt_revenue.units());
  EXPECT_LE(revenue, r.opt_revenue.units());

  const auto comp = ParseCompensationCsv(CompensationCsv(r));
  ASSERT_EQ(comp.size(), r.compensation.size());
  int64_t paid = 0;
  for (const CompensationRow& row : comp) {
    EXPECT_EQ(row.total_units, row.base_units + row.extra_units);
    paid += row.total_units;
  }
  EXPECT_EQ(paid, r.distributed.units());

  const auto dir = std::filesystem::temp_directory_path() / "datamarket_cli_io_test";
  std::filesystem::remove_all(dir);
  EmitReport(r, (dir / "a").string());
  EmitReport(RunPipeline(config, m.owners, m.eval_set, survey), (dir / "b").string());
  for (const char* f : {"report.json", "prices.csv", "compensation.csv"}) {
    EXPECT_EQ(ReadFile((dir / "a" / f).string()), ReadFile((dir / "b" / f).string())) << f;
  }
  std::filesystem::remove_all(dir);
}

TEST(FileTest, MissingFileIsAnIoError) {
  EXPECT_EQ(CodeOf([] { ReadFile("/nonexistent/datamarket/file.csv"); }), ErrorCode::kIoError);
}

}  // namespace
}  // namespace datamarket
