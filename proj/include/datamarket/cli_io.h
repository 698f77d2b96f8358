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

#ifndef DATAMARKET_CLI_IO_H_
#define DATAMARKET_CLI_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datamarket/allocation.h"
#include "datamarket/errors.h"
#include "datamarket/pipeline.h"
#include "datamarket/pricing.h"
#include "datamarket/types.h"
#include "datamarket/valuation.h"

namespace datamarket {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasible = 3;

int ExitCodeFor(ErrorCode code);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Owner table. Header: [id,] feature columns..., label, eps_prefer, curve,
// rho, mode. Labels are -1/+1 (0 is read as -1). `rho` is one number or a
// ';'-separated list with one value per tier. Without an id column owners
// are numbered from 1 in row order.
std::vector<DataOwner> ParseOwnersCsv(std::string_view text);
std::vector<DataOwner> IngestDataset(const std::string& path);
std::string OwnersToCsv(std::span<const DataOwner> owners);

// Evaluation table. Header: feature columns..., label.
Dataset ParseEvalCsv(std::string_view text);
Dataset IngestEvalSet(const std::string& path);
std::string EvalToCsv(const Dataset& data);

// Survey table. Header: target_model, bid_units.
std::vector<SurveyPoint> ParseSurveyCsv(std::string_view text);
std::vector<SurveyPoint> IngestSurvey(const std::string& path);
std::string SurveyToCsv(std::span<const SurveyPoint> survey);

// BCMVP items. Header: owner_id, shapley, base_units, extra_units.
std::vector<CompItem> ParseItemsCsv(std::string_view text);

// Epsilons from "0.5,1,2"; a lone integer M means 1, 2, ..., M.
std::vector<double> ParseTierList(std::string_view text);

// Everything needed to reproduce a full run. Relative data paths are
// resolved against the manifest's directory.
struct RunManifest {
  PipelineConfig config;
  std::string owners_path;
  std::string eval_path;
  std::string survey_path;  // empty: no survey
  uint64_t seed = 0;
};

// JSON manifest:
//   {"seed": 7,
//    "tiers": [{"epsilon": 1, "budget_units": 5000}, ...],
//    "delta": 1e-6,
//    "loss": {"kind": "logistic", "lambda": 0.01, "lipschitz": 1,
//             "smoothness": 0.25, "radius": 10},
//    "shapley": {"permutations": 200, "seed": 7},
//    "selection": {"solver": "dp", "guess_alpha": 0.5},
//    "training": {"alpha": 0.001, "seed": 7},
//    "data": {"owners": "owners.csv", "eval": "eval.csv",
//             "survey": "survey.csv"}}
// Omitted seeds derive from the global seed.
RunManifest ParseManifest(std::string_view json_text,
                          const std::string& base_dir = "");
RunManifest LoadManifest(const std::string& path);
std::string ManifestToJson(const RunManifest& manifest);

enum class SurveyKind { kIndependentUniform, kGaussianCounts };

std::string_view ToString(SurveyKind kind);
SurveyKind ParseSurveyKind(std::string_view text);

// Per-tier counts are uniform (independent) or proportional to clipped
// Normal(5, 3) draws; tier m bids are uniform over
// [1000 + 100 (m-1), 5000 + 100 (m-1)] major units, drawn at minor-unit
// granularity.
std::vector<SurveyPoint> GenerateSurvey(SurveyKind kind, int num_tiers,
                                        int64_t total, uint64_t seed);

// Two Gaussian classes in d dimensions with centres +/- separation / sqrt(d)
// per coordinate and unit noise, rescaled so every feature vector has norm
// at most 1.
Dataset GenerateClassification(int64_t n, int64_t d, double separation,
                               uint64_t seed);

struct SyntheticMarketSpec {
  int64_t owners = 40;
  int64_t dim = 5;
  int64_t eval_size = 200;
  double separation = 1.5;
  double eps_prefer_low = 0.5;
  double eps_prefer_high = 5.0;
  double rho = 0.1;
  RestrictionMode mode = RestrictionMode::kHard;
};

struct SyntheticMarket {
  std::vector<DataOwner> owners;
  Dataset eval_set;
};

// Curves cycle linear, convex, concave over owners.
SyntheticMarket GenerateMarket(const SyntheticMarketSpec& spec, uint64_t seed);

// Report serialisation. Money is written as integer minor units next to a
// display string; exact prices as "n/d".
std::string ShapleyReportJson(const ShapleyReport& report);
std::string SelectionJson(const SelectionResult& result);
std::string PricingJson(const PriceSchedule& schedule,
                        std::span<const SurveyPoint> survey);
std::string ReportJson(const MarketReport& report);
std::string PricesCsv(const MarketReport& report);
std::string CompensationCsv(const MarketReport& report);

// report.json, prices.csv and compensation.csv inside `dir` (created if
// missing). Throws kIoError.
void EmitReport(const MarketReport& report, const std::string& dir);

struct PriceRow {
  int tier = 1;
  double epsilon = 0.0;
  int64_t price_units = 0;
  std::string price_exact;
  int64_t buyers = 0;
  int64_t affordable = 0;
  int64_t revenue_units = 0;
  std::string revenue_exact;
  bool zero_demand = false;
  int64_t pool_units = 0;
};

struct CompensationRow {
  OwnerId owner = 0;
  int64_t base_units = 0;
  int64_t extra_units = 0;
  int64_t total_units = 0;
  int64_t selection_cost_units = 0;
};

std::vector<PriceRow> ParsePricesCsv(std::string_view text);
std::vector<CompensationRow> ParseCompensationCsv(std::string_view text);

}  // namespace datamarket

#endif  // DATAMARKET_CLI_IO_H_
