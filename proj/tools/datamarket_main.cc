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

// Command-line front end: value, select, price, run and gen.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "datamarket/allocation.h"
#include "datamarket/cli_io.h"
#include "datamarket/errors.h"
#include "datamarket/pipeline.h"
#include "datamarket/pricing.h"
#include "datamarket/random.h"
#include "datamarket/valuation.h"

namespace dm = datamarket;

namespace {

void Emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    dm::WriteFile(out, text);
  }
}

struct ValueArgs {
  std::string config, owners, eval, out;
  int tier = 0;
  int64_t permutations = 1000;
  std::optional<uint64_t> seed;
  bool exact = false;
};

int RunValue(const ValueArgs& a) {
  std::vector<dm::DataOwner> owners;
  dm::Dataset eval;
  dm::LossSpec loss;
  uint64_t seed = a.seed.value_or(0);
  double tolerance = 1e-6;
  std::vector<dm::OwnerId> ids;
  if (!a.config.empty()) {
    const dm::RunManifest m = dm::LoadManifest(a.config);
    owners = dm::IngestDataset(m.owners_path);
    eval = dm::IngestEvalSet(m.eval_path);
    loss = m.config.loss;
    tolerance = m.config.valuation_tolerance;
    if (!a.seed) seed = m.config.shapley_seed;
    if (a.tier > 0) {
      if (a.tier > static_cast<int>(m.config.tiers.size())) {
        throw dm::Error(dm::ErrorCode::kInvalidArgument, "no such tier");
      }
      ids = dm::EligibleOwnerIds(owners, m.config.tiers[a.tier - 1]);
    }
  } else {
    if (a.owners.empty() || a.eval.empty()) {
      throw dm::Error(dm::ErrorCode::kInvalidArgument,
                      "value needs --config or both --owners and --eval");
    }
    owners = dm::IngestDataset(a.owners);
    eval = dm::IngestEvalSet(a.eval);
  }
  if (ids.empty() && a.tier == 0) {
    for (const dm::DataOwner& o : owners) ids.push_back(o.id);
  }
  const dm::AccuracyOracle oracle(owners, eval, loss, seed, tolerance);
  dm::ShapleyReport report;
  if (a.exact) {
    report = dm::ExactShapley(ids, oracle);
  } else {
    dm::MonteCarloOptions options;
    options.permutations = a.permutations;
    options.seed = seed;
    report = dm::MonteCarloShapley(ids, oracle, options);
  }
  Emit(a.out, dm::ShapleyReportJson(report));
  return dm::kExitOk;
}

struct SelectArgs {
  std::string items, solver = "dp", out;
  int64_t budget_units = 0;
  double alpha = 0.5;
};

int RunSelect(const SelectArgs& a) {
  const std::vector<dm::CompItem> items = dm::ParseItemsCsv(dm::ReadFile(a.items));
  if (a.budget_units < 0) {
    throw dm::Error(dm::ErrorCode::kInvalidArgument, "budget must be non-negative");
  }
  const dm::SelectionResult r =
      dm::SolveBcmvp(dm::ParseSolver(a.solver), items,
                     dm::Money::FromUnits(a.budget_units), a.alpha);
  Emit(a.out, dm::SelectionJson(r));
  return dm::kExitOk;
}

struct PriceArgs {
  std::string survey, tiers = "3", method = "complete_dp", out;
};

int RunPrice(const PriceArgs& a) {
  const std::vector<dm::SurveyPoint> survey = dm::IngestSurvey(a.survey);
  const std::vector<dm::ExactRational> eps =
      dm::ExactEpsilons(dm::ParseTierList(a.tiers));
  const int num_tiers = static_cast<int>(eps.size());
  dm::PriceSchedule schedule;
  switch (dm::ParsePricingMethod(a.method)) {
    case dm::PricingMethod::kDealerPlus:
      schedule = dm::MaximizeRevenueDp(survey, eps).schedule;
      break;
    case dm::PricingMethod::kDealer:
      schedule = dm::MaximizeRevenueSurveyOnly(survey, eps).schedule;
      break;
    default:
      schedule = dm::BaselinePrices(dm::ParsePricingMethod(a.method), survey, num_tiers);
      break;
  }
  Emit(a.out, dm::PricingJson(schedule, survey));
  return dm::kExitOk;
}

struct RunArgs {
  std::string config, out, solver;
  std::optional<uint64_t> seed;
  std::optional<int64_t> permutations;
};

int RunPipelineCommand(const RunArgs& a) {
  dm::RunManifest m = dm::LoadManifest(a.config);
  if (a.seed) {
    m.seed = *a.seed;
    m.config.shapley_seed = dm::MixSeed(m.seed, 1);
    m.config.training_seed = dm::MixSeed(m.seed, 2);
  }
  if (!a.solver.empty()) m.config.solver = dm::ParseSolver(a.solver);
  if (a.permutations) m.config.shapley_permutations = *a.permutations;
  const std::vector<dm::DataOwner> owners = dm::IngestDataset(m.owners_path);
  const dm::Dataset eval = dm::IngestEvalSet(m.eval_path);
  std::vector<dm::SurveyPoint> survey;
  if (!m.survey_path.empty()) survey = dm::IngestSurvey(m.survey_path);
  const dm::MarketReport report = dm::RunPipeline(m.config, owners, eval, survey);
  dm::EmitReport(report, a.out);
  std::cout << "revenue " << report.opt_revenue.ToString() << ", distributed "
            << report.distributed.ToString() << ", report in " << a.out << "\n";
  return dm::kExitOk;
}

struct GenArgs {
  std::string out, tiers = "3", survey_kind = "uniform", mode = "hard";
  uint64_t seed = 1;
  int64_t survey_total = 100;
  int64_t owners = 40;
  int64_t dim = 5;
  int64_t eval_size = 200;
  int64_t budget_units = 500;
  int64_t permutations = 100;
  double rho = 0.1;
};

int RunGen(const GenArgs& a) {
  const std::vector<double> eps = dm::ParseTierList(a.tiers);
  dm::ExactEpsilons(eps);
  dm::SyntheticMarketSpec spec;
  spec.owners = a.owners;
  spec.dim = a.dim;
  spec.eval_size = a.eval_size;
  spec.rho = a.rho;
  spec.mode = dm::ParseRestrictionMode(a.mode);
  spec.eps_prefer_low = eps.front() / 2;
  spec.eps_prefer_high = eps.back() * 1.5;
  const dm::SyntheticMarket market = dm::GenerateMarket(spec, dm::MixSeed(a.seed, 10));
  const std::vector<dm::SurveyPoint> survey =
      dm::GenerateSurvey(dm::ParseSurveyKind(a.survey_kind),
                         static_cast<int>(eps.size()), a.survey_total,
                         dm::MixSeed(a.seed, 11));

  dm::RunManifest m;
  m.seed = a.seed;
  for (size_t k = 0; k < eps.size(); ++k) {
    dm::ModelTier t;
    t.index = static_cast<int>(k + 1);
    t.epsilon = eps[k];
    t.budget = dm::Money::FromUnits(a.budget_units);
    m.config.tiers.push_back(t);
  }
  m.config.shapley_permutations = a.permutations;
  m.config.shapley_seed = dm::MixSeed(a.seed, 1);
  m.config.training_seed = dm::MixSeed(a.seed, 2);
  m.owners_path = "owners.csv";
  m.eval_path = "eval.csv";
  m.survey_path = "survey.csv";

  std::error_code ec;
  std::filesystem::create_directories(a.out, ec);
  if (ec) throw dm::Error(dm::ErrorCode::kIoError, "cannot create " + a.out);
  const std::filesystem::path dir(a.out);
  dm::WriteFile((dir / "owners.csv").string(), dm::OwnersToCsv(market.owners));
  dm::WriteFile((dir / "eval.csv").string(), dm::EvalToCsv(market.eval_set));
  dm::WriteFile((dir / "survey.csv").string(), dm::SurveyToCsv(survey));
  dm::WriteFile((dir / "config.json").string(), dm::ManifestToJson(m));
  std::cout << "wrote " << market.owners.size() << " owners, "
            << market.eval_set.size() << " evaluation rows and " << survey.size()
            << " survey points to " << a.out << "\n";
  return dm::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data marketplace broker: valuation, selection, private training and pricing"};
  app.require_subcommand(1);

  ValueArgs value;
  auto* v = app.add_subcommand("value", "Shapley values of the data owners");
  v->add_option("--config", value.config, "Run manifest (JSON)");
  v->add_option("--owners", value.owners, "Owner table (CSV)");
  v->add_option("--eval", value.eval, "Evaluation table (CSV)");
  v->add_option("--tier", value.tier, "Restrict to owners eligible for this tier");
  v->add_option("--permutations", value.permutations, "Monte Carlo permutations")
      ->check(CLI::PositiveNumber);
  v->add_option("--seed", value.seed, "Sampling and training seed");
  v->add_flag("--exact", value.exact, "Enumerate every coalition");
  v->add_option("--out", value.out, "Output file (default stdout)");

  SelectArgs select;
  auto* s = app.add_subcommand("select", "Budget-constrained subset selection");
  s->add_option("--items", select.items, "Items table (CSV)")->required();
  s->add_option("--budget-units", select.budget_units, "Budget in minor units")
      ->required();
  s->add_option("--solver", select.solver, "bruteforce, dp, greedy or guess_greedy");
  s->add_option("--alpha", select.alpha, "Guess-and-greedy accuracy in (0, 1)");
  s->add_option("--out", select.out, "Output file (default stdout)");

  PriceArgs price;
  auto* p = app.add_subcommand("price", "Arbitrage-free tier pricing from a survey");
  p->add_option("--survey", price.survey, "Survey table (CSV)")->required();
  p->add_option("--tiers", price.tiers, "Tier epsilons, or a tier count M for 1..M");
  p->add_option("--method", price.method,
                "complete_dp, survey_dp, linear, low, median or high");
  p->add_option("--out", price.out, "Output file (default stdout)");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Full broker pipeline");
  r->add_option("--config", run.config, "Run manifest (JSON)")->required();
  r->add_option("--out", run.out, "Report directory")->required();
  r->add_option("--seed", run.seed, "Override the manifest seed");
  r->add_option("--solver", run.solver, "Override the selection solver");
  r->add_option("--permutations", run.permutations, "Override the permutation count")
      ->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Synthetic owners, evaluation set, survey and manifest");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--tiers", gen.tiers, "Tier epsilons, or a tier count M for 1..M");
  g->add_option("--survey-kind", gen.survey_kind, "uniform or gaussian");
  g->add_option("--survey-total", gen.survey_total, "Number of survey points");
  g->add_option("--owners", gen.owners, "Number of data owners");
  g->add_option("--dim", gen.dim, "Feature dimension");
  g->add_option("--eval-size", gen.eval_size, "Evaluation rows");
  g->add_option("--mode", gen.mode, "hard or negotiable");
  g->add_option("--rho", gen.rho, "Extra compensation rate");
  g->add_option("--budget-units", gen.budget_units, "Per-tier budget in minor units");
  g->add_option("--permutations", gen.permutations, "Shapley permutations in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dm::kExitOk : dm::kExitInputError;
  }

  try {
    if (*v) return RunValue(value);
    if (*s) return RunSelect(select);
    if (*p) return RunPrice(price);
    if (*r) return RunPipelineCommand(run);
    if (*g) return RunGen(gen);
  } catch (const dm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dm::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dm::kExitInputError;
  }
  return dm::kExitInputError;
}
