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

// Python bindings. Money crosses the boundary as integer minor units and
// exact prices as fractions.Fraction.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "datamarket/allocation.h"
#include "datamarket/cli_io.h"
#include "datamarket/dp_training.h"
#include "datamarket/errors.h"
#include "datamarket/pipeline.h"
#include "datamarket/pricing.h"
#include "datamarket/valuation.h"

namespace py = pybind11;
namespace dm = datamarket;

namespace {

py::object Fraction(const dm::ExactRational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(r.numerator(), r.denominator());
}

py::list Fractions(const std::vector<dm::ExactRational>& v) {
  py::list out;
  for (const auto& r : v) out.append(Fraction(r));
  return out;
}

std::vector<dm::SurveyPoint> ToSurvey(const std::vector<std::pair<int, int64_t>>& points) {
  std::vector<dm::SurveyPoint> out;
  out.reserve(points.size());
  for (auto [m, bid] : points) out.push_back({m, dm::Money::FromUnits(bid)});
  return out;
}

dm::Dataset ToDataset(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw dm::Error(dm::ErrorCode::kDimensionMismatch, "features and labels differ in length");
  }
  dm::Dataset out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = {x[i], y[i]};
  return out;
}

dm::LossSpec ToLoss(const std::string& kind, double lambda, double lipschitz, double smoothness,
                    double radius) {
  dm::LossSpec s;
  s.kind = dm::ParseLossKind(kind);
  s.lambda = lambda;
  s.lipschitz = lipschitz;
  s.smoothness = smoothness;
  s.radius = radius;
  return s;
}

py::dict ShapleyDict(const dm::ShapleyReport& r) {
  py::dict d;
  d["owners"] = r.owners;
  d["values"] = r.values;
  d["marginal_stddev"] = r.marginal_stddev;
  d["exact"] = r.exact;
  d["permutations_used"] = r.permutations_used;
  d["checkpoints"] = r.checkpoints;
  d["running_mean_history"] = r.running_mean_history;
  d["utility_full"] = r.utility_full;
  d["utility_empty"] = r.utility_empty;
  d["oracle_calls"] = r.oracle_calls;
  return d;
}

py::dict ScheduleDict(const dm::PriceSchedule& s) {
  py::dict d;
  d["method"] = std::string(dm::ToString(s.method));
  d["prices"] = Fractions(s.exact_prices);
  std::vector<int64_t> units;
  for (dm::Money m : s.prices) units.push_back(m.units());
  d["price_units"] = units;
  d["revenue"] = Fraction(s.exact_revenue);
  d["revenue_units"] = s.revenue.units();
  d["zero_demand"] = s.zero_demand;
  d["feasible"] = s.feasible;
  return d;
}

py::dict PricingDict(const dm::PricingResult& r) {
  py::dict d = ScheduleDict(r.schedule);
  py::list opt;
  for (const auto& row : r.opt) {
    py::list cells;
    for (const auto& cell : row) cells.append(cell ? Fraction(*cell) : py::none());
    opt.append(cells);
  }
  d["opt"] = opt;
  d["cell_updates"] = r.cell_updates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_datamarket, m) {
  m.doc() = "Data marketplace broker: valuation, selection, private training and pricing";
  py::register_exception<dm::Error>(m, "DatamarketError", PyExc_ValueError);

  m.def(
      "exact_shapley",
      [](const std::vector<dm::OwnerId>& owners,
         const std::function<double(std::vector<dm::OwnerId>)>& utility) {
        const dm::FunctionOracle oracle([&](std::span<const dm::OwnerId> s) {
          return utility(std::vector<dm::OwnerId>(s.begin(), s.end()));
        });
        return ShapleyDict(dm::ExactShapley(owners, oracle));
      },
      py::arg("owners"), py::arg("utility"),
      "Shapley values by full enumeration; utility maps a sorted id list to a float.");

  m.def(
      "monte_carlo_shapley",
      [](const std::vector<dm::OwnerId>& owners,
         const std::function<double(std::vector<dm::OwnerId>)>& utility, int64_t permutations,
         uint64_t seed, int64_t checkpoint_every, double relative_tolerance) {
        const dm::FunctionOracle oracle([&](std::span<const dm::OwnerId> s) {
          return utility(std::vector<dm::OwnerId>(s.begin(), s.end()));
        });
        dm::MonteCarloOptions o;
        o.permutations = permutations;
        o.seed = seed;
        o.checkpoint_every = checkpoint_every;
        o.relative_tolerance = relative_tolerance;
        return ShapleyDict(dm::MonteCarloShapley(owners, oracle, o));
      },
      py::arg("owners"), py::arg("utility"), py::arg("permutations") = 1000,
      py::arg("seed") = 0, py::arg("checkpoint_every") = 0, py::arg("relative_tolerance") = 0.0);

  m.def(
      "solve_bcmvp",
      [](const std::vector<std::tuple<dm::OwnerId, double, int64_t, int64_t>>& items,
         int64_t budget_units, const std::string& solver, double alpha) {
        std::vector<dm::CompItem> v;
        for (const auto& [id, sv, base, extra] : items) {
          v.push_back({id, sv, dm::Money::FromUnits(base), dm::Money::FromUnits(extra)});
        }
        const dm::SelectionResult r = dm::SolveBcmvp(dm::ParseSolver(solver), v,
                                                     dm::Money::FromUnits(budget_units), alpha);
        py::dict d;
        d["chosen"] = r.chosen;
        d["total_value"] = r.total_value;
        d["total_cost_units"] = r.total_cost.units();
        d["solver"] = std::string(dm::ToString(r.solver));
        return d;
      },
      py::arg("items"), py::arg("budget_units"), py::arg("solver") = "dp",
      py::arg("alpha") = 0.5,
      "Items are (owner_id, shapley, base_units, extra_units) tuples.");

  m.def(
      "noise_scales",
      [](double lipschitz, double lam, double epsilon, double delta, double alpha) {
        const dm::NoiseScales s = dm::ComputeNoiseScales(lipschitz, lam, epsilon, delta, alpha);
        return std::make_pair(s.sigma1, s.sigma2);
      },
      py::arg("lipschitz"), py::arg("lam"), py::arg("epsilon"), py::arg("delta"),
      py::arg("alpha"));

  m.def(
      "train_dp_erm",
      [](const std::vector<std::vector<double>>& x, const std::vector<double>& y,
         double epsilon, double delta, double alpha, uint64_t seed, const std::string& loss,
         double lam, double lipschitz, double smoothness, double radius) {
        const dm::DPModel model = dm::TrainDpErm(
            ToDataset(x, y), ToLoss(loss, lam, lipschitz, smoothness, radius), epsilon, delta,
            alpha, seed);
        py::dict d;
        d["weights"] = model.weights;
        d["sigma1"] = model.noise.sigma1;
        d["sigma2"] = model.noise.sigma2;
        d["gap_bound"] = model.gap_bound;
        return d;
      },
      py::arg("features"), py::arg("labels"), py::arg("epsilon"),
      py::arg("delta") = dm::kDefaultDelta, py::arg("alpha") = 1e-3, py::arg("seed") = 0,
      py::arg("loss") = "logistic", py::arg("lam") = 0.01, py::arg("lipschitz") = 1.0,
      py::arg("smoothness") = 0.25, py::arg("radius") = 10.0);

  m.def(
      "classification_accuracy",
      [](const std::vector<double>& w, const std::vector<std::vector<double>>& x,
         const std::vector<double>& y) { return dm::ClassificationAccuracy(w, ToDataset(x, y)); },
      py::arg("weights"), py::arg("features"), py::arg("labels"));

  m.def(
      "maximize_revenue",
      [](const std::vector<std::pair<int, int64_t>>& survey, const std::vector<double>& epsilons,
         bool survey_only, bool scan) {
        const auto s = ToSurvey(survey);
        const auto eps = dm::ExactEpsilons(epsilons);
        if (survey_only) return PricingDict(dm::MaximizeRevenueSurveyOnly(s, eps));
        return PricingDict(dm::MaximizeRevenueDp(
            s, eps, scan ? dm::PredecessorSearch::kScan : dm::PredecessorSearch::kSlidingWindow));
      },
      py::arg("survey"), py::arg("epsilons"), py::arg("survey_only") = false,
      py::arg("scan") = false,
      "Survey points are (tier, bid_units) pairs; tiers are 1-based.");

  m.def(
      "baseline_prices",
      [](const std::string& method, const std::vector<std::pair<int, int64_t>>& survey,
         int num_tiers) {
        return ScheduleDict(
            dm::BaselinePrices(dm::ParsePricingMethod(method), ToSurvey(survey), num_tiers));
      },
      py::arg("method"), py::arg("survey"), py::arg("num_tiers"));

  m.def(
      "solution_space_sizes",
      [](const std::vector<std::pair<int, int64_t>>& survey, const std::vector<double>& epsilons) {
        std::vector<size_t> sizes;
        for (const auto& tier :
             dm::BuildSolutionSpace(ToSurvey(survey), dm::ExactEpsilons(epsilons))) {
          sizes.push_back(tier.size());
        }
        return sizes;
      },
      py::arg("survey"), py::arg("epsilons"));

  m.def(
      "generate_survey",
      [](const std::string& kind, int num_tiers, int64_t total, uint64_t seed) {
        std::vector<std::pair<int, int64_t>> out;
        for (const auto& p : dm::GenerateSurvey(dm::ParseSurveyKind(kind), num_tiers, total, seed)) {
          out.emplace_back(p.target_model, p.bid.units());
        }
        return out;
      },
      py::arg("kind"), py::arg("num_tiers"), py::arg("total"), py::arg("seed") = 0);

  m.def(
      "run_manifest",
      [](const std::string& path, const std::string& out_dir) {
        const dm::RunManifest manifest = dm::LoadManifest(path);
        std::string json;
        {
          py::gil_scoped_release release;
          const dm::MarketReport report = dm::RunPipeline(
              manifest.config, dm::IngestDataset(manifest.owners_path),
              dm::IngestEvalSet(manifest.eval_path),
              manifest.survey_path.empty() ? std::vector<dm::SurveyPoint>{}
                                           : dm::IngestSurvey(manifest.survey_path));
          if (!out_dir.empty()) dm::EmitReport(report, out_dir);
          json = dm::ReportJson(report);
        }
        return json;
      },
      py::arg("manifest"), py::arg("out_dir") = "",
      "Runs the full pipeline from a manifest file and returns the report as JSON text.");
}
