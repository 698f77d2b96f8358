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
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "datamarket/random.h"

namespace datamarket {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void ParseFail(size_t line, std::string_view column,
                            const std::string& what) {
  std::string msg = "line " + std::to_string(line);
  if (!column.empty()) msg += ", column '" + std::string(column) + "'";
  throw Error(ErrorCode::kParseError, msg + ": " + what);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = s.find(sep, start);
    out.emplace_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> lines;  // 1-based file line of each row

  std::optional<size_t> Find(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<size_t>(it - header.begin());
  }
  size_t Require(std::string_view name) const {
    if (auto c = Find(name)) return *c;
    ParseFail(1, name, "missing column");
  }
};

Table ParseTable(std::string_view text) {
  Table t;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = Trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells = Split(line, ',');
    if (t.header.empty()) {
      for (std::string& c : cells) {
        std::transform(c.begin(), c.end(), c.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
      }
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      ParseFail(line_no, "", "expected " + std::to_string(t.header.size()) +
                                 " fields, found " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line_no);
  }
  if (t.header.empty()) ParseFail(1, "", "missing header");
  return t;
}

double ParseReal(const std::string& cell, size_t line, std::string_view column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    ParseFail(line, column, "'" + cell + "' is not a number");
  }
  if (!std::isfinite(value)) ParseFail(line, column, "value is not finite");
  return value;
}

int64_t ParseInt(const std::string& cell, size_t line, std::string_view column) {
  int64_t value = 0;
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    ParseFail(line, column, "'" + cell + "' is not an integer");
  }
  return value;
}

std::string FormatReal(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double ParseLabel(const std::string& cell, size_t line) {
  const double v = ParseReal(cell, line, "label");
  if (v == 1.0) return 1.0;
  if (v == -1.0 || v == 0.0) return -1.0;
  throw Error(ErrorCode::kInvalidLabel, "line " + std::to_string(line) +
                                            ": label " + cell +
                                            " is not -1, 0 or +1");
}

// Feature columns are every column not otherwise claimed.
std::vector<size_t> FeatureColumns(const Table& t,
                                   std::initializer_list<std::string_view> known) {
  std::vector<size_t> cols;
  for (size_t c = 0; c < t.header.size(); ++c) {
    if (std::find(known.begin(), known.end(), t.header[c]) == known.end()) {
      cols.push_back(c);
    }
  }
  return cols;
}

Money MoneyField(const Json& obj, const char* units_key, const char* major_key) {
  if (obj.contains(units_key)) {
    const int64_t u = obj.at(units_key).get<int64_t>();
    if (u < 0) {
      throw Error(ErrorCode::kParseError, std::string(units_key) + " is negative");
    }
    return Money::FromUnits(u);
  }
  if (obj.contains(major_key)) {
    const Json& v = obj.at(major_key);
    if (v.is_string()) return Money::ParseMajor(v.get<std::string>());
    return Money::ParseMajor(FormatReal(v.get<double>()));
  }
  throw Error(ErrorCode::kParseError,
              std::string("missing ") + units_key + " or " + major_key);
}

std::string ResolvePath(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

Json MoneyJson(Money m) { return Json{{"units", m.units()}, {"display", m.ToString()}}; }

Json ShapleyToJson(const ShapleyReport& r) {
  Json j;
  j["owners"] = r.owners;
  j["values"] = r.values;
  j["marginal_stddev"] = r.marginal_stddev;
  j["exact"] = r.exact;
  j["permutations_used"] = r.permutations_used;
  j["seed"] = r.seed;
  j["utility_full"] = r.utility_full;
  j["utility_empty"] = r.utility_empty;
  j["oracle_calls"] = r.oracle_calls;
  j["checkpoints"] = r.checkpoints;
  j["running_mean_history"] = r.running_mean_history;
  return j;
}

Json SelectionToJson(const SelectionResult& s) {
  Json j;
  j["solver"] = std::string(ToString(s.solver));
  j["chosen"] = s.chosen;
  j["total_value"] = s.total_value;
  j["total_cost"] = MoneyJson(s.total_cost);
  return j;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTooManyOwners:
    case ErrorCode::kTooManyItems:
    case ErrorCode::kBudgetTooLargeForTable:
    case ErrorCode::kEnumerationTooLarge:
    case ErrorCode::kEmptySolutionSpace:
    case ErrorCode::kSearchSpaceTooLarge:
    case ErrorCode::kZeroTotalPrice:
    case ErrorCode::kOverflow:
      return kExitInfeasible;
    default:
      return kExitInputError;
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::vector<DataOwner> ParseOwnersCsv(std::string_view text) {
  const Table t = ParseTable(text);
  const auto id_col = t.Find("id");
  const size_t label = t.Require("label");
  const size_t eps = t.Require("eps_prefer");
  const size_t curve = t.Require("curve");
  const size_t rho = t.Require("rho");
  const size_t mode = t.Require("mode");
  const std::vector<size_t> features =
      FeatureColumns(t, {"id", "label", "eps_prefer", "curve", "rho", "mode"});
  if (features.empty()) ParseFail(1, "", "no feature columns");

  std::vector<DataOwner> owners;
  std::map<OwnerId, size_t> seen;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const size_t line = t.lines[r];
    DataOwner o;
    o.id = id_col ? ParseInt(row[*id_col], line, "id")
                  : static_cast<OwnerId>(r + 1);
    if (!seen.emplace(o.id, line).second) {
      ParseFail(line, "id", "duplicate owner id " + std::to_string(o.id));
    }
    for (size_t c : features) {
      o.sample.features.push_back(ParseReal(row[c], line, t.header[c]));
    }
    o.sample.label = ParseLabel(row[label], line);
    o.eps_prefer = ParseReal(row[eps], line, "eps_prefer");
    if (!(o.eps_prefer > 0.0)) ParseFail(line, "eps_prefer", "must be positive");
    try {
      o.curve = ParseCompensationCurve(row[curve]);
      o.mode = ParseRestrictionMode(row[mode]);
    } catch (const Error& e) {
      ParseFail(line, "", e.what());
    }
    o.rho.clear();
    for (const std::string& part : Split(row[rho], ';')) {
      const double v = ParseReal(part, line, "rho");
      if (v < 0.0) ParseFail(line, "rho", "must be non-negative");
      o.rho.push_back(v);
    }
    owners.push_back(std::move(o));
  }
  return owners;
}

std::vector<DataOwner> IngestDataset(const std::string& path) {
  return ParseOwnersCsv(ReadFile(path));
}

std::string OwnersToCsv(std::span<const DataOwner> owners) {
  std::string out = "id";
  const size_t d = owners.empty() ? 0 : owners.front().sample.features.size();
  for (size_t k = 0; k < d; ++k) out += ",x" + std::to_string(k + 1);
  out += ",label,eps_prefer,curve,rho,mode\n";
  for (const DataOwner& o : owners) {
    out += std::to_string(o.id);
    for (double x : o.sample.features) out += "," + FormatReal(x);
    out += "," + FormatReal(o.sample.label) + "," + FormatReal(o.eps_prefer) +
           "," + std::string(ToString(o.curve)) + ",";
    for (size_t k = 0; k < o.rho.size(); ++k) {
      out += (k ? ";" : "") + FormatReal(o.rho[k]);
    }
    out += "," + std::string(ToString(o.mode)) + "\n";
  }
  return out;
}

Dataset ParseEvalCsv(std::string_view text) {
  const Table t = ParseTable(text);
  const size_t label = t.Require("label");
  const std::vector<size_t> features = FeatureColumns(t, {"label"});
  if (features.empty()) ParseFail(1, "", "no feature columns");
  Dataset data;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    LabeledSample s;
    for (size_t c : features) {
      s.features.push_back(ParseReal(t.rows[r][c], t.lines[r], t.header[c]));
    }
    s.label = ParseLabel(t.rows[r][label], t.lines[r]);
    data.push_back(std::move(s));
  }
  return data;
}

Dataset IngestEvalSet(const std::string& path) {
  return ParseEvalCsv(ReadFile(path));
}

std::string EvalToCsv(const Dataset& data) {
  std::string out;
  const size_t d = data.empty() ? 0 : data.front().features.size();
  for (size_t k = 0; k < d; ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "label\n";
  for (const LabeledSample& s : data) {
    for (double x : s.features) out += FormatReal(x) + ",";
    out += FormatReal(s.label) + "\n";
  }
  return out;
}

std::vector<SurveyPoint> ParseSurveyCsv(std::string_view text) {
  const Table t = ParseTable(text);
  const size_t tm = t.Require("target_model");
  const size_t bid = t.Require("bid_units");
  std::vector<SurveyPoint> survey;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    SurveyPoint p;
    const int64_t m = ParseInt(t.rows[r][tm], t.lines[r], "target_model");
    if (m < 1 || m > 1'000'000) ParseFail(t.lines[r], "target_model", "must be >= 1");
    p.target_model = static_cast<int>(m);
    const int64_t units = ParseInt(t.rows[r][bid], t.lines[r], "bid_units");
    if (units < 0) ParseFail(t.lines[r], "bid_units", "must be non-negative");
    p.bid = Money::FromUnits(units);
    survey.push_back(p);
  }
  return survey;
}

std::vector<SurveyPoint> IngestSurvey(const std::string& path) {
  return ParseSurveyCsv(ReadFile(path));
}

std::string SurveyToCsv(std::span<const SurveyPoint> survey) {
  std::string out = "target_model,bid_units\n";
  for (const SurveyPoint& p : survey) {
    out += std::to_string(p.target_model) + "," + std::to_string(p.bid.units()) + "\n";
  }
  return out;
}

std::vector<CompItem> ParseItemsCsv(std::string_view text) {
  const Table t = ParseTable(text);
  const size_t id = t.Require("owner_id");
  const size_t sv = t.Require("shapley");
  const size_t base = t.Require("base_units");
  const auto extra = t.Find("extra_units");
  std::vector<CompItem> items;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const size_t line = t.lines[r];
    CompItem item;
    item.owner_id = ParseInt(row[id], line, "owner_id");
    item.shapley = ParseReal(row[sv], line, "shapley");
    const int64_t b = ParseInt(row[base], line, "base_units");
    const int64_t e = extra ? ParseInt(row[*extra], line, "extra_units") : 0;
    if (b < 0 || e < 0) ParseFail(line, "", "costs must be non-negative");
    item.base_comp = Money::FromUnits(b);
    item.extra_comp = Money::FromUnits(e);
    items.push_back(item);
  }
  return items;
}

std::vector<double> ParseTierList(std::string_view text) {
  const std::vector<std::string> parts = Split(text, ',');
  if (parts.size() == 1 && parts[0].find_first_not_of("0123456789") == std::string::npos &&
      !parts[0].empty()) {
    const int64_t m = ParseInt(parts[0], 1, "tiers");
    if (m < 1 || m > 1000) {
      throw Error(ErrorCode::kInvalidArgument, "tier count must be in 1..1000");
    }
    std::vector<double> eps;
    for (int64_t k = 1; k <= m; ++k) eps.push_back(static_cast<double>(k));
    return eps;
  }
  std::vector<double> eps;
  for (const std::string& p : parts) eps.push_back(ParseReal(p, 1, "tiers"));
  return eps;
}

RunManifest ParseManifest(std::string_view json_text, const std::string& base_dir) {
  RunManifest m;
  try {
    const Json j = Json::parse(json_text);
    m.seed = j.value("seed", uint64_t{0});
    const double delta = j.value("delta", kDefaultDelta);
    int index = 1;
    for (const Json& t : j.at("tiers")) {
      ModelTier tier;
      tier.index = index++;
      tier.epsilon = t.at("epsilon").get<double>();
      tier.delta = delta;
      tier.budget = MoneyField(t, "budget_units", "budget");
      m.config.tiers.push_back(tier);
    }
    if (j.contains("loss")) {
      const Json& l = j.at("loss");
      LossSpec& s = m.config.loss;
      if (l.contains("kind")) s.kind = ParseLossKind(l.at("kind").get<std::string>());
      s.lambda = l.value("lambda", s.lambda);
      s.lipschitz = l.value("lipschitz", s.lipschitz);
      s.smoothness = l.value("smoothness", s.smoothness);
      s.radius = l.value("radius", s.radius);
    }
    const Json shapley = j.value("shapley", Json::object());
    m.config.shapley_permutations =
        shapley.value("permutations", m.config.shapley_permutations);
    m.config.shapley_seed = shapley.value("seed", MixSeed(m.seed, 1));
    m.config.valuation_tolerance =
        shapley.value("tolerance", m.config.valuation_tolerance);
    m.config.reuse_tier1_valuations =
        shapley.value("reuse_tier1", m.config.reuse_tier1_valuations);
    const Json selection = j.value("selection", Json::object());
    if (selection.contains("solver")) {
      m.config.solver = ParseSolver(selection.at("solver").get<std::string>());
    }
    m.config.guess_alpha = selection.value("guess_alpha", m.config.guess_alpha);
    const Json training = j.value("training", Json::object());
    m.config.alpha_opt = training.value("alpha", m.config.alpha_opt);
    m.config.training_seed = training.value("seed", MixSeed(m.seed, 2));
    m.config.survey_size_hint = j.value("survey_size_hint", int64_t{0});
    const Json data = j.value("data", Json::object());
    m.owners_path = ResolvePath(base_dir, data.value("owners", std::string()));
    m.eval_path = ResolvePath(base_dir, data.value("eval", std::string()));
    m.survey_path = ResolvePath(base_dir, data.value("survey", std::string()));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  ValidatePipelineConfig(m.config);
  return m;
}

RunManifest LoadManifest(const std::string& path) {
  return ParseManifest(ReadFile(path),
                       std::filesystem::path(path).parent_path().string());
}

std::string ManifestToJson(const RunManifest& m) {
  Json j;
  j["seed"] = m.seed;
  j["delta"] = m.config.tiers.empty() ? kDefaultDelta : m.config.tiers[0].delta;
  Json tiers = Json::array();
  for (const ModelTier& t : m.config.tiers) {
    tiers.push_back({{"epsilon", t.epsilon}, {"budget_units", t.budget.units()}});
  }
  j["tiers"] = tiers;
  const LossSpec& l = m.config.loss;
  j["loss"] = {{"kind", std::string(ToString(l.kind))},
               {"lambda", l.lambda},
               {"lipschitz", l.lipschitz},
               {"smoothness", l.smoothness},
               {"radius", l.radius}};
  j["shapley"] = {{"permutations", m.config.shapley_permutations},
                  {"seed", m.config.shapley_seed},
                  {"tolerance", m.config.valuation_tolerance},
                  {"reuse_tier1", m.config.reuse_tier1_valuations}};
  j["selection"] = {{"solver", std::string(ToString(m.config.solver))},
                    {"guess_alpha", m.config.guess_alpha}};
  j["training"] = {{"alpha", m.config.alpha_opt},
                   {"seed", m.config.training_seed}};
  j["data"] = {{"owners", m.owners_path},
               {"eval", m.eval_path},
               {"survey", m.survey_path}};
  return j.dump(2) + "\n";
}

std::string_view ToString(SurveyKind kind) {
  return kind == SurveyKind::kGaussianCounts ? "gaussian" : "uniform";
}

SurveyKind ParseSurveyKind(std::string_view text) {
  if (text == "uniform") return SurveyKind::kIndependentUniform;
  if (text == "gaussian") return SurveyKind::kGaussianCounts;
  throw Error(ErrorCode::kParseError,
              "unknown survey kind '" + std::string(text) + "'");
}

std::vector<SurveyPoint> GenerateSurvey(SurveyKind kind, int num_tiers,
                                        int64_t total, uint64_t seed) {
  if (num_tiers < 1 || total < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one tier and point");
  }
  Rng rng(seed);
  std::vector<int64_t> counts(num_tiers, 0);
  if (kind == SurveyKind::kIndependentUniform) {
    std::uniform_int_distribution<int> pick(0, num_tiers - 1);
    for (int64_t k = 0; k < total; ++k) ++counts[pick(rng)];
  } else {
    std::normal_distribution<double> normal(5.0, 3.0);
    std::vector<double> w(num_tiers);
    double sum = 0.0;
    for (double& x : w) {
      x = std::max(0.0, normal(rng));
      sum += x;
    }
    if (!(sum > 0.0)) std::fill(w.begin(), w.end(), 1.0), sum = num_tiers;
    std::vector<double> frac(num_tiers);
    int64_t assigned = 0;
    for (int m = 0; m < num_tiers; ++m) {
      const double exact = total * w[m] / sum;
      counts[m] = static_cast<int64_t>(std::floor(exact));
      frac[m] = exact - counts[m];
      assigned += counts[m];
    }
    while (assigned < total) {
      const int m = static_cast<int>(std::max_element(frac.begin(), frac.end()) -
                                     frac.begin());
      ++counts[m];
      frac[m] = -1.0;
      ++assigned;
    }
  }
  std::vector<SurveyPoint> survey;
  survey.reserve(total);
  for (int m = 0; m < num_tiers; ++m) {
    const int64_t lo = (1000 + 100 * m) * Money::kUnitsPerMajor;
    const int64_t hi = (5000 + 100 * m) * Money::kUnitsPerMajor;
    std::uniform_int_distribution<int64_t> bid(lo, hi);
    for (int64_t k = 0; k < counts[m]; ++k) {
      survey.push_back({m + 1, Money::FromUnits(bid(rng))});
    }
  }
  return survey;
}

Dataset GenerateClassification(int64_t n, int64_t d, double separation,
                               uint64_t seed) {
  if (n < 1 || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n and d must be positive");
  }
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double shift = separation / std::sqrt(static_cast<double>(d));
  Dataset data(n);
  double max_norm = 0.0;
  for (LabeledSample& s : data) {
    s.label = coin(rng) ? 1.0 : -1.0;
    double norm2 = 0.0;
    for (int64_t k = 0; k < d; ++k) {
      const double x = s.label * shift + noise(rng);
      s.features.push_back(x);
      norm2 += x * x;
    }
    max_norm = std::max(max_norm, std::sqrt(norm2));
  }
  if (max_norm > 1.0) {
    for (LabeledSample& s : data) {
      for (double& x : s.features) x /= max_norm;
    }
  }
  return data;
}

SyntheticMarket GenerateMarket(const SyntheticMarketSpec& spec, uint64_t seed) {
  if (spec.owners < 1 || spec.eval_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need owners and evaluation points");
  }
  if (!(spec.eps_prefer_low > 0.0) || spec.eps_prefer_high < spec.eps_prefer_low) {
    throw Error(ErrorCode::kInvalidArgument, "bad eps_prefer range");
  }
  const Dataset all = GenerateClassification(spec.owners + spec.eval_size,
                                             spec.dim, spec.separation, seed);
  Rng rng(MixSeed(seed, 1));
  // Two decimals keep the CSV form short and exact.
  std::uniform_int_distribution<int64_t> eps(
      static_cast<int64_t>(std::ceil(spec.eps_prefer_low * 100)),
      static_cast<int64_t>(std::floor(spec.eps_prefer_high * 100)));
  SyntheticMarket market;
  constexpr CompensationCurve kCurves[] = {CompensationCurve::kLinear,
                                           CompensationCurve::kConvex,
                                           CompensationCurve::kConcave};
  for (int64_t i = 0; i < spec.owners; ++i) {
    DataOwner o;
    o.id = i + 1;
    o.sample = all[i];
    o.eps_prefer = static_cast<double>(eps(rng)) / 100.0;
    o.curve = kCurves[i % 3];
    o.rho = {spec.rho};
    o.mode = spec.mode;
    market.owners.push_back(std::move(o));
  }
  market.eval_set.assign(all.begin() + spec.owners, all.end());
  return market;
}

std::string ShapleyReportJson(const ShapleyReport& report) {
  return ShapleyToJson(report).dump(2) + "\n";
}

std::string SelectionJson(const SelectionResult& result) {
  return SelectionToJson(result).dump(2) + "\n";
}

std::string PricingJson(const PriceSchedule& s, std::span<const SurveyPoint> survey) {
  const RevenueSummary rev = RevenueAndAffordability(s.exact_prices, survey);
  Json j;
  j["method"] = std::string(ToString(s.method));
  j["feasible"] = s.feasible;
  Json tiers = Json::array();
  for (size_t m = 0; m < s.prices.size(); ++m) {
    tiers.push_back({{"tier", m + 1},
                     {"price", MoneyJson(s.prices[m])},
                     {"price_exact", s.exact_prices[m].ToString()},
                     {"buyers", rev.tier_buyers[m]},
                     {"affordable", rev.tier_affordable[m]},
                     {"revenue_exact", rev.tier_revenue[m].ToString()},
                     {"zero_demand", static_cast<bool>(s.zero_demand[m])}});
  }
  j["tiers"] = tiers;
  j["revenue"] = MoneyJson(s.revenue);
  j["revenue_exact"] = s.exact_revenue.ToString();
  j["affordability_ratio"] = rev.affordability_ratio;
  return j.dump(2) + "\n";
}

std::string ReportJson(const MarketReport& r) {
  Json j;
  Json tiers = Json::array();
  for (size_t m = 0; m < r.tiers.size(); ++m) {
    const TierOutcome& t = r.tiers[m];
    Json tj;
    tj["index"] = t.tier.index;
    tj["epsilon"] = t.tier.epsilon;
    tj["delta"] = t.tier.delta;
    tj["budget"] = MoneyJson(t.tier.budget);
    tj["eligible"] = t.eligible;
    tj["shapley"] = ShapleyToJson(t.shapley);
    Json items = Json::array();
    for (const CompItem& item : t.items) {
      items.push_back({{"owner", item.owner_id},
                       {"shapley", item.shapley},
                       {"base_units", item.base_comp.units()},
                       {"extra_units", item.extra_comp.units()}});
    }
    tj["items"] = items;
    tj["selection"] = SelectionToJson(t.selection);
    tj["trained"] = t.trained;
    if (t.trained) {
      tj["model"] = {{"weights", t.model.weights},
                     {"trained_on", t.model.trained_on},
                     {"alpha", t.model.alpha},
                     {"seed", t.model.seed},
                     {"sigma1", t.model.noise.sigma1},
                     {"sigma2", t.model.noise.sigma2},
                     {"gap_bound", t.model.gap_bound},
                     {"accuracy", t.model_accuracy}};
      tj["excess_loss"] = t.excess_loss;
    } else {
      tj["model"] = nullptr;
      tj["excess_loss"] = nullptr;
    }
    tj["price"] = MoneyJson(t.price);
    tj["price_exact"] = t.exact_price.ToString();
    tj["zero_demand"] = t.zero_demand;
    tj["buyers"] = r.revenue.tier_buyers.empty() ? 0 : r.revenue.tier_buyers[m];
    tj["affordable"] = r.revenue.tier_affordable.empty() ? 0 : r.revenue.tier_affordable[m];
    tj["revenue_exact"] = r.revenue.tier_revenue.empty()
                              ? std::string("0")
                              : r.revenue.tier_revenue[m].ToString();
    tj["pool"] = MoneyJson(t.pool);
    tiers.push_back(std::move(tj));
  }
  j["tiers"] = tiers;
  j["pricing"] = {{"method", std::string(ToString(r.schedule.method))},
                  {"feasible", r.schedule.feasible},
                  {"revenue", MoneyJson(r.opt_revenue)},
                  {"revenue_exact", r.schedule.exact_revenue.ToString()},
                  {"buyers", r.revenue.buyers},
                  {"affordable", r.revenue.affordable},
                  {"affordability_ratio", r.revenue.affordability_ratio}};
  Json owners = Json::array();
  for (const CompensationRecord& c : r.compensation) {
    Json shares = Json::array();
    for (const TierShare& s : c.tiers) {
      shares.push_back({{"tier", s.tier},
                        {"base_units", s.base.units()},
                        {"extra_units", s.extra.units()}});
    }
    owners.push_back({{"owner", c.owner},
                      {"base", MoneyJson(c.base)},
                      {"extra", MoneyJson(c.extra)},
                      {"total", MoneyJson(c.total)},
                      {"selection_cost", MoneyJson(c.selection_cost)},
                      {"tiers", shares}});
  }
  j["compensation"] = {{"distributed", MoneyJson(r.distributed)},
                       {"selection_cost_total", MoneyJson(r.selection_cost_total)},
                       {"deficit", r.deficit},
                       {"owners", owners}};
  return j.dump(2) + "\n";
}

std::string PricesCsv(const MarketReport& r) {
  std::string out =
      "tier,epsilon,price_units,price,price_exact,buyers,affordable,"
      "revenue_units,revenue,revenue_exact,zero_demand,pool_units,pool\n";
  for (size_t m = 0; m < r.tiers.size(); ++m) {
    const TierOutcome& t = r.tiers[m];
    const ExactRational rev =
        r.revenue.tier_revenue.empty() ? ExactRational(0) : r.revenue.tier_revenue[m];
    const Money rev_money = Money::FromUnits(rev.Floor());
    out += std::to_string(t.tier.index) + "," + FormatReal(t.tier.epsilon) + "," +
           std::to_string(t.price.units()) + "," + t.price.ToString() + "," +
           t.exact_price.ToString() + "," +
           std::to_string(r.revenue.tier_buyers.empty() ? 0 : r.revenue.tier_buyers[m]) +
           "," +
           std::to_string(r.revenue.tier_affordable.empty()
                              ? 0
                              : r.revenue.tier_affordable[m]) +
           "," + std::to_string(rev_money.units()) + "," + rev_money.ToString() +
           "," + rev.ToString() + "," + (t.zero_demand ? "1" : "0") + "," +
           std::to_string(t.pool.units()) + "," + t.pool.ToString() + "\n";
  }
  return out;
}

std::string CompensationCsv(const MarketReport& r) {
  std::string out =
      "owner,base_units,base,extra_units,extra,total_units,total,"
      "selection_cost_units,selection_cost\n";
  for (const CompensationRecord& c : r.compensation) {
    out += std::to_string(c.owner) + "," + std::to_string(c.base.units()) + "," +
           c.base.ToString() + "," + std::to_string(c.extra.units()) + "," +
           c.extra.ToString() + "," + std::to_string(c.total.units()) + "," +
           c.total.ToString() + "," + std::to_string(c.selection_cost.units()) +
           "," + c.selection_cost.ToString() + "\n";
  }
  return out;
}

void EmitReport(const MarketReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  WriteFile((base / "report.json").string(), ReportJson(report));
  WriteFile((base / "prices.csv").string(), PricesCsv(report));
  WriteFile((base / "compensation.csv").string(), CompensationCsv(report));
}

std::vector<PriceRow> ParsePricesCsv(std::string_view text) {
  const Table t = ParseTable(text);
  std::vector<PriceRow> rows;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const size_t line = t.lines[r];
    PriceRow p;
    p.tier = static_cast<int>(ParseInt(row[t.Require("tier")], line, "tier"));
    p.epsilon = ParseReal(row[t.Require("epsilon")], line, "epsilon");
    p.price_units = ParseInt(row[t.Require("price_units")], line, "price_units");
    p.price_exact = row[t.Require("price_exact")];
    p.buyers = ParseInt(row[t.Require("buyers")], line, "buyers");
    p.affordable = ParseInt(row[t.Require("affordable")], line, "affordable");
    p.revenue_units = ParseInt(row[t.Require("revenue_units")], line, "revenue_units");
    p.revenue_exact = row[t.Require("revenue_exact")];
    p.zero_demand = ParseInt(row[t.Require("zero_demand")], line, "zero_demand") != 0;
    p.pool_units = ParseInt(row[t.Require("pool_units")], line, "pool_units");
    rows.push_back(std::move(p));
  }
  return rows;
}

std::vector<CompensationRow> ParseCompensationCsv(std::string_view text) {
  const Table t = ParseTable(text);
  std::vector<CompensationRow> rows;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const size_t line = t.lines[r];
    CompensationRow c;
    c.owner = ParseInt(row[t.Require("owner")], line, "owner");
    c.base_units = ParseInt(row[t.Require("base_units")], line, "base_units");
    c.extra_units = ParseInt(row[t.Require("extra_units")], line, "extra_units");
    c.total_units = ParseInt(row[t.Require("total_units")], line, "total_units");
    c.selection_cost_units =
        ParseInt(row[t.Require("selection_cost_units")], line, "selection_cost_units");
    rows.push_back(c);
  }
  return rows;
}

}  // namespace datamarket
