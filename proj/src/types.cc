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

#include "datamarket/types.h"

#include <string>

#include "datamarket/errors.h"

namespace datamarket {

std::string_view ToString(CompensationCurve curve) {
  switch (curve) {
    case CompensationCurve::kLinear: return "linear";
    case CompensationCurve::kConvex: return "convex";
    case CompensationCurve::kConcave: return "concave";
  }
  return "linear";
}

std::string_view ToString(RestrictionMode mode) {
  return mode == RestrictionMode::kHard ? "hard" : "negotiable";
}

CompensationCurve ParseCompensationCurve(std::string_view text) {
  if (text == "linear") return CompensationCurve::kLinear;
  if (text == "convex") return CompensationCurve::kConvex;
  if (text == "concave") return CompensationCurve::kConcave;
  throw Error(ErrorCode::kParseError,
              "unknown compensation curve '" + std::string(text) + "'");
}

RestrictionMode ParseRestrictionMode(std::string_view text) {
  if (text == "hard") return RestrictionMode::kHard;
  if (text == "negotiable") return RestrictionMode::kNegotiable;
  throw Error(ErrorCode::kParseError,
              "unknown restriction mode '" + std::string(text) + "'");
}

double DataOwner::RhoForTier(int tier_index) const {
  if (rho.empty()) return 0.0;
  if (rho.size() == 1) return rho.front();
  if (tier_index < 0 || static_cast<size_t>(tier_index) >= rho.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "owner " + std::to_string(id) + " has no rho for tier " +
                    std::to_string(tier_index + 1));
  }
  return rho[tier_index];
}

void ValidateTiers(std::span<const ModelTier> tiers) {
  if (tiers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one tier is required");
  }
  for (size_t i = 0; i < tiers.size(); ++i) {
    const ModelTier& t = tiers[i];
    if (t.index != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::kInvalidArgument, "tier indices must be 1..M");
    }
    if (!(t.epsilon > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "tier epsilon must be > 0");
    }
    if (i > 0 && !(t.epsilon > tiers[i - 1].epsilon)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tier epsilons must be strictly increasing");
    }
    if (!(t.delta > 0.0 && t.delta < 1.0) || t.delta != tiers[0].delta) {
      throw Error(ErrorCode::kInvalidArgument,
                  "delta must be shared by all tiers and lie in (0,1)");
    }
  }
}

void ValidateSurvey(std::span<const SurveyPoint> survey, int num_tiers) {
  for (const SurveyPoint& p : survey) {
    if (p.target_model < 1 || p.target_model > num_tiers) {
      throw Error(ErrorCode::kInvalidArgument,
                  "survey target model " + std::to_string(p.target_model) +
                      " outside 1.." + std::to_string(num_tiers));
    }
  }
}

}  // namespace datamarket
