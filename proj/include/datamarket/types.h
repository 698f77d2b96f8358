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

#ifndef DATAMARKET_TYPES_H_
#define DATAMARKET_TYPES_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "datamarket/money.h"

namespace datamarket {

using OwnerId = int64_t;

inline constexpr double kDefaultDelta = 1e-6;

// One labelled sample. Classification labels are -1 or +1.
struct LabeledSample {
  std::vector<double> features;
  double label = 0.0;
};

using Dataset = std::vector<LabeledSample>;

// Shape of the extra compensation owed when a model's epsilon exceeds the
// owner's preferred epsilon.
enum class CompensationCurve { kLinear, kConvex, kConcave };

// Hard: the sample is only usable by tiers with epsilon <= eps_prefer.
// Negotiable: any tier may use it but pays extra compensation above it.
enum class RestrictionMode { kHard, kNegotiable };

std::string_view ToString(CompensationCurve curve);
std::string_view ToString(RestrictionMode mode);
CompensationCurve ParseCompensationCurve(std::string_view text);
RestrictionMode ParseRestrictionMode(std::string_view text);

struct DataOwner {
  OwnerId id = 0;
  LabeledSample sample;
  double eps_prefer = 1.0;
  CompensationCurve curve = CompensationCurve::kLinear;
  // Either one value shared by every tier or one value per tier (0-based).
  std::vector<double> rho = {0.0};
  RestrictionMode mode = RestrictionMode::kHard;

  double RhoForTier(int tier_index) const;
};

// One saleable model version. `index` is 1-based; tiers are ordered by
// strictly increasing epsilon and share one delta.
struct ModelTier {
  int index = 1;
  double epsilon = 1.0;
  double delta = kDefaultDelta;
  Money budget;
};

// A surveyed buyer: which tier they want and what they would pay.
struct SurveyPoint {
  int target_model = 1;
  Money bid;
};

// Throws kInvalidArgument unless tiers are 1..M, epsilons strictly
// increasing and positive, and delta is shared and inside (0, 1).
void ValidateTiers(std::span<const ModelTier> tiers);
void ValidateSurvey(std::span<const SurveyPoint> survey, int num_tiers);

}  // namespace datamarket

#endif  // DATAMARKET_TYPES_H_
