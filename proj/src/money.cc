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

#include "datamarket/money.h"

#include <charconv>
#include <cstdio>
#include <limits>

#include "datamarket/errors.h"

namespace datamarket {

Money Money::FromUnits(int64_t units) {
  if (units < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "money amount must be non-negative, got " +
                    std::to_string(units));
  }
  return Money(units);
}

Money Money::ParseMajor(std::string_view text) {
  const auto fail = [&]() {
    return Error(ErrorCode::kParseError,
                 "malformed money value '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();
  const size_t dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2) throw fail();
  int64_t major = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(),
                                   major);
  if (ec != std::errc() || ptr != whole.data() + whole.size() || major < 0) {
    throw fail();
  }
  int64_t minor = 0;
  for (size_t i = 0; i < 2; ++i) {
    minor *= 10;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') throw fail();
      minor += frac[i] - '0';
    }
  }
  if (major > (std::numeric_limits<int64_t>::max() - minor) / kUnitsPerMajor) {
    throw Error(ErrorCode::kOverflow, "money value too large");
  }
  return Money(major * kUnitsPerMajor + minor);
}

Money& Money::operator+=(Money other) {
  if (__builtin_add_overflow(units_, other.units_, &units_)) {
    throw Error(ErrorCode::kOverflow, "money addition overflow");
  }
  return *this;
}

Money& Money::operator-=(Money other) {
  if (other.units_ > units_) {
    throw Error(ErrorCode::kInvalidArgument,
                "money subtraction would go negative");
  }
  units_ -= other.units_;
  return *this;
}

std::string Money::ToString() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld",
                static_cast<long long>(units_ / kUnitsPerMajor),
                static_cast<long long>(units_ % kUnitsPerMajor));
  return buf;
}

}  // namespace datamarket
