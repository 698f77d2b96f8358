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

#ifndef DATAMARKET_MONEY_H_
#define DATAMARKET_MONEY_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace datamarket {

// A non-negative amount of money held as an integer count of minor currency
// units (cents). All arithmetic is exact; subtraction below zero and
// overflow throw.
class Money {
 public:
  static constexpr int64_t kUnitsPerMajor = 100;

  constexpr Money() = default;

  static Money FromUnits(int64_t units);
  // Parses "12", "12.3" or "12.34" as major units.
  static Money ParseMajor(std::string_view text);

  constexpr int64_t units() const { return units_; }

  Money& operator+=(Money other);
  Money& operator-=(Money other);
  friend Money operator+(Money a, Money b) { return a += b; }
  friend Money operator-(Money a, Money b) { return a -= b; }

  friend constexpr bool operator==(Money a, Money b) = default;
  friend constexpr auto operator<=>(Money a, Money b) = default;

  // "12.34" style rendering in major units.
  std::string ToString() const;

 private:
  explicit constexpr Money(int64_t units) : units_(units) {}

  int64_t units_ = 0;
};

}  // namespace datamarket

#endif  // DATAMARKET_MONEY_H_
