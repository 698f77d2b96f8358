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

#ifndef DATAMARKET_RATIONAL_H_
#define DATAMARKET_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace datamarket {

// Exact rational number with 64-bit numerator and denominator. Values are
// kept in lowest terms with a positive denominator. Intermediate products
// use 128-bit integers; a result that does not fit back into 64 bits after
// reduction throws Error(kOverflow). Comparison never overflows.
class ExactRational {
 public:
  constexpr ExactRational() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  constexpr ExactRational(int64_t value) : num_(value) {}
  ExactRational(int64_t numerator, int64_t denominator);

  // Exact value of a decimal literal such as "0.1", "-2.5e-3" or "7".
  static ExactRational FromDecimal(std::string_view text);
  // Reads a double through its shortest round-trip decimal form, so 0.1
  // becomes 1/10 rather than the binary approximation.
  static ExactRational FromDouble(double value);

  int64_t numerator() const { return num_; }
  int64_t denominator() const { return den_; }

  double ToDouble() const { return static_cast<double>(num_) / den_; }
  // Largest integer <= value.
  int64_t Floor() const;
  // "n" or "n/d".
  std::string ToString() const;

  ExactRational& operator+=(const ExactRational& o);
  ExactRational& operator-=(const ExactRational& o);
  ExactRational& operator*=(const ExactRational& o);
  ExactRational& operator/=(const ExactRational& o);

  friend ExactRational operator+(ExactRational a, const ExactRational& b) {
    return a += b;
  }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) {
    return a -= b;
  }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) {
    return a *= b;
  }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) {
    return a /= b;
  }
  ExactRational operator-() const;

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const ExactRational& a,
                                          const ExactRational& b);

 private:
  static ExactRational FromWide(__int128 num, __int128 den);

  int64_t num_ = 0;
  int64_t den_ = 1;
};

}  // namespace datamarket

#endif  // DATAMARKET_RATIONAL_H_
