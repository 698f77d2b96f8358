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

#include "datamarket/rational.h"

#include <charconv>
#include <limits>
#include <system_error>

#include "datamarket/errors.h"

namespace datamarket {
namespace {

__int128 Gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool FitsInt64(__int128 v) {
  return v >= std::numeric_limits<int64_t>::min() &&
         v <= std::numeric_limits<int64_t>::max();
}

}  // namespace

ExactRational::ExactRational(int64_t numerator, int64_t denominator) {
  *this = FromWide(numerator, denominator);
}

ExactRational ExactRational::FromWide(__int128 num, __int128 den) {
  if (den == 0) {
    throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = Gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!FitsInt64(num) || !FitsInt64(den)) {
    throw Error(ErrorCode::kOverflow, "rational result exceeds 64 bits");
  }
  ExactRational r;
  r.num_ = static_cast<int64_t>(num);
  r.den_ = static_cast<int64_t>(den);
  return r;
}

ExactRational ExactRational::FromDecimal(std::string_view text) {
  const auto fail = [&]() {
    return Error(ErrorCode::kParseError,
                 "malformed decimal '" + std::string(text) + "'");
  };
  size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  __int128 mantissa = 0;
  int scale = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > std::numeric_limits<int64_t>::max()) {
        throw Error(ErrorCode::kOverflow, "decimal has too many digits");
      }
      if (seen_dot) ++scale;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw fail();
  int exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') throw fail();
    ++pos;
    if (pos < text.size() && text[pos] == '+') ++pos;
    auto [ptr, ec] =
        std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw fail();
  }
  exponent -= scale;
  if (exponent > 18 || exponent < -18) {
    throw Error(ErrorCode::kOverflow, "decimal exponent out of range");
  }
  __int128 pow10 = 1;
  for (int i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) pow10 *= 10;
  if (negative) mantissa = -mantissa;
  return exponent >= 0 ? FromWide(mantissa * pow10, 1)
                       : FromWide(mantissa, pow10);
}

ExactRational ExactRational::FromDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot format double");
  }
  return FromDecimal(std::string_view(buf, ptr - buf));
}

int64_t ExactRational::Floor() const {
  int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string ExactRational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

ExactRational& ExactRational::operator+=(const ExactRational& o) {
  *this = FromWide(static_cast<__int128>(num_) * o.den_ +
                       static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
  return *this;
}

ExactRational& ExactRational::operator-=(const ExactRational& o) {
  return *this += -o;
}

ExactRational& ExactRational::operator*=(const ExactRational& o) {
  *this = FromWide(static_cast<__int128>(num_) * o.num_,
                   static_cast<__int128>(den_) * o.den_);
  return *this;
}

ExactRational& ExactRational::operator/=(const ExactRational& o) {
  if (o.num_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero");
  }
  *this = FromWide(static_cast<__int128>(num_) * o.den_,
                   static_cast<__int128>(den_) * o.num_);
  return *this;
}

ExactRational ExactRational::operator-() const {
  return FromWide(-static_cast<__int128>(num_), den_);
}

std::strong_ordering operator<=>(const ExactRational& a,
                                 const ExactRational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace datamarket
