//
// Copyright 2026 the nicom authors
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
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "nicom/errors.hpp"

namespace nicom {

// All probabilities, utilities and objective values are exact rationals.
// Floating point appears only in the Hedge weight computation. Expression
// templates are disabled: deduced-return lambdas stored in std::function
// would otherwise hand out expression objects referencing dead locals.
using BigInt =
    boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                  boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact rational value of a finite double. IEEE doubles are dyadic rationals,
// so no precision is lost.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) {
    throw InvalidArgumentError("rational_from_double: non-finite input");
  }
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [1/2, 1)
  auto mant_bits = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(mant_bits);
  if (exp >= 0) {
    r *= Rational(BigInt(1) << exp);
  } else {
    r /= Rational(BigInt(1) << -exp);
  }
  return r;
}

// Canonical "num/den" form used by every file format of the artifact.
inline std::string to_fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(BigInt(std::string(text)));
    }
    const BigInt num{std::string(text.substr(0, slash))};
    const BigInt den{std::string(text.substr(slash + 1))};
    if (den == 0) throw InvalidArgumentError("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw InvalidArgumentError("cannot parse rational from '" +
                               std::string(text) + "'");
  }
}

// Smallest integer >= r.
inline BigInt ceil_big(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (q * denominator(r) < numerator(r)) ++q;
  return q;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace nicom
