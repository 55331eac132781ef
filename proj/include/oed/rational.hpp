#pragma once

#include <gmpxx.h>

#include <string>

#include "oed/errors.hpp"

namespace oed {

/// Exact scalar type. All rank decisions in exact mode are true rational
/// comparisons with no rounding.
using Rational = mpq_class;

/// Parses "num", "-num" or "num/den" into a canonical rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ConfigError("empty rational literal");
  Rational value;
  try {
    value = Rational(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad rational literal: '" + text + "'");
  }
  value.canonicalize();
  return value;
}

/// Canonical text form: "num" or "num/den".
inline std::string to_string(const Rational& value) { return value.get_str(); }

namespace detail {

template <typename T>
inline T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

}  // namespace detail

}  // namespace oed
