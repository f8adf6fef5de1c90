#pragma once

// Exact rational scalars and dense vectors of them.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsna {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unknown node, label, or map entry.
struct LookupError : Error {
  using Error::Error;
};

/// An operation was called outside its documented domain.
struct PreconditionError : Error {
  using Error::Error;
};

/// Malformed input text. `where` names the offending location.
struct ParseError : Error {
  ParseError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), location(std::move(where)) {}
  std::string location;
};

/// Parses "n" or "n/d" with an optional leading minus sign. Anything that
/// looks like a decimal or exponent is rejected as a float.
inline Rational parse_rational(std::string_view text, const std::string& where = {}) {
  if (text.empty()) throw ParseError(where, "empty rational");
  for (char c : text) {
    if (c == '.' || c == 'e' || c == 'E') throw ParseError(where, "floats rejected: \"" + std::string(text) + "\"");
  }
  std::size_t i = (text[0] == '-') ? 1 : 0;
  std::size_t slash = std::string_view::npos;
  std::size_t digits_before = 0, digits_after = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '/' && slash == std::string_view::npos) {
      slash = i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      (slash == std::string_view::npos ? digits_before : digits_after)++;
    } else {
      throw ParseError(where, "malformed rational \"" + std::string(text) + "\"");
    }
  }
  if (digits_before == 0 || (slash != std::string_view::npos && digits_after == 0))
    throw ParseError(where, "malformed rational \"" + std::string(text) + "\"");
  Rational value;
  if (slash == std::string_view::npos) {
    value = Rational(mpz_class(std::string(text)));
  } else {
    mpz_class den(std::string(text.substr(slash + 1)));
    if (den == 0) throw ParseError(where, "zero denominator");
    value = Rational(mpz_class(std::string(text.substr(0, slash))), den);
    value.canonicalize();
  }
  return value;
}

/// Canonical "numerator/denominator" form, also for integers ("3/1").
inline std::string format_rational(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Human-friendly form: integers without a denominator.
inline std::string pretty_rational(const Rational& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : format_rational(r);
}

inline Vec zeros(std::size_t n) { return Vec(n, Rational(0)); }

inline Rational dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PreconditionError("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PreconditionError("add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PreconditionError("sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(const Vec& a, const Rational& s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

inline bool is_zero(const Vec& a) {
  for (const auto& x : a)
    if (sgn(x) != 0) return false;
  return true;
}

inline std::string format_vec(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += pretty_rational(v[i]);
  }
  return s + ")";
}

}  // namespace qsna
