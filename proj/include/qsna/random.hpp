#pragma once

// Deterministic sampling helpers. Distributions are computed from raw
// mt19937_64 output so streams are identical across standard libraries.

#include "qsna/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>

namespace qsna {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw PreconditionError("Rng::uniform: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 1)); }

  bool percent(unsigned p) { return uniform(0, 99) < static_cast<std::int64_t>(p); }

  /// k/den with den uniform in [1, denominator_bound] and |k| <= magnitude*den.
  Rational grid(std::int64_t denominator_bound, std::int64_t magnitude = 1) {
    const std::int64_t den = uniform(1, denominator_bound);
    Rational r(uniform(-magnitude * den, magnitude * den), den);
    r.canonicalize();
    return r;
  }

  /// Random point of the simplex with entries k_i/N, N <= denominator_bound.
  /// Entries outside `allowed` are zero; at least one allowed entry is positive,
  /// and all of them are when `full_support` is set (then N may reach the
  /// number of allowed entries).
  Vec simplex(const std::vector<bool>& allowed, std::int64_t denominator_bound, bool full_support = false) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < allowed.size(); ++i)
      if (allowed[i]) idx.push_back(i);
    if (idx.empty()) throw PreconditionError("Rng::simplex: no allowed entries");
    const auto k = static_cast<std::int64_t>(idx.size());
    const std::int64_t total = full_support ? uniform(k, std::max(k, denominator_bound)) : uniform(1, denominator_bound);
    std::vector<std::int64_t> units(allowed.size(), 0);
    std::int64_t u = 0;
    if (full_support)
      for (std::size_t i : idx) ++units[i], ++u;
    for (; u < total; ++u) ++units[idx[index(idx.size())]];
    Vec w(allowed.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = Rational(units[i], total);
      w[i].canonicalize();
    }
    return w;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used to derive per-instance seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace qsna
