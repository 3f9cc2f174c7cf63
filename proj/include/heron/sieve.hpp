#pragma once

// S(N, E) = sum over good p <= N of ((2 - a_p) / (p + 1 - a_p)) log p,
// equivalently (1 - (p - 1) / #E(F_p)) log p. Curves of high rank tend to
// have many points mod p and so large scores.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "heron/curve.hpp"

namespace heron::sieve {

struct SieveScore {
  std::uint64_t limit = 0;
  long double value = 0;
  std::uint64_t primes_used = 0;
  std::vector<std::uint64_t> primes_skipped;  // bad reduction

  /// 15 significant digits.
  std::string to_string() const { return format_value(value); }

  static std::string format_value(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15Lg", v);
    return buf;
  }
};

/// (2 - a_p) / (p + 1 - a_p) in lowest terms.
inline Rational term_weight(std::uint64_t p, std::int64_t ap) {
  Rational w(Integer(2 - ap), Integer(static_cast<long>(p) + 1 - ap));
  w.canonicalize();
  return w;
}

/// One term, from the exact weight and a single multiplication by log p.
inline long double term_value(std::uint64_t p, std::int64_t ap) {
  const Rational w = term_weight(p, ap);
  const long double weight = static_cast<long double>(w.get_num().get_si()) /
                             static_cast<long double>(w.get_den().get_si());
  return weight * std::log(static_cast<long double>(p));
}

/// Adds the terms for primes in (score.limit, limit] to an existing score.
/// Summation is strictly in increasing p, so extending S(N2) to N1 gives the
/// same bits as computing S(N1) directly.
inline void extend(SieveScore& score, const IntegralModel& m, std::uint64_t limit, const Integer& disc) {
  if (limit < score.limit) throw InvalidInput("sieve limit cannot shrink");
  for (const auto p : nt::primes_up_to(limit)) {
    if (p <= score.limit) continue;
    const auto s = ec::try_reduce_mod_p(m, p, disc);
    if (!s) {
      score.primes_skipped.push_back(p);
      continue;
    }
    score.value += term_value(p, s->trace);
    ++score.primes_used;
  }
  score.limit = limit;
}

inline SieveScore sieve_score(const IntegralModel& m, std::uint64_t limit) {
  if (limit < 2) throw InvalidInput("sieve limit must be at least 2");
  SieveScore s;
  extend(s, m, limit, m.discriminant());
  return s;
}

/// Scores at several limits from one pass; each equals sieve_score at that limit.
inline std::vector<SieveScore> sieve_scores(const IntegralModel& m, std::vector<std::uint64_t> limits) {
  const Integer disc = m.discriminant();
  std::vector<SieveScore> out;
  SieveScore running;
  std::vector<std::size_t> order(limits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return limits[a] < limits[b]; });
  out.resize(limits.size());
  for (const auto i : order) {
    if (limits[i] < 2) throw InvalidInput("sieve limit must be at least 2");
    extend(running, m, limits[i], disc);
    out[i] = running;
  }
  return out;
}

}  // namespace heron::sieve
