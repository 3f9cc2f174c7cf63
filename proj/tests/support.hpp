#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "heron/heron.hpp"

namespace heron::fixtures {

/// Admissible k = p/q with |p| <= num_bound and 1 <= q <= den_bound.
inline Rational random_k(std::mt19937_64& rng, long num_bound = 100, long den_bound = 100) {
  std::uniform_int_distribution<long> num(-num_bound, num_bound), den(1, den_bound);
  for (;;) {
    Rational k(num(rng), den(rng));
    k.canonicalize();
    if (!family::is_singular_parameter(k)) return k;
  }
}

/// Reference integral models (u = 2) with their known ranks.
struct TableRow {
  long k;
  const char* a2;
  const char* a4;
  const char* a6;
  unsigned rank;
};

inline const std::vector<TableRow>& table_rows() {
  static const std::vector<TableRow> rows{
      {11, "4547347", "6818384095380", "3363133863125708100", 5},
      {19, "89515187", "2523432520031220", "22674567869155130588100", 4},
      {3, "6899", "14152500", "8901922500", 3},
      {4, "26432", "225607680", "613652889600", 2},
      {6, "192512", "12079595520", "247390116249600", 1},
  };
  return rows;
}

inline const Rational& table_row_one_k() {
  static const Rational k(98, 625);
  return k;
}

inline std::array<Rational, 3> table_row_one() {
  std::array<Rational, 3> row{Rational("-3859986810117979136/59604644775390625"),
          Rational("-302381696902314690275394654830592/1136868377216160297393798828125"),
          Rational("720840680923373992917188523670698174399532498944/21684043449710088680149056017398834228515625")};
  for (auto& q : row) q.canonicalize();
  return row;
}

inline IntegralModel model_of(long a2, long a4, long a6) { return {a2, a4, a6, 1}; }

}  // namespace heron::fixtures
