#pragma once

// Complete 2-descent for curves y^2 = (x - e1)(x - e2)(x - e3) with integer
// roots e1 < e2 < e3.
//
// A point maps to (x - e1, x - e2) in (Q*/Q*^2)^2. The image lies among pairs
// supported on -1, 2 and the primes dividing the root differences. A pair
// (b1, b2) lies in the image iff the homogeneous space
//     b1 z1^2 - b2 z2^2 = e2 - e1,   b1 z1^2 - b1 b2 z3^2 = e3 - e1
// has a rational point; pairs whose space has points over R and every Q_p
// form the 2-Selmer group, of order 2^(s+2), and rank <= s.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heron/curve.hpp"
#include "heron/torsion.hpp"

namespace heron::descent {

struct SquareClassPair {
  Integer b1 = 1, b2 = 1;

  friend bool operator==(const SquareClassPair&, const SquareClassPair&) = default;
  std::string to_string() const { return "(" + b1.get_str() + ", " + b2.get_str() + ")"; }
};

/// An integral model whose cubic splits over Q, with the roots sorted and the
/// primes of bad reduction found.
class SplitModel {
 public:
  static SplitModel from(const IntegralModel& m, const nt::FactorBudget& budget = {}) {
    const auto two = torsion::two_torsion(m);
    if (two.size() != 3) throw InvalidInput("model does not have full rational 2-torsion");
    SplitModel s;
    s.model_ = m;
    for (int i = 0; i < 3; ++i) {
      if (two[i].x.get_den() != 1) throw InternalError("non-integral root of a monic integral cubic");
      s.roots_[i] = two[i].x.get_num();
    }
    std::vector<Integer> primes{2};
    for (const auto& d : {s.roots_[1] - s.roots_[0], s.roots_[2] - s.roots_[0], s.roots_[2] - s.roots_[1]}) {
      for (const auto& f : nt::factorize(d, budget).factors) primes.push_back(f.prime);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    s.primes_ = std::move(primes);
    return s;
  }

  const IntegralModel& model() const { return model_; }
  CubicModel cubic() const { return model_.cubic(); }
  const std::array<Integer, 3>& roots() const { return roots_; }
  const Integer& e(int i) const { return roots_[i]; }
  /// 2 and every odd prime dividing the discriminant, ascending.
  const std::vector<Integer>& bad_primes() const { return primes_; }

 private:
  IntegralModel model_;
  std::array<Integer, 3> roots_;
  std::vector<Integer> primes_;
};

namespace detail {

inline Rational class_value(const RationalPoint& p, const std::array<Integer, 3>& e, int which) {
  // which = 0 -> first coordinate, 1 -> second, following the torsion conventions.
  const Integer& e1 = e[0];
  const Integer& e2 = e[1];
  const Integer& e3 = e[2];
  if (p.x == e1) return which == 0 ? Rational((e1 - e2) * (e1 - e3)) : Rational(e1 - e2);
  if (p.x == e2) return which == 0 ? Rational(e2 - e1) : Rational((e2 - e1) * (e2 - e3));
  return which == 0 ? p.x - e1 : p.x - e2;
}

/// Square class of a nonzero rational over the given primes, as a bit mask:
/// bit 0 is the sign, bit i + 1 the parity of v_{primes[i]}. Nothing if the
/// value has odd valuation at some other prime.
inline std::optional<std::uint64_t> class_mask(const Rational& q, const std::vector<Integer>& primes) {
  Integer w = q.get_num() * q.get_den();
  std::uint64_t mask = w < 0 ? 1 : 0;
  w = abs(w);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    Integer rest;
    if (nt::valuation(w, primes[i], &rest) % 2) mask |= std::uint64_t{1} << (i + 1);
    w = rest;
  }
  if (!nt::is_square(w)) return std::nullopt;
  return mask;
}

inline Integer mask_value(std::uint64_t mask, const std::vector<Integer>& primes) {
  Integer v = (mask & 1) ? -1 : 1;
  for (std::size_t i = 0; i < primes.size(); ++i)
    if (mask >> (i + 1) & 1) v *= primes[i];
  return v;
}

}  // namespace detail

/// Image of P under the 2-descent map. Torsion conventions: O -> (1, 1),
/// (e1, 0) -> ((e1-e2)(e1-e3), e1-e2), (e2, 0) -> (e2-e1, (e2-e1)(e2-e3)).
inline SquareClassPair descent_image(const SplitModel& s, const RationalPoint& p) {
  if (!s.cubic().contains(p)) throw PointNotOnCurve("point " + to_string(p) + " is not on the curve");
  if (p.infinity) return {};
  SquareClassPair out;
  for (int which = 0; which < 2; ++which) {
    const auto mask = detail::class_mask(detail::class_value(p, s.roots(), which), s.bad_primes());
    if (!mask) throw InternalError("descent image not supported on the bad primes");
    (which == 0 ? out.b1 : out.b2) = detail::mask_value(*mask, s.bad_primes());
  }
  return out;
}

struct HomogeneousSpace {
  Integer b1, b2;
  std::array<Integer, 3> e;  // pairwise distinct

  static HomogeneousSpace of(const SplitModel& s, const SquareClassPair& c) { return {c.b1, c.b2, s.roots()}; }
};

/// A place of Q: a prime p, or the real place when p == 0.
struct Place {
  Integer p = 0;
  bool is_real() const { return p == 0; }
  std::string to_string() const { return is_real() ? "R" : p.get_str(); }
};

namespace local {

/// Bits of the square-class vector at a place: 1 at R, 2 at odd p, 3 at p = 2.
inline unsigned class_bits(const Place& v) { return v.is_real() ? 1 : (v.p == 2 ? 3 : 2); }

/// Square class of a nonzero integer at a place, as an F_2 vector.
///   R: bit 0 = sign.  odd p: bit 0 = v_p parity, bit 1 = unit is a non-residue.
///   2: bit 0 = v_2 parity, bit 1 = unit = 3 mod 4, bit 2 = unit = 5 or 7 mod 8.
inline unsigned class_of(const Integer& w, const Place& v) {
  if (w == 0) throw InvalidInput("square class of zero");
  if (v.is_real()) return w < 0 ? 1u : 0u;
  Integer unit;
  const unsigned val = nt::valuation(w, v.p, &unit);
  unsigned bits = val % 2;
  if (v.p == 2) {
    const auto r8 = mpz_fdiv_ui(unit.get_mpz_t(), 8);
    if (r8 % 4 == 3) bits |= 2;
    if (r8 == 5 || r8 == 7) bits |= 4;
  } else if (nt::jacobi_symbol(unit, v.p) == -1) {
    bits |= 2;
  }
  return bits;
}

/// Does the homogeneous space have a point over R?
inline bool solvable_real(const HomogeneousSpace& h) {
  if (h.b1 > 0 && h.b2 > 0) return true;  // trivial class at R
  std::array<Integer, 3> sorted = h.e;
  std::sort(sorted.begin(), sorted.end());
  // One sample per open interval of the real line cut at the roots.
  std::vector<Rational> samples{Rational(sorted[0] - 1), Rational(sorted[2] + 1)};
  samples.emplace_back(Rational(sorted[0] + sorted[1], 2));
  samples.emplace_back(Rational(sorted[1] + sorted[2], 2));
  for (const auto& x : samples) {
    const Rational l1 = x - h.e[0], l2 = x - h.e[1], l3 = x - h.e[2];
    if (l1 * l2 * l3 <= 0) continue;
    if ((l1 > 0) == (h.b1 > 0) && (l2 > 0) == (h.b2 > 0)) return true;
  }
  return false;
}

/// Exhaustive search for x in Q_p with x - e_i in the square class of
/// (b1, b2, b1 b2), by refining disks of the x-line until every factor has
/// constant square class (or one factor's root lies in the disk, in which
/// case that factor takes every class there). Points with v(x) < -J map to
/// the trivial class; J = 2 at p = 2 and 0 otherwise.
class PadicSearch {
 public:
  /// Above this size children of a disk are not enumerated; a disk whose
  /// generic children realise a prescribed pattern of Legendre symbols of
  /// t - t_i (at most three distinct t_i) is settled by the Weil bound,
  /// which guarantees such t once p >= 29.
  static constexpr unsigned long kEnumerationLimit = 1024;

  PadicSearch(const HomogeneousSpace& h, const Integer& p) : p_(p), place_{p} {
    two_ = p == 2;
    kappa_ = two_ ? 3 : 1;
    const unsigned shift = two_ ? 2 : 0;
    Integer scale;
    mpz_pow_ui(scale.get_mpz_t(), p.get_mpz_t(), shift);
    for (int i = 0; i < 3; ++i) c_[i] = scale * h.e[i];
    target_[0] = class_of(h.b1, place_);
    target_[1] = class_of(h.b2, place_);
    target_[2] = class_of(h.b1 * h.b2, place_);
    trivial_ = target_[0] == 0 && target_[1] == 0;
    unsigned spread = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) spread = std::max(spread, nt::valuation(c_[i] - c_[j], p));
    max_depth_ = spread + kappa_ + 4;
  }

  bool run() {
    if (trivial_) return true;
    return search(Integer(0), 0, Integer(1));
  }

 private:
  static constexpr unsigned kInf = ~0u;

  unsigned val(const Integer& w) const { return w == 0 ? kInf : nt::valuation(w, p_); }

  // Disk X0 + p^n Z_p with pn = p^n.
  bool search(const Integer& x0, unsigned n, const Integer& pn) {
    if (n > max_depth_) throw InternalError("p-adic search exceeded its depth bound at p = " + p_.get_str());
    std::array<unsigned, 3> a{};
    std::array<bool, 3> contained{}, constant{};
    int n_contained = 0, n_unsettled = 0;
    for (int i = 0; i < 3; ++i) {
      a[i] = val(x0 - c_[i]);
      contained[i] = a[i] >= n;
      constant[i] = !contained[i] && n - a[i] >= kappa_;
      n_contained += contained[i];
      n_unsettled += !contained[i] && !constant[i];
    }
    if (n_unsettled == 0 && n_contained <= 1) {
      for (int i = 0; i < 3; ++i) {
        if (contained[i]) continue;
        if (class_of(x0 - c_[i], place_) != target_[i]) return false;
      }
      return true;
    }

    const Integer child_pn = pn * p_;
    if (two_ || p_ < kEnumerationLimit) {
      const unsigned long np = p_.get_ui();
      for (unsigned long t = 0; t < np; ++t) {
        if (search(x0 + pn * t, n + 1, child_pn)) return true;
      }
      return false;
    }
    return search_large_prime(x0, n, pn, a, contained, child_pn);
  }

  bool search_large_prime(const Integer& x0, unsigned n, const Integer& pn, const std::array<unsigned, 3>& a,
                          const std::array<bool, 3>& contained, const Integer& child_pn) {
    // Odd p: every non-contained factor is already constant here.
    std::array<Integer, 3> special;
    bool generic_ok = true;
    for (int i = 0; i < 3; ++i) {
      if (!contained[i]) {
        if (class_of(x0 - c_[i], place_) != target_[i]) generic_ok = false;
        continue;
      }
      Integer t = (c_[i] - x0) / pn;
      mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), p_.get_mpz_t());
      special[i] = t;
      if ((target_[i] & 1u) != n % 2) generic_ok = false;
    }
    (void)a;
    for (int i = 0; i < 3 && generic_ok; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (contained[i] && contained[j] && special[i] == special[j] && (target_[i] & 2u) != (target_[j] & 2u))
          generic_ok = false;
    if (generic_ok) return true;

    std::vector<Integer> tried;
    for (int i = 0; i < 3; ++i) {
      if (!contained[i]) continue;
      if (std::find(tried.begin(), tried.end(), special[i]) != tried.end()) continue;
      tried.push_back(special[i]);
      if (search(x0 + pn * special[i], n + 1, child_pn)) return true;
    }
    return false;
  }

  Integer p_;
  Place place_;
  bool two_ = false;
  unsigned kappa_ = 1;
  std::array<Integer, 3> c_;
  std::array<unsigned, 3> target_{};
  bool trivial_ = false;
  unsigned max_depth_ = 0;
};

}  // namespace local

inline bool locally_solvable_at(const HomogeneousSpace& h, const Place& v) {
  if (v.is_real()) return local::solvable_real(h);
  return local::PadicSearch(h, v.p).run();
}

/// Places where solvability is not automatic: R, 2, primes dividing the
/// root differences and primes dividing b1 b2.
inline std::vector<Place> relevant_places(const HomogeneousSpace& h, const nt::FactorBudget& budget = {}) {
  std::vector<Integer> primes{2};
  for (const auto& w : {Integer(h.e[1] - h.e[0]), Integer(h.e[2] - h.e[0]), Integer(h.e[2] - h.e[1]),
                        Integer(h.b1 * h.b2)}) {
    for (const auto& f : nt::factorize(w, budget).factors) primes.push_back(f.prime);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  std::vector<Place> places{Place{0}};
  for (auto& p : primes) places.push_back(Place{p});
  return places;
}

inline bool locally_solvable(const HomogeneousSpace& h, const nt::FactorBudget& budget = {}) {
  if (h.e[0] == h.e[1] || h.e[0] == h.e[2] || h.e[1] == h.e[2])
    throw InvalidInput("homogeneous space with repeated roots");
  for (const auto& v : relevant_places(h, budget))
    if (!locally_solvable_at(h, v)) return false;
  return true;
}

/// The local image at one place, as the set of solvable (class b1, class b2)
/// vectors. Sizes are forced by the structure of E(Q_v)/2E(Q_v): 2 at R,
/// 4 at odd p, 8 at p = 2.
class LocalImage {
 public:
  LocalImage(const SplitModel& s, Place v) : place_(std::move(v)), bits_(local::class_bits(place_)) {
    const auto reps = representatives();
    const unsigned n = 1u << bits_;
    unsigned count = 0;
    for (unsigned c1 = 0; c1 < n; ++c1) {
      for (unsigned c2 = 0; c2 < n; ++c2) {
        const HomogeneousSpace h{reps[c1], reps[c2], s.roots()};
        if (locally_solvable_at(h, place_)) {
          solvable_ |= std::uint64_t{1} << (c1 << bits_ | c2);
          ++count;
        }
      }
    }
    const unsigned expected = place_.is_real() ? 2 : (place_.p == 2 ? 8 : 4);
    if (count != expected)
      throw InternalError("local image at " + place_.to_string() + " has " + std::to_string(count) +
                          " classes, expected " + std::to_string(expected));
    for (unsigned i = 0; i < n * n; ++i)
      for (unsigned j = 0; j < n * n; ++j)
        if (contains_key(i) && contains_key(j) && !contains_key(i ^ j))
          throw InternalError("local image at " + place_.to_string() + " is not a group");
  }

  const Place& place() const { return place_; }
  unsigned bits() const { return bits_; }
  bool contains(unsigned c1, unsigned c2) const { return contains_key(c1 << bits_ | c2); }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(solvable_)); }

 private:
  bool contains_key(unsigned key) const { return solvable_ >> key & 1; }

  /// An integer in every local square class, indexed by its class vector.
  std::vector<Integer> representatives() const {
    const unsigned n = 1u << bits_;
    std::vector<Integer> reps(n);
    std::vector<bool> seen(n, false);
    unsigned found = 0;
    std::vector<Integer> units;
    if (place_.is_real()) {
      units = {1, -1};
    } else if (place_.p == 2) {
      units = {1, 3, 5, 7};
    } else {
      Integer q = 2;
      while (nt::jacobi_symbol(q, place_.p) != -1) ++q;
      units = {1, q};
    }
    for (const auto& u : units) {
      for (int shift = 0; shift < (place_.is_real() ? 1 : 2); ++shift) {
        const Integer w = shift ? Integer(u * place_.p) : u;
        const unsigned c = local::class_of(w, place_);
        if (!seen[c]) {
          seen[c] = true;
          reps[c] = w;
          ++found;
        }
      }
    }
    if (found != n) throw InternalError("incomplete set of local class representatives");
    return reps;
  }

  Place place_;
  unsigned bits_;
  std::uint64_t solvable_ = 0;
};

/// The 2-Selmer group as a set of square-class pairs over the generators
/// -1, p_1, ..., p_m (the bad primes).
struct SelmerGroup {
  std::vector<Integer> primes;
  unsigned generator_count = 0;             // m + 1
  std::vector<std::uint64_t> elements;      // mask1 | mask2 << generator_count
  unsigned dimension = 0;                   // log2 |elements|
  std::size_t pairs_tested = 0;

  unsigned rank_bound() const { return dimension - 2; }

  SquareClassPair pair(std::uint64_t key) const {
    const std::uint64_t low = (std::uint64_t{1} << generator_count) - 1;
    return {detail::mask_value(key & low, primes), detail::mask_value(key >> generator_count, primes)};
  }
};

namespace detail {

/// Reduced row-echelon basis over F_2; insert() reports whether the span grew.
class F2Span {
 public:
  bool insert(std::uint64_t v) {
    v = reduce(v);
    if (v == 0) return false;
    for (auto& b : basis_)
      if (b >> std::countr_zero(v) & 1) b ^= v;
    basis_.push_back(v);
    std::sort(basis_.begin(), basis_.end());
    return true;
  }
  bool contains(std::uint64_t v) const { return reduce(v) == 0; }
  unsigned dimension() const { return static_cast<unsigned>(basis_.size()); }

 private:
  std::uint64_t reduce(std::uint64_t v) const {
    for (const auto b : basis_)
      if (v >> std::countr_zero(b) & 1) v ^= b;
    return v;
  }
  std::vector<std::uint64_t> basis_;
};

}  // namespace detail

/// Enumerates every pair supported on the bad primes and keeps those whose
/// homogeneous space is solvable at every place; verifies the survivors
/// form a group of order 2^(s+2) with s >= 0.
inline SelmerGroup selmer_group(const SplitModel& s) {
  constexpr unsigned kMaxGenerators = 24;
  SelmerGroup g;
  g.primes = s.bad_primes();
  g.generator_count = static_cast<unsigned>(g.primes.size()) + 1;
  const unsigned gc = g.generator_count;
  if (gc > kMaxGenerators)
    throw InvalidInput("too many bad primes for exhaustive class enumeration (" + std::to_string(gc - 1) + ")");

  // 2 first: it is the most selective place; then odd primes, then R.
  std::vector<Place> places;
  for (const auto& p : g.primes) places.push_back(Place{p});
  places.push_back(Place{0});

  std::vector<LocalImage> images;
  std::vector<std::vector<std::uint8_t>> local_vectors;
  const std::size_t n_masks = std::size_t{1} << gc;
  for (const auto& v : places) {
    images.emplace_back(s, v);
    std::vector<std::uint8_t> gen(gc);
    gen[0] = static_cast<std::uint8_t>(local::class_of(Integer(-1), v));
    for (unsigned i = 1; i < gc; ++i) gen[i] = static_cast<std::uint8_t>(local::class_of(g.primes[i - 1], v));
    std::vector<std::uint8_t> vec(n_masks, 0);
    for (std::size_t m = 1; m < n_masks; ++m) {
      const unsigned low = static_cast<unsigned>(std::countr_zero(m));
      vec[m] = vec[m & (m - 1)] ^ gen[low];
    }
    local_vectors.push_back(std::move(vec));
  }

  for (std::size_t m1 = 0; m1 < n_masks; ++m1) {
    for (std::size_t m2 = 0; m2 < n_masks; ++m2) {
      bool ok = true;
      for (std::size_t v = 0; v < places.size() && ok; ++v)
        ok = images[v].contains(local_vectors[v][m1], local_vectors[v][m2]);
      if (ok) g.elements.push_back(static_cast<std::uint64_t>(m1) | static_cast<std::uint64_t>(m2) << gc);
    }
  }
  g.pairs_tested = n_masks * n_masks;
  std::sort(g.elements.begin(), g.elements.end());

  const std::size_t count = g.elements.size();
  if (count < 4 || (count & (count - 1)) != 0)
    throw InternalError("Selmer set has " + std::to_string(count) + " elements, not a power of 2 >= 4");
  detail::F2Span span;
  for (const auto e : g.elements) span.insert(e);
  if ((std::size_t{1} << span.dimension()) != count)
    throw InternalError("locally solvable classes are not closed under multiplication");
  g.dimension = span.dimension();
  return g;
}

inline unsigned selmer_rank_upper(const IntegralModel& m, const nt::FactorBudget& budget = {}) {
  return selmer_group(SplitModel::from(m, budget)).rank_bound();
}

struct SpaceSolution {
  bool at_infinity = false;  // the trivial class, realised by O
  Rational z1, z2, z3;
  RationalPoint point;
};

/// Searches z1 = r/s with 0 <= r <= H, 1 <= s <= H for which both
/// b2 (b1 r^2 - d2 s^2) and b1 b2 (b1 r^2 - d3 s^2) are squares. Returns
/// nothing when the box is exhausted, which leaves the class undecided.
inline std::optional<SpaceSolution> try_global_point_search(const HomogeneousSpace& h, unsigned long height_bound) {
  if (h.b1 == 1 && h.b2 == 1) {
    SpaceSolution sol;
    sol.at_infinity = true;
    return sol;
  }
  const Integer d2 = h.e[1] - h.e[0];
  const Integer d3 = h.e[2] - h.e[0];
  const Integer b12 = h.b1 * h.b2;

  // Square filters: value mod m must be a square mod m.
  constexpr std::array<unsigned, 5> kMods{64, 63, 65, 11, 17};
  std::array<std::vector<bool>, kMods.size()> is_sq;
  std::array<std::array<long, 4>, kMods.size()> co{};  // b1, b2, d2, d3 (b12 derived) mod m
  for (std::size_t i = 0; i < kMods.size(); ++i) {
    const unsigned m = kMods[i];
    is_sq[i].assign(m, false);
    for (unsigned t = 0; t < m; ++t) is_sq[i][(t * t) % m] = true;
    co[i] = {static_cast<long>(mpz_fdiv_ui(h.b1.get_mpz_t(), m)), static_cast<long>(mpz_fdiv_ui(h.b2.get_mpz_t(), m)),
             static_cast<long>(mpz_fdiv_ui(d2.get_mpz_t(), m)), static_cast<long>(mpz_fdiv_ui(d3.get_mpz_t(), m))};
  }

  // Real constraints on t = r/s: t^2 >= or <= d2/b1 and d3/b1, by signs.
  const long double b1f = h.b1.get_d();
  const long double tau2 = d2.get_d() / b1f, tau3 = d3.get_d() / b1f;
  long double lo = 0, hi = INFINITY;
  auto apply = [&](bool at_least, long double tau) {
    if (at_least) lo = std::max(lo, tau);
    else hi = std::min(hi, tau);
  };
  apply(b12 > 0, tau2);
  apply(h.b2 > 0, tau3);
  if (hi < 0 || lo > hi * (1 + 1e-12L) + 1e-30L) return std::nullopt;
  const long double slo = std::sqrt(std::max(0.0L, lo)), shi = std::sqrt(hi);

  Integer r2, s2, v2, v3, z2n, z3n;
  for (unsigned long s = 1; s <= height_bound; ++s) {
    const long double rl = std::floor(slo * s) - 1, rh = std::isinf(shi) ? height_bound : std::ceil(shi * s) + 1;
    const unsigned long r_lo = rl < 0 ? 0 : static_cast<unsigned long>(rl);
    const unsigned long r_hi = rh > height_bound ? height_bound : static_cast<unsigned long>(rh);
    if (r_lo > r_hi) continue;
    std::array<long, kMods.size()> ssq{};
    for (std::size_t i = 0; i < kMods.size(); ++i) ssq[i] = static_cast<long>((s % kMods[i]) * (s % kMods[i]) % kMods[i]);
    for (unsigned long r = r_lo; r <= r_hi; ++r) {
      bool pass = true;
      for (std::size_t i = 0; i < kMods.size() && pass; ++i) {
        const long m = kMods[i];
        const long rr = static_cast<long>((r % m) * (r % m) % m);
        const long base2 = ((co[i][0] * rr - co[i][2] * ssq[i]) % m + m) % m;
        const long base3 = ((co[i][0] * rr - co[i][3] * ssq[i]) % m + m) % m;
        const long w2 = co[i][1] * base2 % m;
        const long w3 = (co[i][0] * co[i][1] % m) * base3 % m;
        pass = is_sq[i][w2] && is_sq[i][w3];
      }
      if (!pass) continue;
      if (std::gcd(r, s) != 1) continue;
      r2 = Integer(r) * r;
      s2 = Integer(s) * s;
      v2 = h.b2 * (h.b1 * r2 - d2 * s2);
      if (!nt::is_square(v2)) continue;
      v3 = b12 * (h.b1 * r2 - d3 * s2);
      if (!nt::is_square(v3)) continue;
      // z2 = sqrt(v2) / (b2 s), z3 = sqrt(v3) / (b1 b2 s).
      z2n = nt::isqrt(v2);
      z3n = nt::isqrt(v3);
      SpaceSolution sol;
      sol.z1 = Rational(Integer(r), Integer(s));
      sol.z2 = Rational(z2n, h.b2 * s);
      sol.z3 = Rational(z3n, b12 * s);
      sol.z1.canonicalize();
      sol.z2.canonicalize();
      sol.z3.canonicalize();
      const Rational x = h.b1 * sol.z1 * sol.z1 + h.e[0];
      const Rational y = b12 * sol.z1 * sol.z2 * sol.z3;
      sol.point = RationalPoint::affine(x, y);
      return sol;
    }
  }
  return std::nullopt;
}

/// Integral points with x in [e1, e2] or [e3, oo), scanning at most `budget`
/// abscissae next to each real root.
inline std::vector<RationalPoint> search_integral_points(const SplitModel& s, unsigned long budget) {
  std::vector<RationalPoint> found;
  const auto& e = s.roots();
  auto scan = [&](const Integer& start, const Integer& stop) {
    if (stop < start) return;
    constexpr std::array<unsigned, 4> kMods{64, 63, 65, 11};
    std::array<std::vector<bool>, kMods.size()> is_sq;
    std::array<std::array<unsigned long, 3>, kMods.size()> l{};
    for (std::size_t i = 0; i < kMods.size(); ++i) {
      is_sq[i].assign(kMods[i], false);
      for (unsigned t = 0; t < kMods[i]; ++t) is_sq[i][(t * t) % kMods[i]] = true;
      for (int j = 0; j < 3; ++j) l[i][j] = mpz_fdiv_ui(Integer(start - e[j]).get_mpz_t(), kMods[i]);
    }
    Integer x = start;
    for (Integer n = 0; x <= stop && n < budget; ++n, ++x) {
      bool pass = true;
      for (std::size_t i = 0; i < kMods.size(); ++i) {
        const unsigned long m = kMods[i];
        if (pass) pass = is_sq[i][l[i][0] * l[i][1] % m * l[i][2] % m];
        for (int j = 0; j < 3; ++j) l[i][j] = l[i][j] + 1 == m ? 0 : l[i][j] + 1;
      }
      if (!pass) continue;
      const Integer f = (x - e[0]) * (x - e[1]) * (x - e[2]);
      if (f == 0 || !nt::is_square(f)) continue;
      found.push_back(RationalPoint::affine(Rational(x), Rational(nt::isqrt(f))));
    }
  };
  scan(e[0] + 1, e[1] - 1);
  scan(e[2] + 1, e[2] + budget);
  return found;
}

/// As try_global_point_search, but an exhausted box throws SearchExhausted.
inline SpaceSolution global_point_search(const HomogeneousSpace& h, unsigned long height_bound) {
  auto sol = try_global_point_search(h, height_bound);
  if (!sol) throw SearchExhausted(height_bound);
  return *sol;
}

struct Effort {
  unsigned long height_bound = 1ul << 12;      // first global search box
  unsigned long max_height_bound = 1ul << 12;  // doubled up to this
  unsigned long direct_search_budget = 1ul << 18;
  nt::FactorBudget factor_budget{};

  /// `level` doublings of the default box, capped at 2^16.
  static Effort at_level(unsigned level) {
    Effort e;
    e.max_height_bound = std::min(1ul << 16, e.height_bound << std::min(level, 4u));
    return e;
  }
};

struct Witness {
  RationalPoint point;  // on the integral model
  SquareClassPair image;
};

enum class RankStatus { kDetermined, kInterval };

inline std::string to_string(RankStatus s) { return s == RankStatus::kDetermined ? "determined" : "interval"; }

struct RankBounds {
  unsigned rank_lower = 0;
  unsigned selmer_upper = 0;
  std::vector<Witness> witnesses;
  std::vector<SquareClassPair> undecided_classes;  // extend the found classes to the Selmer group
  RankStatus status = RankStatus::kInterval;
  unsigned long height_reached = 0;
};

/// Certified rank <= selmer_upper and rank >= rank_lower, with explicit
/// points for every class counted in the lower bound. `known_points` are
/// points on `m` supplied by the caller (for the family, the base point).
inline RankBounds rank_bounds(const IntegralModel& m, const Effort& effort = {},
                              std::span<const RationalPoint> known_points = {}) {
  const SplitModel split = SplitModel::from(m, effort.factor_budget);
  const SelmerGroup sel = selmer_group(split);
  const CubicModel cubic = split.cubic();
  const unsigned gc = sel.generator_count;

  auto key_of = [&](const SquareClassPair& c) -> std::uint64_t {
    const auto k1 = detail::class_mask(Rational(c.b1), sel.primes);
    const auto k2 = detail::class_mask(Rational(c.b2), sel.primes);
    if (!k1 || !k2) throw InternalError("class " + c.to_string() + " not supported on the bad primes");
    return *k1 | *k2 << gc;
  };

  RankBounds out;
  out.selmer_upper = sel.rank_bound();
  detail::F2Span found;

  auto admit = [&](const RationalPoint& p, bool record) {
    const auto img = descent_image(split, p);
    const auto key = key_of(img);
    if (!std::binary_search(sel.elements.begin(), sel.elements.end(), key))
      throw InternalError("image of a rational point " + img.to_string() + " outside the Selmer group");
    if (found.insert(key) && record) out.witnesses.push_back({p, img});
  };

  for (const auto& t : torsion::torsion_subgroup(m).points) admit(t, false);
  if (found.dimension() != 2) throw InternalError("torsion images do not span a 2-dimensional space");
  for (const auto& p : known_points) admit(p, true);

  auto complete = [&] { return found.dimension() == sel.dimension; };
  if (!complete()) {
    for (const auto& p : search_integral_points(split, effort.direct_search_budget)) {
      admit(p, true);
      if (complete()) break;
    }
  }

  // Per-class searches, smallest classes first, doubling the box.
  std::vector<std::uint64_t> order = sel.elements;
  auto weight = [&](std::uint64_t key) {
    const auto c = sel.pair(key);
    return Integer(abs(c.b1) * abs(c.b2));
  };
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return weight(x) < weight(y); });
  unsigned long h = effort.height_bound;
  out.height_reached = 0;
  while (!complete()) {
    out.height_reached = h;
    for (const auto key : order) {
      if (complete()) break;
      if (found.contains(key)) continue;
      const auto space = HomogeneousSpace::of(split, sel.pair(key));
      if (auto sol = try_global_point_search(space, h)) {
        if (!cubic.contains(sol->point)) throw InternalError("homogeneous space solution maps off the curve");
        admit(sol->point, true);
      }
    }
    if (complete() || h >= effort.max_height_bound) break;
    h = std::min(effort.max_height_bound, h * 2);
  }

  out.rank_lower = found.dimension() - 2;
  if (out.rank_lower > out.selmer_upper) throw InternalError("rank lower bound exceeds the Selmer bound");
  out.status = out.rank_lower == out.selmer_upper ? RankStatus::kDetermined : RankStatus::kInterval;
  if (!complete()) {
    detail::F2Span extended = found;
    for (const auto key : order)
      if (extended.insert(key)) out.undecided_classes.push_back(sel.pair(key));
  }
  return out;
}

}  // namespace heron::descent
