#pragma once

// Batch scans over ranges of k: sieve every curve, then run torsion and the
// 2-descent on the best-scoring fraction. Records come out in increasing k
// whatever the number of worker threads.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heron/descent.hpp"
#include "heron/heron_family.hpp"
#include "heron/sieve.hpp"
#include "heron/torsion.hpp"
#include "json.hpp"

namespace heron::scan {

/// k = p/q in [lo, hi] with 1 <= q <= q_max; q_max = 1 gives integers.
struct RangeSpec {
  Rational lo = 3;
  Rational hi = 50;
  unsigned long q_max = 1;
};

/// Every admissible k of the range in increasing order, each once.
inline std::vector<Rational> enumerate_k(const RangeSpec& r) {
  if (r.q_max == 0) throw InvalidInput("q-max must be positive");
  if (r.hi < r.lo) throw InvalidInput("empty k range: k-max < k-min");
  std::vector<Rational> out;
  for (unsigned long q = 1; q <= r.q_max; ++q) {
    Integer p;
    mpz_cdiv_q(p.get_mpz_t(), Integer(r.lo.get_num() * q).get_mpz_t(), r.lo.get_den().get_mpz_t());
    for (; Rational(p, Integer(q)) <= r.hi; ++p) {
      Integer g;
      mpz_gcd_ui(g.get_mpz_t(), p.get_mpz_t(), q);
      if (g != 1) continue;
      Rational k(p, Integer(q));
      k.canonicalize();
      if (!family::is_singular_parameter(k)) out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

enum class Status { kDetermined, kInterval, kUnranked, kError };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::kDetermined: return "determined";
    case Status::kInterval: return "interval";
    case Status::kUnranked: return "unranked";
    case Status::kError: return "error";
  }
  return "error";
}

inline Status parse_status(const std::string& s) {
  if (s == "determined") return Status::kDetermined;
  if (s == "interval") return Status::kInterval;
  if (s == "unranked") return Status::kUnranked;
  if (s == "error") return Status::kError;
  throw InvalidInput("unknown record status '" + s + "'");
}

struct Timings {
  double sieve_ms = 0;
  double rank_ms = 0;
  friend bool operator==(const Timings&, const Timings&) = default;
};

struct ScanRecord {
  std::string k;
  std::string scale, a2, a4, a6;
  std::optional<std::string> disc_odd;  // odd part of the discriminant, factored
  std::optional<std::string> torsion;
  std::string s100, s1000, s10000;
  std::optional<unsigned> rank_lower, selmer_upper;
  Status status = Status::kUnranked;
  std::optional<std::string> error;
  std::optional<Timings> timings;

  friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

namespace detail {

template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, unsigned>) return std::to_string(*v);
  else return *v;
}

inline std::optional<std::string> opt_string(const nlohmann::ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

inline std::optional<unsigned> opt_unsigned(const nlohmann::ordered_json& j, const char* key) {
  const auto s = opt_string(j, key);
  if (!s) return std::nullopt;
  std::size_t used = 0;
  const unsigned long v = std::stoul(*s, &used);
  if (used != s->size()) throw InvalidInput(std::string("field ") + key + " is not a decimal integer");
  return static_cast<unsigned>(v);
}

}  // namespace detail

/// One JSON object, keys in a fixed order, every integer a decimal string.
inline std::string to_json_line(const ScanRecord& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["scale"] = r.scale;
  j["a2"] = r.a2;
  j["a4"] = r.a4;
  j["a6"] = r.a6;
  j["disc_odd"] = detail::opt(r.disc_odd);
  j["torsion"] = detail::opt(r.torsion);
  j["S100"] = r.s100;
  j["S1000"] = r.s1000;
  j["S10000"] = r.s10000;
  j["rank_lower"] = detail::opt(r.rank_lower);
  j["selmer_upper"] = detail::opt(r.selmer_upper);
  j["status"] = to_string(r.status);
  j["error"] = detail::opt(r.error);
  if (r.timings) j["timings_ms"] = {{"sieve", r.timings->sieve_ms}, {"rank", r.timings->rank_ms}};
  return j.dump();
}

inline ScanRecord from_json_line(const std::string& line) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed record: ") + e.what());
  }
  try {
    ScanRecord r;
    r.k = j.at("k").get<std::string>();
    r.scale = j.at("scale").get<std::string>();
    r.a2 = j.at("a2").get<std::string>();
    r.a4 = j.at("a4").get<std::string>();
    r.a6 = j.at("a6").get<std::string>();
    r.disc_odd = detail::opt_string(j, "disc_odd");
    r.torsion = detail::opt_string(j, "torsion");
    r.s100 = j.at("S100").get<std::string>();
    r.s1000 = j.at("S1000").get<std::string>();
    r.s10000 = j.at("S10000").get<std::string>();
    r.rank_lower = detail::opt_unsigned(j, "rank_lower");
    r.selmer_upper = detail::opt_unsigned(j, "selmer_upper");
    r.status = parse_status(j.at("status").get<std::string>());
    r.error = detail::opt_string(j, "error");
    if (j.contains("timings_ms")) {
      const auto& t = j.at("timings_ms");
      r.timings = Timings{t.at("sieve").get<double>(), t.at("rank").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("record does not match the schema: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw InvalidInput("record does not match the schema: bad integer field");
  }
}

inline const char* csv_header() {
  return "k,a2,a4,a6,torsion,S100,S1000,S10000,rank_lower,selmer_upper,status";
}

inline std::string to_csv_row(const ScanRecord& r) {
  auto u = [](const std::optional<unsigned>& v) { return v ? std::to_string(*v) : std::string(); };
  std::ostringstream os;
  os << r.k << ',' << r.a2 << ',' << r.a4 << ',' << r.a6 << ',' << r.torsion.value_or("") << ',' << r.s100 << ','
     << r.s1000 << ',' << r.s10000 << ',' << u(r.rank_lower) << ',' << u(r.selmer_upper) << ','
     << to_string(r.status);
  return os.str();
}

/// Factored odd part of the discriminant of a split model: 16 prod (e_i - e_j)^2
/// loses its 2-part, and each difference is far smaller than the discriminant.
inline std::string odd_discriminant_factorization(const IntegralModel& m, const nt::FactorBudget& budget) {
  const auto two = torsion::two_torsion(m);
  if (two.size() != 3) throw InvalidInput("model does not have full rational 2-torsion");
  std::map<Integer, unsigned long> exps;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Rational d = two[i].x - two[j].x;
      for (const auto& f : nt::factorize(d.get_num(), budget).factors)
        if (f.prime != 2) exps[f.prime] += 2 * f.exponent;
    }
  nt::Factorization f;
  for (const auto& [p, e] : exps) f.factors.push_back({p, static_cast<unsigned>(e)});
  return f.factors.empty() ? "1" : f.to_string();
}

struct ScanOptions {
  RangeSpec range;
  std::uint64_t selection_limit = 1000;  // N of the score used to pick curves
  double top_fraction = 1.0;             // percent of curves that get the descent
  std::vector<Rational> pinned;          // always get the descent
  descent::Effort effort;
  unsigned threads = 1;
  bool timings = false;
  std::set<std::string> skip;  // k already on record (resume); not emitted again
};

namespace detail {

struct CurveState {
  Rational k;
  ScanRecord record;
  std::optional<IntegralModel> model;
  std::optional<RationalPoint> base;  // on the integral model
  long double selection_score = 0;
};

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs fn(i) for i in [0, n) on `threads` workers, handing results to sink
/// in index order.
template <class T, class Fn, class Sink>
void ordered_parallel_map(std::size_t n, unsigned threads, Fn fn, Sink sink) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) sink(i, fn(i));
    return;
  }
  std::vector<std::optional<T>> slots(n);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      T value = fn(i);
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(value);
      }
      cv.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(worker);
  for (std::size_t i = 0; i < n; ++i) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return slots[i].has_value(); });
    T value = std::move(*slots[i]);
    slots[i].reset();
    lock.unlock();
    sink(i, std::move(value));
  }
}

inline CurveState sieve_phase(const Rational& k, const ScanOptions& opt) {
  CurveState c;
  c.k = k;
  c.record.k = nt::to_string(k);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto fc = family::make_family_curve(k, opt.effort.factor_budget);
    c.model = fc.integral;
    c.base = fc.base_on_integral();
    c.record.scale = fc.integral.scale.get_str();
    c.record.a2 = fc.integral.a2.get_str();
    c.record.a4 = fc.integral.a4.get_str();
    c.record.a6 = fc.integral.a6.get_str();
    try {
      c.record.disc_odd = odd_discriminant_factorization(fc.integral, opt.effort.factor_budget);
    } catch (const FactorizationIncomplete&) {
      c.record.disc_odd.reset();
    }
    const auto scores = sieve::sieve_scores(fc.integral, {100, 1000, 10000, opt.selection_limit});
    c.record.s100 = scores[0].to_string();
    c.record.s1000 = scores[1].to_string();
    c.record.s10000 = scores[2].to_string();
    c.selection_score = scores[3].value;
  } catch (const std::exception& e) {
    c.model.reset();
    c.record.status = Status::kError;
    c.record.error = e.what();
  }
  if (opt.timings) c.record.timings = Timings{ms_since(t0), 0};
  return c;
}

inline ScanRecord rank_phase(CurveState c, const ScanOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.record.torsion = torsion::torsion_subgroup(*c.model).structure();
    const std::vector<RationalPoint> known{*c.base};
    const auto rb = descent::rank_bounds(*c.model, opt.effort, known);
    c.record.rank_lower = rb.rank_lower;
    c.record.selmer_upper = rb.selmer_upper;
    c.record.status = rb.status == descent::RankStatus::kDetermined ? Status::kDetermined : Status::kInterval;
  } catch (const std::exception& e) {
    c.record.status = Status::kError;
    c.record.error = e.what();
  }
  if (opt.timings) c.record.timings->rank_ms = ms_since(t0);
  return std::move(c.record);
}

}  // namespace detail

/// Phase 1 scores every curve; phase 2 runs torsion and descent on the top
/// `top_fraction` percent by S(selection_limit) (ties to smaller k) and on
/// pinned k. One record per curve reaches `emit`, in increasing k; a curve
/// that fails carries its error in the record.
inline void scan(const ScanOptions& opt, const std::function<void(const ScanRecord&)>& emit) {
  if (opt.top_fraction < 0 || opt.top_fraction > 100) throw InvalidInput("top fraction must be in [0, 100]");
  if (opt.selection_limit < 2) throw InvalidInput("sieve limit must be at least 2");
  std::vector<Rational> ks = enumerate_k(opt.range);
  for (const auto& p : opt.pinned) {
    if (family::is_singular_parameter(p)) throw SingularParameter(nt::to_string(p));
    if (!std::binary_search(ks.begin(), ks.end(), p)) ks.insert(std::upper_bound(ks.begin(), ks.end(), p), p);
  }

  std::vector<detail::CurveState> curves(ks.size());
  detail::ordered_parallel_map<detail::CurveState>(
      ks.size(), opt.threads, [&](std::size_t i) { return detail::sieve_phase(ks[i], opt); },
      [&](std::size_t i, detail::CurveState c) { curves[i] = std::move(c); });

  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (curves[i].model) ranked.push_back(i);
  std::stable_sort(ranked.begin(), ranked.end(), [&](auto a, auto b) {
    return curves[a].selection_score > curves[b].selection_score;
  });
  const auto quota = static_cast<std::size_t>(std::ceil(opt.top_fraction / 100.0 * curves.size() - 1e-9));
  std::vector<bool> selected(curves.size(), false);
  for (std::size_t i = 0; i < std::min(quota, ranked.size()); ++i) selected[ranked[i]] = true;
  for (const auto& p : opt.pinned) {
    const auto i = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), p) - ks.begin());
    if (curves[i].model) selected[i] = true;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (!opt.skip.count(curves[i].record.k)) todo.push_back(i);
  detail::ordered_parallel_map<ScanRecord>(
      todo.size(), opt.threads,
      [&](std::size_t j) {
        auto& c = curves[todo[j]];
        if (!selected[todo[j]] || !c.model) return c.record;
        return detail::rank_phase(c, opt);
      },
      [&](std::size_t, const ScanRecord& r) { emit(r); });
}

inline std::vector<ScanRecord> scan_all(const ScanOptions& opt) {
  std::vector<ScanRecord> out;
  scan(opt, [&](const ScanRecord& r) { out.push_back(r); });
  return out;
}

struct RankDistribution {
  std::vector<std::pair<unsigned, double>> ranks;  // (rank, percent), rank descending
  double undetermined = 0;
  std::size_t ranked_records = 0;  // determined + interval; the percent base
  std::size_t interval_records = 0;
  std::size_t excluded_records = 0;  // unranked or error

  /// Two columns, Rank and Percent: ranks descending, then undetermined.
  std::string pretty() const {
    std::ostringstream os;
    char buf[64];
    os << "Rank          Percent\n";
    for (const auto& [rank, pct] : ranks) {
      std::snprintf(buf, sizeof buf, "%-13u %.1f%%\n", rank, pct);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%-13s %.1f%%\n", "undetermined", undetermined);
    os << buf;
    return os.str();
  }
};

/// Percentages over records with status determined or interval; interval
/// records are the undetermined bucket. Percents are rounded to 0.1.
inline RankDistribution rank_distribution(const std::vector<ScanRecord>& records) {
  std::map<unsigned, std::size_t, std::greater<>> buckets;
  RankDistribution d;
  for (const auto& r : records) {
    if (r.status == Status::kDetermined) {
      if (!r.rank_lower) throw InvalidInput("determined record without a rank at k = " + r.k);
      ++buckets[*r.rank_lower];
      ++d.ranked_records;
    } else if (r.status == Status::kInterval) {
      ++d.interval_records;
      ++d.ranked_records;
    } else {
      ++d.excluded_records;
    }
  }
  if (d.ranked_records == 0) throw EmptyInput("no ranked records to summarise");
  auto pct = [&](std::size_t n) {
    return std::round(1000.0 * static_cast<double>(n) / static_cast<double>(d.ranked_records)) / 10.0;
  };
  for (const auto& [rank, n] : buckets) d.ranks.emplace_back(rank, pct(n));
  d.undetermined = pct(d.interval_records);
  return d;
}

}  // namespace heron::scan
