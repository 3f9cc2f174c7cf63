#pragma once

// The heron command line: construct, torsion, rank, sieve, descent, scan and
// report. run_cli() does all the work so tests can drive it in-process.
//
// Exit codes: 0 success, 1 internal or I/O error, 2 bad input, 3 policy
// failure (an interval rank under --require-determined).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heron/descent.hpp"
#include "heron/heron_family.hpp"
#include "heron/scan.hpp"
#include "heron/sieve.hpp"
#include "heron/torsion.hpp"
#include "json.hpp"

namespace heron::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kBadInput = 2, kPolicy = 3 };

struct RunConfig {
  std::string command;
  std::string k;
  std::string k_min = "3", k_max = "50";
  unsigned long q_max = 1;
  std::uint64_t limit = 1000;
  std::optional<unsigned long> height_bound;
  double top_fraction = 1.0;
  unsigned effort = 0;
  std::string format;  // empty: jsonl for scan, pretty otherwise
  std::string out;
  std::string in;
  bool resume = false;
  bool require_determined = false;
  unsigned threads = 1;
  std::vector<std::string> pins;
  bool timings = false;
  unsigned long trial_bound = nt::FactorBudget{}.trial_bound;
  unsigned long rho_iterations = nt::FactorBudget{}.rho_iterations;

  descent::Effort effort_params() const {
    auto e = descent::Effort::at_level(effort);
    if (height_bound) {
      e.height_bound = *height_bound;
      e.max_height_bound = std::max(e.max_height_bound, *height_bound);
    }
    e.factor_budget = {trial_bound, rho_iterations};
    return e;
  }
};

/// A rejected combination of otherwise well-formed options.
class UsageError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline std::string model_line(const Rational& a2, const Rational& a4, const Rational& a6) {
  return "y^2 = x^3 + (" + a2.get_str() + ") x^2 + (" + a4.get_str() + ") x + (" + a6.get_str() + ")";
}

inline std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("HERON_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / p;
  }
  return p;
}

inline void require_k(const RunConfig& c) {
  if (c.k.empty()) throw UsageError(c.command + " needs --k");
}

inline void require_format(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (c.format == f) return;
  throw UsageError("format '" + c.format + "' is not available for " + c.command);
}

inline int cmd_construct(const RunConfig& c, std::ostream& out) {
  require_k(c);
  require_format(c, {"pretty", "jsonl"});
  const auto fc = family::make_family_curve(nt::parse_rational(c.k), c.effort_params().factor_budget);
  const auto& t = fc.triple;
  const auto right = family::right_triangle_relation(fc.k);
  const Rational area = family::heron_area(fc.k);
  const auto table = family::table_model(fc.k);
  if (c.format == "jsonl") {
    ordered_json j;
    j["k"] = nt::to_string(fc.k);
    j["sides"] = {t.a.get_str(), t.b.get_str(), t.c.get_str()};
    j["semiperimeter"] = t.semiperimeter.get_str();
    j["area"] = area.get_str();
    j["geometric"] = t.geometric;
    j["right_triangle"] = right ? ordered_json(family::to_string(*right)) : ordered_json(nullptr);
    j["product_model"] = {fc.product.a2().get_str(), fc.product.a4().get_str(), fc.product.a6().get_str()};
    j["shifted_model"] = {fc.shifted.a2().get_str(), fc.shifted.a4().get_str(), fc.shifted.a6().get_str()};
    j["table_model"] = {table.a2().get_str(), table.a4().get_str(), table.a6().get_str()};
    j["integral_model"] = {fc.integral.a2.get_str(), fc.integral.a4.get_str(), fc.integral.a6.get_str()};
    j["scale"] = fc.integral.scale.get_str();
    j["discriminant"] = fc.product.discriminant().get_str();
    j["base_point"] = {fc.base.x.get_str(), fc.base.y.get_str()};
    out << j.dump() << '\n';
    return kOk;
  }
  out << "k = " << nt::to_string(fc.k) << '\n'
      << "sides           a = " << t.a << ", b = " << t.b << ", c = " << t.c
      << (t.geometric ? "" : "  (not a geometric triangle)") << '\n'
      << "semiperimeter   " << t.semiperimeter << '\n'
      << "area            " << area << '\n';
  if (right) out << "right triangle  " << family::to_string(*right) << '\n';
  out << "product model   " << model_line(fc.product.a2(), fc.product.a4(), fc.product.a6()) << '\n'
      << "shifted model   " << model_line(fc.shifted.a2(), fc.shifted.a4(), fc.shifted.a6()) << '\n'
      << "table model     " << model_line(table.a2(), table.a4(), table.a6()) << '\n'
      << "integral model  u = " << fc.integral.scale << '\n'
      << "  a2 = " << fc.integral.a2 << '\n'
      << "  a4 = " << fc.integral.a4 << '\n'
      << "  a6 = " << fc.integral.a6 << '\n'
      << "discriminant    " << fc.product.discriminant() << '\n'
      << "base point      " << to_string(fc.base) << '\n';
  return kOk;
}

inline int cmd_torsion(const RunConfig& c, std::ostream& out) {
  require_k(c);
  require_format(c, {"pretty", "jsonl"});
  const auto fc = family::make_family_curve(nt::parse_rational(c.k), c.effort_params().factor_budget);
  const auto g = torsion::torsion_subgroup(fc.integral);
  const auto bound = torsion::stable_torsion_bound(fc.integral);
  const auto order = torsion::point_order(fc.integral, fc.base_on_integral());
  if (c.format == "jsonl") {
    ordered_json j;
    j["k"] = nt::to_string(fc.k);
    j["torsion"] = g.structure();
    j["order"] = std::to_string(g.order());
    j["reduction_bound"] = std::to_string(bound);
    ordered_json gens = ordered_json::array();
    for (const auto& p : g.generators) gens.push_back({p.x.get_str(), p.y.get_str()});
    j["generators"] = gens;
    j["base_point_order"] = order ? ordered_json(std::to_string(*order)) : ordered_json("infinite");
    out << j.dump() << '\n';
    return kOk;
  }
  out << "k = " << nt::to_string(fc.k) << '\n'
      << "torsion          " << g.structure() << '\n'
      << "reduction bound  " << bound << '\n';
  for (const auto& p : g.generators) out << "generator        " << to_string(p) << '\n';
  out << "base point order " << (order ? std::to_string(*order) : std::string("infinite")) << '\n';
  return kOk;
}

inline int cmd_rank(const RunConfig& c, std::ostream& out) {
  require_k(c);
  require_format(c, {"pretty", "jsonl"});
  const auto effort = c.effort_params();
  const auto fc = family::make_family_curve(nt::parse_rational(c.k), effort.factor_budget);
  const std::vector<RationalPoint> known{fc.base_on_integral()};
  const auto rb = descent::rank_bounds(fc.integral, effort, known);
  if (c.format == "jsonl") {
    ordered_json j;
    j["k"] = nt::to_string(fc.k);
    j["rank_lower"] = std::to_string(rb.rank_lower);
    j["selmer_upper"] = std::to_string(rb.selmer_upper);
    j["status"] = descent::to_string(rb.status);
    ordered_json w = ordered_json::array();
    for (const auto& x : rb.witnesses)
      w.push_back({{"point", {x.point.x.get_str(), x.point.y.get_str()}},
                   {"image", {x.image.b1.get_str(), x.image.b2.get_str()}}});
    j["witnesses"] = w;
    ordered_json u = ordered_json::array();
    for (const auto& x : rb.undecided_classes) u.push_back({x.b1.get_str(), x.b2.get_str()});
    j["undecided"] = u;
    out << j.dump() << '\n';
  } else {
    out << "k = " << nt::to_string(fc.k) << '\n'
        << "rank in [" << rb.rank_lower << ", " << rb.selmer_upper << "] " << descent::to_string(rb.status) << '\n'
        << "integral model  [" << fc.integral.a2 << ", " << fc.integral.a4 << ", " << fc.integral.a6 << "]\n";
    for (const auto& w : rb.witnesses) out << "witness  " << to_string(w.point) << "  image " << w.image.to_string() << '\n';
    for (const auto& u : rb.undecided_classes) out << "undecided class  " << u.to_string() << '\n';
    if (rb.height_reached) out << "search height reached " << rb.height_reached << '\n';
  }
  if (c.require_determined && rb.status != descent::RankStatus::kDetermined) return kPolicy;
  return kOk;
}

inline int cmd_sieve(const RunConfig& c, std::ostream& out) {
  require_k(c);
  require_format(c, {"pretty", "jsonl"});
  const auto fc = family::make_family_curve(nt::parse_rational(c.k), c.effort_params().factor_budget);
  const auto s = sieve::sieve_score(fc.integral, c.limit);
  if (c.format == "jsonl") {
    ordered_json j;
    j["k"] = nt::to_string(fc.k);
    j["N"] = std::to_string(s.limit);
    j["S"] = s.to_string();
    j["primes_used"] = std::to_string(s.primes_used);
    ordered_json skipped = ordered_json::array();
    for (auto p : s.primes_skipped) skipped.push_back(std::to_string(p));
    j["primes_skipped"] = skipped;
    out << j.dump() << '\n';
    return kOk;
  }
  out << "k = " << nt::to_string(fc.k) << '\n'
      << "S(" << s.limit << ") = " << s.to_string() << '\n'
      << "good primes used  " << s.primes_used << '\n'
      << "bad primes skipped";
  for (auto p : s.primes_skipped) out << ' ' << p;
  out << '\n';
  return kOk;
}

inline int cmd_descent(const RunConfig& c, std::ostream& out) {
  require_k(c);
  require_format(c, {"pretty"});
  const auto effort = c.effort_params();
  const auto fc = family::make_family_curve(nt::parse_rational(c.k), effort.factor_budget);
  const auto split = descent::SplitModel::from(fc.integral, effort.factor_budget);
  const auto sel = descent::selmer_group(split);
  const std::vector<RationalPoint> known{fc.base_on_integral()};
  const auto rb = descent::rank_bounds(fc.integral, effort, known);

  // Classes realised by rational points: torsion plus the witnesses.
  std::set<std::string> realised_gens;
  descent::detail::F2Span span;
  const unsigned gc = sel.generator_count;
  auto key = [&](const descent::SquareClassPair& p) {
    return *descent::detail::class_mask(Rational(p.b1), sel.primes) |
           *descent::detail::class_mask(Rational(p.b2), sel.primes) << gc;
  };
  for (const auto& t : torsion::torsion_subgroup(fc.integral).points) span.insert(key(descent::descent_image(split, t)));
  for (const auto& w : rb.witnesses) span.insert(key(w.image));

  out << "k = " << nt::to_string(fc.k) << '\n'
      << "roots           " << split.e(0) << ", " << split.e(1) << ", " << split.e(2) << '\n'
      << "bad primes     ";
  for (const auto& p : split.bad_primes()) out << ' ' << p;
  out << '\n'
      << "pairs tested    " << sel.pairs_tested << '\n'
      << "Selmer classes  " << sel.elements.size() << "  (s = " << sel.rank_bound() << ")\n";
  for (const auto e : sel.elements)
    out << "  " << sel.pair(e).to_string() << (span.contains(e) ? "  point" : "  undecided") << '\n';
  return kOk;
}

inline scan::ScanOptions scan_options(const RunConfig& c) {
  scan::ScanOptions o;
  o.range.lo = nt::parse_rational(c.k_min);
  o.range.hi = nt::parse_rational(c.k_max);
  o.range.q_max = c.q_max;
  o.selection_limit = c.limit;
  o.top_fraction = c.top_fraction;
  for (const auto& p : c.pins) o.pinned.push_back(nt::parse_rational(p));
  o.effort = c.effort_params();
  o.threads = c.threads == 0 ? 1 : c.threads;
  o.timings = c.timings;
  return o;
}

inline std::vector<scan::ScanRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::vector<scan::ScanRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(scan::from_json_line(line));
  }
  return records;
}

/// An interrupted run can leave an unterminated last record; cut it off so the
/// resumed run writes it again.
inline void drop_partial_line(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty() || text.back() == '\n') return;
  const auto keep = text.find_last_of('\n');
  std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
}

inline void print_distribution(const std::vector<scan::ScanRecord>& records, std::ostream& os) {
  try {
    os << scan::rank_distribution(records).pretty();
  } catch (const EmptyInput&) {
    os << "no ranked records\n";
  }
}

inline int cmd_scan(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_format(c, {"jsonl", "csv", "pretty"});
  if (c.resume && c.out.empty()) throw UsageError("--resume needs --out");
  if (c.resume && c.format != "jsonl") throw UsageError("--resume works on JSON-lines output only");
  auto opt = scan_options(c);

  std::vector<scan::ScanRecord> all;
  std::ofstream file;
  std::filesystem::path path;
  if (!c.out.empty()) {
    path = resolve_output(c.out);
    if (c.resume && std::filesystem::exists(path)) {
      drop_partial_line(path);
      all = read_records(path);
      for (const auto& r : all) opt.skip.insert(r.k);
    }
    file.open(path, c.resume ? std::ios::app : std::ios::trunc);
    if (!file) throw std::ios_base::failure("cannot write " + path.string());
  }
  std::ostream& sink = c.out.empty() ? out : static_cast<std::ostream&>(file);
  std::ostream& summary = c.out.empty() ? err : out;

  if (c.format == "csv") sink << scan::csv_header() << '\n';
  scan::scan(opt, [&](const scan::ScanRecord& r) {
    if (c.format == "jsonl") sink << scan::to_json_line(r) << '\n';
    else if (c.format == "csv") sink << scan::to_csv_row(r) << '\n';
    else
      sink << r.k << "  [" << (r.rank_lower ? std::to_string(*r.rank_lower) : "-") << ", "
           << (r.selmer_upper ? std::to_string(*r.selmer_upper) : "-") << "] " << to_string(r.status)
           << "  S(1000) = " << r.s1000 << (r.error ? "  error: " + *r.error : "") << '\n';
    sink.flush();
    if (!sink) throw std::ios_base::failure("write failed");
    all.push_back(r);
  });
  if (c.require_determined) {
    for (const auto& r : all)
      if (r.status == scan::Status::kInterval) {
        print_distribution(all, summary);
        return kPolicy;
      }
  }
  print_distribution(all, summary);
  return kOk;
}

inline int cmd_report(const RunConfig& c, std::ostream& out) {
  require_format(c, {"pretty", "csv", "jsonl"});
  if (c.in.empty()) throw UsageError("report needs a JSON-lines file");
  const auto records = read_records(resolve_output(c.in));
  if (c.format == "csv") {
    out << scan::csv_header() << '\n';
    for (const auto& r : records) out << scan::to_csv_row(r) << '\n';
    return kOk;
  }
  const auto d = scan::rank_distribution(records);
  if (c.format == "jsonl") {
    ordered_json j;
    ordered_json ranks = ordered_json::array();
    char buf[32];
    for (const auto& [rank, pct] : d.ranks) {
      std::snprintf(buf, sizeof buf, "%.1f", pct);
      ranks.push_back({std::to_string(rank), buf});
    }
    j["ranks"] = ranks;
    std::snprintf(buf, sizeof buf, "%.1f", d.undetermined);
    j["undetermined"] = buf;
    j["ranked_records"] = std::to_string(d.ranked_records);
    j["excluded_records"] = std::to_string(d.excluded_records);
    out << j.dump() << '\n';
    return kOk;
  }
  out << d.pretty() << "records  " << d.ranked_records << " ranked, " << d.excluded_records << " without rank\n";
  return kOk;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Heron-triangle elliptic curves: construction, torsion, ranks and sieve scores", "heron"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  app.add_option("--k", c.k, "family parameter, an integer or p/q");
  app.add_option("--k-min", c.k_min, "scan range start")->capture_default_str();
  app.add_option("--k-max", c.k_max, "scan range end")->capture_default_str();
  app.add_option("--q-max", c.q_max, "largest denominator of k in a scan")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--limit", c.limit, "sieve limit N")->capture_default_str()->check(CLI::Range(2ul, 100'000'000ul));
  app.add_option("--height-bound", c.height_bound, "first homogeneous-space search box")->check(CLI::Range(1ul, 1ul << 20));
  app.add_option("--top-fraction", c.top_fraction, "percent of scanned curves that get the descent")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  app.add_option("--effort", c.effort, "search box doublings, 0..4")->capture_default_str()->check(CLI::Range(0u, 4u));
  app.add_option("--format", c.format, "pretty, jsonl or csv (default jsonl for scan, pretty otherwise)")
      ->check(CLI::IsMember({"pretty", "jsonl", "csv"}));
  app.add_option("--out", c.out, "output file (relative paths go under HERON_OUTPUT_DIR)");
  app.add_flag("--resume", c.resume, "skip k already in the output file");
  app.add_flag("--require-determined", c.require_determined, "exit 3 unless every rank is determined");
  app.add_option("--threads", c.threads, "worker threads for scan")->capture_default_str()->check(CLI::Range(1u, 256u));
  app.add_option("--pin", c.pins, "k that always gets the descent in a scan");
  app.add_flag("--timings", c.timings, "add per-record timings to scan output");
  app.add_option("--trial-bound", c.trial_bound, "trial division bound for factoring")->capture_default_str();
  app.add_option("--rho-iterations", c.rho_iterations, "Pollard rho iteration budget")->capture_default_str();

  app.add_subcommand("construct", "sides, area and models for one k");
  app.add_subcommand("torsion", "torsion subgroup for one k");
  app.add_subcommand("rank", "certified rank bounds for one k");
  app.add_subcommand("sieve", "S(N, E) for one k");
  app.add_subcommand("descent", "2-Selmer classes for one k");
  app.add_subcommand("scan", "sieve a k range, then descend on the best curves");
  auto* report = app.add_subcommand("report", "rank distribution of a JSON-lines scan file");
  report->add_option("file", c.in, "scan output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.format.empty()) c.format = c.command == "scan" ? "jsonl" : "pretty";

  try {
    if (c.command == "construct") return detail::cmd_construct(c, out);
    if (c.command == "torsion") return detail::cmd_torsion(c, out);
    if (c.command == "rank") return detail::cmd_rank(c, out);
    if (c.command == "sieve") return detail::cmd_sieve(c, out);
    if (c.command == "descent") return detail::cmd_descent(c, out);
    if (c.command == "scan") return detail::cmd_scan(c, out, err);
    if (c.command == "report") return detail::cmd_report(c, out);
    throw UsageError("unknown command " + c.command);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kBadInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace heron::cli
