#include "qjm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "qjm/compat.hpp"
#include "qjm/json_io.hpp"
#include "qjm/metrics.hpp"
#include "qjm/optimizer.hpp"
#include "qjm/sampling.hpp"

namespace qjm::cli {

namespace {

struct GlobalOptions {
  std::uint64_t seed{0};
  bool json_out{false};
  std::string output_path;
};

struct TupleSource {
  std::string path;
  std::vector<std::string> inline_vectors;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec3 parse_inline_vector(const std::string& text) {
  std::array<double, 3> c{};
  std::stringstream ss(text);
  std::string part;
  std::size_t k = 0;
  while (std::getline(ss, part, ',')) {
    if (k == 3) throw InputError(InputError::Kind::parse, "vector \"" + text + "\" has more than 3 components");
    try {
      std::size_t used = 0;
      c[k] = std::stod(part, &used);
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InputError(InputError::Kind::parse, "cannot parse component \"" + part + "\" of \"" + text + "\"");
    }
    ++k;
  }
  if (k != 3) throw InputError(InputError::Kind::parse, "vector \"" + text + "\" needs 3 components");
  return {c[0], c[1], c[2]};
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw InputError(InputError::Kind::parse, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MeasurementTuple load_tuple(const TupleSource& src, const char* what) {
  if (!src.path.empty() && !src.inline_vectors.empty()) {
    throw UsageError(std::string("give ") + what + " either as a file or inline, not both");
  }
  if (!src.path.empty()) return parse_tuple_text(read_file(src.path));
  if (src.inline_vectors.empty()) throw UsageError(std::string("no ") + what + " given");
  json doc{{"measurements", json::array()}};
  for (const auto& s : src.inline_vectors) doc["measurements"].push_back(parse_inline_vector(s));
  return parse_tuple(doc);
}

json manifest(const std::string& command, const GlobalOptions& g, const TupleSource& src,
              const std::string& format) {
  json m{{"command", command},
         {"seed", g.seed},
         {"output_format", format},
         {"tool_version", kToolVersion}};
  if (!src.path.empty()) {
    m["input_path"] = src.path;
  } else {
    m["inline_vectors"] = src.inline_vectors;
  }
  return m;
}

// Writes to --output if given, otherwise to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file " + path);
    }
    os_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::compatible: return kExitCompatible;
    case Verdict::incompatible: return kExitIncompatible;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

// ---- check -----------------------------------------------------------------

int cmd_check(const GlobalOptions& g, const TupleSource& src, std::string criterion, std::ostream& out) {
  const MeasurementTuple t = load_tuple(src, "measurements");
  if (criterion.empty()) criterion = t.arity() == 2 ? "pairwise" : t.arity() == 3 ? "triple" : "ntuple";

  json report;
  Verdict overall = Verdict::compatible;
  if (criterion == "pairwise") {
    if (t.arity() < 2) throw UsageError("pairwise check needs at least 2 measurements");
    if (t.arity() == 2) {
      const auto r = pairwise_compatible(t[0], t[1]);
      report = r;
      overall = r.verdict;
    } else {
      // All pairs; overall verdict is the worst one, margin the smallest.
      json pairs = json::array();
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t.arity(); ++i) {
        for (std::size_t j = i + 1; j < t.arity(); ++j) {
          const auto r = pairwise_compatible(t[i], t[j]);
          pairs.push_back({{"i", i}, {"j", j}, {"report", r}});
          worst = std::min(worst, r.margin);
          if (r.verdict == Verdict::incompatible) overall = Verdict::incompatible;
        }
      }
      report = json{{"criterion", "pairwise"},
                    {"verdict", std::string(to_string(overall))},
                    {"margin", worst},
                    {"certificate", {{"pairs", pairs}}}};
    }
  } else if (criterion == "triple") {
    if (t.arity() != 3) throw UsageError("triple check needs exactly 3 measurements");
    const auto r = triple_compatible(t);
    report = r;
    overall = r.verdict;
  } else if (criterion == "ntuple") {
    if (t.arity() < 2) throw UsageError("ntuple check needs at least 2 measurements");
    if (t.arity() > kMaxPatternArity) throw UsageError("ntuple check supports at most 20 measurements");
    const auto r = ntuple_sufficient(t);
    report = r;
    overall = r.verdict;
  } else if (criterion == "oracle") {
    if (t.arity() < 2 || t.arity() > kMaxOracleArity) throw UsageError("oracle check supports 2 to 4 measurements");
    const auto r = parent_povm_feasible(t);
    report = r;
    overall = r.verdict;
  } else {
    throw UsageError("unknown criterion " + criterion);
  }
  report["manifest"] = manifest("check", g, src, "json");
  Sink sink(g.output_path, out);
  sink.stream() << report.dump(2) << '\n';
  return exit_for(overall);
}

// ---- bound -----------------------------------------------------------------

void print_bound(std::ostream& os, const std::string& label, const BoundReport& b) {
  os << label << ": raw_margin=" << format_double(b.raw_margin) << " degree=" << format_double(b.degree)
     << (b.heuristic ? " (heuristic)" : "") << '\n';
}

int cmd_bound(const GlobalOptions& g, const TupleSource& src, const std::string& kind, std::ostream& out) {
  const MeasurementTuple t = load_tuple(src, "measurements");
  json report{{"manifest", manifest("bound", g, src, g.json_out ? "json" : "text")}};
  std::ostringstream text;

  auto need = [&](bool ok, const char* msg) {
    if (!ok) throw UsageError(msg);
  };
  const bool all = kind == "all";
  if (kind == "triple" || (all && t.arity() == 3)) {
    need(t.arity() == 3, "triple bound needs exactly 3 measurements");
    const auto b = triple_lower_bound(t);
    report["triple"] = b;
    print_bound(text, "triple", b);
  }
  if (kind == "pairwise-sum" || (all && t.arity() == 3)) {
    need(t.arity() == 3, "pairwise-sum bound needs exactly 3 measurements");
    const auto b = pairwise_sum_lower_bound(t);
    report["pairwise_sum"] = b;
    print_bound(text, "pairwise-sum", b);
  }
  if (kind == "pairwise" || all) {
    need(t.arity() >= 2, "pairwise bound needs at least 2 measurements");
    json pairs = json::array();
    for (std::size_t i = 0; i < t.arity(); ++i) {
      for (std::size_t j = i + 1; j < t.arity(); ++j) {
        const auto b = pairwise_lower_bound(t[i], t[j]);
        pairs.push_back({{"i", i}, {"j", j}, {"bound", b}});
        print_bound(text, "pairwise(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")", b);
      }
    }
    report["pairwise"] = pairs;
  }
  if (kind == "ntuple" || (all && t.arity() >= 4)) {
    need(t.arity() >= 4 && t.arity() <= kMaxPatternArity, "ntuple bound needs 4 to 20 measurements");
    const auto b = ntuple_lower_bound_heuristic(t);
    report["ntuple"] = b;
    print_bound(text, "ntuple", b);
  }
  if (kind == "dominance" || (all && t.arity() == 3)) {
    need(t.arity() == 3, "dominance check needs exactly 3 measurements");
    const auto d = dominance_check(t);
    report["dominance"] = d;
    text << "dominance: l1=" << format_double(d.l1) << " l2=" << format_double(d.l2)
         << " holds=" << (d.holds ? "true" : "false") << '\n';
  }
  if (report.size() == 1) throw UsageError("unknown bound kind " + kind);

  Sink sink(g.output_path, out);
  if (g.json_out) {
    sink.stream() << report.dump(2) << '\n';
  } else {
    sink.stream() << text.str();
  }
  return 0;
}

// ---- delta -----------------------------------------------------------------

int cmd_delta(const GlobalOptions& g, const TupleSource& src, const TupleSource& approx, std::ostream& out) {
  const MeasurementTuple m = load_tuple(src, "measurements");
  const MeasurementTuple n = load_tuple(approx, "approximating measurements");
  if (m.arity() != n.arity()) throw UsageError("target and approximating tuples differ in size");
  DeltaReport r;
  if (m.arity() == 3) {
    r = delta_worst_case(m, n);
  } else if (m.arity() == 2) {
    r = delta_worst_case_pairwise(m, n);
  } else {
    throw UsageError("delta supports 2 or 3 measurements");
  }
  Sink sink(g.output_path, out);
  if (g.json_out) {
    json j = r;
    j["manifest"] = manifest("delta", g, src, "json");
    sink.stream() << j.dump(2) << '\n';
  } else {
    const Vec3& w = r.witness_r;
    sink.stream() << "delta=" << format_double(r.delta) << " witness_r=(" << format_double(w.x) << ','
                  << format_double(w.y) << ',' << format_double(w.z) << ")\n";
  }
  return 0;
}

// ---- optimize --------------------------------------------------------------

int cmd_optimize(const GlobalOptions& g, const TupleSource& src, OptimizerConfig cfg,
                 const std::string& config_path, std::ostream& out) {
  const MeasurementTuple m = load_tuple(src, "measurements");
  if (m.arity() != 3) throw UsageError("optimize needs exactly 3 measurements");
  if (!config_path.empty()) {
    try {
      json j = json::parse(read_file(config_path));
      j.get_to(cfg);
    } catch (const json::exception& e) {
      throw InputError(InputError::Kind::schema, std::string("bad optimizer config: ") + e.what());
    }
  }
  const auto r = minimize_delta(m, cfg);
  Sink sink(g.output_path, out);
  if (g.json_out) {
    json j = r;
    j["config"] = cfg;
    j["manifest"] = manifest("optimize", g, src, "json");
    sink.stream() << j.dump(2) << '\n';
  } else {
    auto& os = sink.stream();
    os << "achieved_delta=" << format_double(r.achieved_delta) << '\n'
       << "lower_bound=" << format_double(r.lower_bound) << '\n'
       << "gap=" << format_double(r.gap) << '\n'
       << "feasibility_margin=" << format_double(r.feasibility_margin) << '\n';
    for (std::size_t i = 0; i < r.best_n.arity(); ++i) {
      const Vec3& v = r.best_n.bloch(i);
      os << "n" << i + 1 << "=(" << format_double(v.x) << ',' << format_double(v.y) << ','
         << format_double(v.z) << ")\n";
    }
  }
  return 0;
}

// ---- scan ------------------------------------------------------------------

struct ScanRow {
  std::size_t idx;
  MeasurementTuple m;
  std::array<double, 3> pair_margin;
  double l1_raw;
  double l2_raw;
};

ScanRow scan_row(std::size_t idx, const MeasurementTuple& m) {
  ScanRow r{idx, m, {}, 0.0, 0.0};
  r.pair_margin[0] = pairwise_compatible(m[0], m[1]).margin;
  r.pair_margin[1] = pairwise_compatible(m[0], m[2]).margin;
  r.pair_margin[2] = pairwise_compatible(m[1], m[2]).margin;
  r.l1_raw = triple_lower_bound(m).raw_margin;
  r.l2_raw = pairwise_sum_lower_bound(m).raw_margin;
  return r;
}

bool genuine_pairwise_ok(const ScanRow& r) {
  for (double pm : r.pair_margin) {
    if (pm < -kBoundaryTol) return false;
  }
  return r.l1_raw > 1e-6;
}

int cmd_scan(const GlobalOptions& g, long long count, const std::string& filter, bool include_known,
             std::ostream& out, std::ostream& err) {
  if (count < 1) throw UsageError("--count must be at least 1");
  if (!filter.empty() && filter != "genuine-pairwise-ok") throw UsageError("unknown filter " + filter);
  const bool filtering = !filter.empty();

  std::vector<MeasurementTuple> samples;
  Rng rng = make_rng(g.seed);
  for (long long i = 0; i < count; ++i) samples.push_back(random_tuple(rng, 3));
  if (include_known) {
    const double s = 1.0 / std::sqrt(2.0);
    samples.push_back(MeasurementTuple{{s, 0, 0}, {0, s, 0}, {0, 0, s}});
  }

  Sink sink(g.output_path, out);
  auto& os = sink.stream();
  std::size_t genuine = 0;
  std::size_t emitted = 0;
  json rows = json::array();
  if (!g.json_out) os << "idx,m1x,m1y,m1z,m2x,m2y,m2z,m3x,m3y,m3z,pair12,pair13,pair23,l1_raw,l2_raw\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ScanRow r = scan_row(i, samples[i]);
    const bool hit = genuine_pairwise_ok(r);
    if (hit) ++genuine;
    if (filtering && !hit) continue;
    ++emitted;
    if (g.json_out) {
      rows.push_back({{"idx", r.idx},
                      {"measurements", tuple_to_json(r.m).at("measurements")},
                      {"pair12", r.pair_margin[0]},
                      {"pair13", r.pair_margin[1]},
                      {"pair23", r.pair_margin[2]},
                      {"l1_raw", r.l1_raw},
                      {"l2_raw", r.l2_raw}});
      continue;
    }
    os << r.idx;
    for (const auto& item : r.m) {
      os << ',' << format_double(item.bloch.x) << ',' << format_double(item.bloch.y) << ','
         << format_double(item.bloch.z);
    }
    for (double pm : r.pair_margin) os << ',' << format_double(pm);
    os << ',' << format_double(r.l1_raw) << ',' << format_double(r.l2_raw) << '\n';
  }
  if (g.json_out) {
    TupleSource none;
    json doc{{"manifest", manifest("scan", g, none, "json")},
             {"rows", rows},
             {"summary", {{"sampled", samples.size()}, {"emitted", emitted}, {"genuine_pairwise_ok", genuine}}}};
    os << doc.dump(2) << '\n';
  }
  err << "# scanned " << samples.size() << " triples, " << genuine
      << " genuinely incompatible but pairwise compatible, " << emitted << " rows emitted\n";
  return 0;
}

// ---- reproduce -------------------------------------------------------------

struct ReproRow {
  std::string name;
  double expected;
  double computed;
  double tol;
  [[nodiscard]] double diff() const { return std::abs(computed - expected); }
  [[nodiscard]] bool pass() const { return diff() <= tol; }
};

int cmd_reproduce(const GlobalOptions& g, double perturb, std::size_t starts, std::ostream& out) {
  const MeasurementTuple pauli{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double s = 1.0 / std::sqrt(2.0);
  const MeasurementTuple ortho{{s, 0, 0}, {0, s, 0}, {0, 0, s}};

  double ortho_pair = 0.0;
  ortho_pair = std::max(ortho_pair, pairwise_lower_bound(ortho[0], ortho[1]).degree);
  ortho_pair = std::max(ortho_pair, pairwise_lower_bound(ortho[0], ortho[2]).degree);
  ortho_pair = std::max(ortho_pair, pairwise_lower_bound(ortho[1], ortho[2]).degree);

  OptimizerConfig cfg;
  cfg.seed = g.seed;
  cfg.starts = starts;
  const auto opt = minimize_delta(pauli, cfg);

  std::vector<ReproRow> rows{
      {"pauli_triple_bound", 2.0 * std::sqrt(3.0) - 2.0, triple_lower_bound(pauli).degree, 1e-9},
      {"pauli_pairwise_sum_bound", 3.0 * std::sqrt(2.0) - 3.0, pairwise_sum_lower_bound(pauli).degree, 1e-9},
      {"scaled_orthogonal_triple_bound", std::sqrt(6.0) - 2.0, triple_lower_bound(ortho).degree, 1e-9},
      {"scaled_orthogonal_pairwise_bounds", 0.0, ortho_pair, 1e-9},
      {"pauli_optimizer_delta", 2.0 * std::sqrt(3.0) - 2.0, opt.achieved_delta, 1e-4},
  };
  for (auto& r : rows) r.computed += perturb;

  bool all = true;
  for (const auto& r : rows) all = all && r.pass();

  Sink sink(g.output_path, out);
  auto& os = sink.stream();
  if (g.json_out) {
    json results = json::array();
    for (const auto& r : rows) {
      results.push_back({{"name", r.name},
                         {"expected", r.expected},
                         {"computed", r.computed},
                         {"abs_diff", r.diff()},
                         {"tolerance", r.tol},
                         {"pass", r.pass()}});
    }
    TupleSource none;
    json doc{{"manifest", manifest("reproduce", g, none, "json")}, {"results", results}, {"all_pass", all}};
    os << doc.dump(2) << '\n';
  } else {
    os << "name,expected,computed,abs_diff,tolerance,status\n";
    for (const auto& r : rows) {
      os << r.name << ',' << format_double(r.expected) << ',' << format_double(r.computed) << ','
         << format_double(r.diff()) << ',' << format_double(r.tol) << ',' << (r.pass() ? "PASS" : "FAIL") << '\n';
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incompatibility bounds for unbiased qubit measurements"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for randomized commands")->capture_default_str();
  app.add_flag("--json", g.json_out, "Machine-readable JSON output");
  app.add_option("--output", g.output_path, "Write the main output to this file");

  auto add_input = [](CLI::App* sub, TupleSource& src) {
    sub->add_option("--input,-i", src.path, "Tuple JSON file ({\"measurements\": [[x,y,z], ...]}; - for stdin)");
    sub->add_option("--m", src.inline_vectors, "Inline Bloch vector \"x,y,z\" (repeatable)");
  };

  TupleSource src;
  TupleSource approx;

  auto* check = app.add_subcommand("check", "Test joint measurability");
  std::string criterion;
  add_input(check, src);
  check->add_option("--criterion", criterion, "pairwise | triple | ntuple | oracle")
      ->check(CLI::IsMember({"pairwise", "triple", "ntuple", "oracle"}));

  auto* bound = app.add_subcommand("bound", "Analytic lower bounds on the approximation error");
  std::string kind = "all";
  add_input(bound, src);
  bound->add_option("--kind", kind, "triple | pairwise-sum | pairwise | ntuple | dominance | all")
      ->check(CLI::IsMember({"triple", "pairwise-sum", "pairwise", "ntuple", "dominance", "all"}))
      ->capture_default_str();

  auto* delta = app.add_subcommand("delta", "Worst-case approximation error of M by N");
  add_input(delta, src);
  delta->add_option("--approx", approx.path, "Approximating tuple JSON file");
  delta->add_option("--n", approx.inline_vectors, "Inline approximating vector \"x,y,z\" (repeatable)");

  auto* optimize = app.add_subcommand("optimize", "Minimize the error over triple-compatible approximations");
  OptimizerConfig cfg;
  std::string config_path;
  add_input(optimize, src);
  optimize->add_option("--starts", cfg.starts, "Number of starts")->check(CLI::PositiveNumber)->capture_default_str();
  optimize->add_option("--max-evals", cfg.max_evals, "Evaluation budget per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  optimize->add_option("--config", config_path, "Optimizer config JSON {\"seed\", \"starts\", \"max_evals\"}");

  auto* scan = app.add_subcommand("scan", "Random sweep comparing triple-wise and pairwise bounds");
  long long count = 10000;
  std::string filter;
  bool include_known = false;
  scan->add_option("--count", count, "Number of random triples")->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--filter", filter, "genuine-pairwise-ok: keep pairwise-compatible, triple-incompatible rows");
  scan->add_flag("--include-known", include_known, "Append the orthogonal/sqrt(2) example triple");

  auto* reproduce = app.add_subcommand("reproduce", "Recompute the reference values and compare");
  double perturb = 0.0;
  std::size_t repro_starts = OptimizerConfig{}.starts;
  reproduce->add_option("--perturb", perturb)->group("");  // harness self-test hook
  reproduce->add_option("--starts", repro_starts, "Optimizer starts")->check(CLI::PositiveNumber);

  // Global flags are accepted after the subcommand as well.
  for (auto* sub : {check, bound, delta, optimize, scan, reproduce}) sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(g, src, criterion, out);
    if (*bound) return cmd_bound(g, src, kind, out);
    if (*delta) return cmd_delta(g, src, approx, out);
    if (*optimize) {
      cfg.seed = g.seed;
      return cmd_optimize(g, src, cfg, config_path, out);
    }
    if (*scan) return cmd_scan(g, count, filter, include_known, out, err);
    if (*reproduce) return cmd_reproduce(g, perturb, repro_starts, out);
  } catch (const InputError& e) {
    err << e.to_json().dump() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace qjm::cli
