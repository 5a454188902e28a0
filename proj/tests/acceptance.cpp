// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qjm/compat.hpp"
#include "qjm/geomedian.hpp"
#include "qjm/metrics.hpp"
#include "qjm/optimizer.hpp"

using namespace qjm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Check {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

Outcome pauli_triple() {
  const double d = triple_lower_bound(oracle::kPauli).degree;
  const double err = std::abs(d - (2 * kSqrt3 - 2));
  return {err <= 1e-9, fmt("degree=%.12f err=%.2e", d, err)};
}

Outcome pauli_pairwise_sum() {
  const double d = pairwise_sum_lower_bound(oracle::kPauli).degree;
  const double err = std::abs(d - (3 * kSqrt2 - 3));
  return {err <= 1e-9, fmt("degree=%.12f err=%.2e", d, err)};
}

Outcome scaled_orthogonal() {
  const auto t = oracle::scaled_pauli(1 / kSqrt2);
  const double d = triple_lower_bound(t).degree;
  double worst_pair = 0.0;
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    worst_pair = std::max(worst_pair, std::abs(pairwise_lower_bound(t[i], t[j]).degree));
  }
  const double err = std::abs(d - (kSqrt6 - 2));
  return {err <= 1e-9 && worst_pair <= 1e-9, fmt("triple=%.12f err=%.2e max_pair=%.2e", d, err, worst_pair)};
}

Outcome optimizer_pauli() {
  const auto r = minimize_delta(oracle::kPauli, OptimizerConfig{});
  const double err = std::abs(r.achieved_delta - (2 * kSqrt3 - 2));
  double comp = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 diff = r.best_n.bloch(i) - oracle::kPauli.bloch(i) / kSqrt3;
    comp = std::max({comp, std::abs(diff.x), std::abs(diff.y), std::abs(diff.z)});
  }
  return {err <= 1e-4 && comp <= 1e-3, fmt("delta=%.10f err=%.2e max_component_err=%.2e", r.achieved_delta, err, comp)};
}

Outcome oracle_agreement() {
  Rng rng = make_rng(2024, 5);
  int compared = 0, disagree = 0, skipped = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto t = random_tuple(rng, 3);
    const auto tri = triple_compatible(t);
    if (std::abs(tri.margin) <= 1e-4) {
      ++skipped;
      continue;
    }
    ++compared;
    if (parent_povm_feasible(t).verdict != tri.verdict) ++disagree;
  }
  return {disagree == 0, fmt("compared=%d skipped=%d disagreements=%d", compared, skipped, disagree)};
}

Outcome closed_form_vs_grid() {
  Rng rng = make_rng(2024, 6);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto m = random_tuple(rng, 3);
    const auto n = random_tuple(rng, 3);
    const double closed = delta_worst_case(m, n).delta;
    const double grid = oracle::grid_max_delta(oracle::blochs(m), oracle::blochs(n), 1000000);
    worst = std::max(worst, std::abs(closed - grid));
  }
  return {worst <= 1e-3, fmt("pairs=200 max_abs_diff=%.2e", worst)};
}

Outcome dominance() {
  Rng rng = make_rng(2024, 7);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto d = dominance_check(random_tuple(rng, 3));
    if (d.l1 < d.l2 - 1e-9) {
      ++violations;
      worst = std::max(worst, d.l2 - d.l1);
    }
  }
  return {violations == 0, fmt("triples=10000 violations=%d worst=%.2e", violations, worst)};
}

Outcome nesting() {
  Rng rng = make_rng(2024, 8);
  int violations = 0, sufficient = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto t = random_tuple(rng, 3);
    if (ntuple_sufficient(t).verdict != Verdict::compatible) continue;
    ++sufficient;
    if (triple_compatible(t).verdict != Verdict::compatible) ++violations;
  }
  return {violations == 0, fmt("triples=10000 sufficient=%d violations=%d", sufficient, violations)};
}

Outcome weiszfeld() {
  const std::vector<Vec3> tetra{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const double tetra_err = fermat_torricelli(tetra).point.norm();

  Rng rng = make_rng(2024, 9);
  std::uniform_int_distribution<int> count(3, 8);
  FTOptions opts;
  opts.record_trace = true;
  double worst_equiv = 0.0;
  int non_monotone = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<Vec3> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = random_in_ball(rng, 2.0);
    const auto base = fermat_torricelli(pts, opts);
    for (std::size_t i = 1; i < base.trace.size(); ++i) {
      if (base.trace[i] > base.trace[i - 1]) ++non_monotone;
    }

    const Vec3 shift = random_in_ball(rng, 3.0);
    const auto rot = oracle::random_rotation(rng);
    std::vector<Vec3> moved;
    for (const auto& p : pts) moved.push_back(rot * p + shift);
    const auto r = fermat_torricelli(moved, opts);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      if (r.trace[i] > r.trace[i - 1]) ++non_monotone;
    }
    worst_equiv = std::max(worst_equiv, distance(r.point, rot * base.point + shift));
  }
  const bool ok = tetra_err <= 1e-9 && worst_equiv <= 1e-9 && non_monotone == 0;
  return {ok, fmt("tetra_err=%.2e max_equivariance_err=%.2e non_monotone_steps=%d", tetra_err, worst_equiv, non_monotone)};
}

Outcome soundness() {
  Rng rng = make_rng(2024, 10);
  int violations = 0, shrunk = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto m = random_tuple(rng, 3);
    auto n = random_tuple(rng, 3);
    if (triple_compatible(n).verdict != Verdict::compatible) {
      n = shrink_to_compatible(n).n;
      ++shrunk;
    }
    if (triple_compatible(n).verdict != Verdict::compatible) {
      ++violations;
      continue;
    }
    const double slack = delta_worst_case(m, n).delta - triple_lower_bound(m).degree;
    if (slack < -1e-9) {
      ++violations;
      worst = std::min(worst, slack);
    }
  }
  return {violations == 0, fmt("pairs=1000 shrunk=%d violations=%d worst_slack=%.2e", shrunk, violations, worst)};
}

}  // namespace

int main() {
  const std::vector<Check> criteria{
      {1, "pauli_triple_bound", 1, pauli_triple},
      {2, "pauli_pairwise_sum_bound", 1, pauli_pairwise_sum},
      {3, "scaled_orthogonal_bounds", 1, scaled_orthogonal},
      {4, "optimizer_pauli_tightness", 60, optimizer_pauli},
      {5, "oracle_agreement", 600, oracle_agreement},
      {6, "closed_form_delta_vs_grid", 300, closed_form_vs_grid},
      {7, "triple_dominates_pairwise_sum", 30, dominance},
      {8, "sufficient_implies_triple", 30, nesting},
      {9, "weiszfeld_correctness", 30, weiszfeld},
      {10, "theorem_soundness", 60, soundness},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d %s: %s time=%.2fs budget=%.0fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
