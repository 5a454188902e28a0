#include "qjm/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qjm/compat.hpp"
#include "qjm/geomedian.hpp"

namespace qjm {

std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::triple_ft: return "triple_ft";
    case BoundKind::pairwise_sum: return "pairwise_sum";
    case BoundKind::pairwise_single: return "pairwise_single";
    case BoundKind::ntuple_heuristic: return "ntuple_heuristic";
  }
  return "triple_ft";
}

std::optional<BoundKind> bound_kind_from_string(std::string_view s) {
  for (auto k : {BoundKind::triple_ft, BoundKind::pairwise_sum, BoundKind::pairwise_single,
                 BoundKind::ntuple_heuristic}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

BoundReport make_bound(BoundKind kind, double raw, bool heuristic = false) {
  return {kind, raw, std::max(0.0, raw), heuristic};
}

void require_pair_of_tuples(const MeasurementTuple& m, const MeasurementTuple& n,
                            std::size_t arity) {
  require_arity(m, arity);
  require_arity(n, arity);
  require_valid(m);
  require_valid(n);
}

DeltaReport from_g_vectors(const MeasurementTuple& m, const MeasurementTuple& n,
                           std::vector<Vec3> g) {
  DeltaReport r;
  std::size_t best = 0;
  double best_norm = g[0].norm();
  for (std::size_t j = 1; j < g.size(); ++j) {
    const double nj = g[j].norm();
    if (nj > best_norm) {
      best = j;
      best_norm = nj;
    }
  }
  r.delta = 2.0 * best_norm;
  if (best_norm > 0.0) r.witness_r = g[best] / best_norm;
  r.g_vectors = std::move(g);
  for (std::size_t i = 0; i < m.arity(); ++i) {
    r.per_measurement_d.push_back(2.0 * std::abs(r.witness_r.dot(m.bloch(i) - n.bloch(i))));
  }
  return r;
}

double pair_term(const Vec3& a, const Vec3& b) { return (a + b).norm() + (a - b).norm() - 2.0; }

}  // namespace

double delta_state_dependent(const MeasurementTuple& m, const MeasurementTuple& n,
                             const QubitState& s) {
  if (m.arity() != n.arity()) throw ArityMismatch("target and approximating tuples differ in size");
  require_valid(m);
  require_valid(n);
  require_valid(s);
  double total = 0.0;
  for (std::size_t i = 0; i < m.arity(); ++i) total += std::abs(s.r.dot(m.bloch(i) - n.bloch(i)));
  return 2.0 * total;
}

DeltaReport delta_worst_case(const MeasurementTuple& m, const MeasurementTuple& n) {
  require_pair_of_tuples(m, n, 3);
  const auto pm = derived_p_vectors(m);
  const auto pn = derived_p_vectors(n);
  std::vector<Vec3> g(4);
  for (std::size_t j = 0; j < 4; ++j) g[j] = pm[j] - pn[j];
  return from_g_vectors(m, n, std::move(g));
}

DeltaReport delta_worst_case_pairwise(const MeasurementTuple& m, const MeasurementTuple& n) {
  require_pair_of_tuples(m, n, 2);
  const Vec3 d1 = m.bloch(0) - n.bloch(0);
  const Vec3 d2 = m.bloch(1) - n.bloch(1);
  return from_g_vectors(m, n, {d1 + d2, d1 - d2});
}

BoundReport triple_lower_bound(const MeasurementTuple& m) {
  require_arity(m, 3);
  require_valid(m);
  const auto p = derived_p_vectors(m);
  const FTResult ft = fermat_torricelli(p);
  if (!ft.converged) throw NumericalFailure("Fermat-Torricelli iteration did not converge");
  return make_bound(BoundKind::triple_ft, 0.5 * (ft.total_distance - 4.0));
}

BoundReport pairwise_sum_lower_bound(const MeasurementTuple& m) {
  require_arity(m, 3);
  require_valid(m);
  const double raw = 0.5 * (pair_term(m.bloch(0), m.bloch(1)) + pair_term(m.bloch(0), m.bloch(2)) +
                            pair_term(m.bloch(1), m.bloch(2)));
  return make_bound(BoundKind::pairwise_sum, raw);
}

BoundReport pairwise_lower_bound(const Measurement& m1, const Measurement& m2) {
  require_valid(m1);
  require_valid(m2);
  return make_bound(BoundKind::pairwise_single, pair_term(m1.bloch, m2.bloch));
}

BoundReport ntuple_lower_bound_heuristic(const MeasurementTuple& m) {
  if (m.arity() < 4) throw ArityMismatch("n-tuple bound needs at least 4 measurements");
  require_valid(m);
  const int n = static_cast<int>(m.arity());
  const double raw = (sign_pattern_sum(m) - std::ldexp(1.0, n)) / std::ldexp(1.0, n - 2);
  return make_bound(BoundKind::ntuple_heuristic, raw, true);
}

DominanceResult dominance_check(const MeasurementTuple& m) {
  require_arity(m, 3);
  require_valid(m);
  const auto p = derived_p_vectors(m);
  const FTResult ft = fermat_torricelli(p);
  DominanceResult r;
  r.l1 = 0.5 * (ft.total_distance - 4.0);
  r.l2 = pairwise_sum_lower_bound(m).raw_margin;
  r.holds = r.l1 >= r.l2 - 1e-9;
  constexpr std::array<std::array<int, 4>, 3> pairings{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
  r.pairing_holds = true;
  for (const auto& pr : pairings) {
    const double s = distance(p[pr[0]], p[pr[1]]) + distance(p[pr[2]], p[pr[3]]);
    if (ft.total_distance < s - 1e-9) r.pairing_holds = false;
  }
  return r;
}

}  // namespace qjm
