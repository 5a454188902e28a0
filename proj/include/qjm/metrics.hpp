#pragma once

// Worst-case statistical-distance approximation errors and their analytic
// lower bounds.
//
// Convention: the summed distance on state r is 2·Σ_i |r·(m_i − n_i)|, i.e.
// twice the literal Σ_k |p^M_k − p^N_k| summed over measurements. All quoted
// reference values (2√3−2, 3√2−3, √6−2) are in this convention.

#include <optional>
#include <string_view>
#include <vector>

#include "qjm/bloch.hpp"

namespace qjm {

struct DeltaReport {
  double delta{0.0};
  /// Triple: g_j = p_j(M) − p_j(N), j = 1..4. Pair: (m1+m2)−(n1+n2), (m1−m2)−(n1−n2).
  std::vector<Vec3> g_vectors;
  Vec3 witness_r{0.0, 0.0, 1.0};
  /// 2|r·(m_i − n_i)| at the witness; sums to delta.
  std::vector<double> per_measurement_d;
};

enum class BoundKind { triple_ft, pairwise_sum, pairwise_single, ntuple_heuristic };

[[nodiscard]] std::string_view to_string(BoundKind k);
[[nodiscard]] std::optional<BoundKind> bound_kind_from_string(std::string_view s);

struct BoundReport {
  BoundKind kind{BoundKind::triple_ft};
  double raw_margin{0.0};
  double degree{0.0};  ///< max(0, raw_margin)
  bool heuristic{false};
};

/// 2·Σ_i |r·(m_i − n_i)| for equal-arity tuples.
[[nodiscard]] double delta_state_dependent(const MeasurementTuple& m, const MeasurementTuple& n,
                                           const QubitState& s);

/// Closed form max over states: 2·max_j |g_j|, attained at r = g_j*/|g_j*|
/// (lowest j on ties; +z when every g_j vanishes).
[[nodiscard]] DeltaReport delta_worst_case(const MeasurementTuple& m, const MeasurementTuple& n);
[[nodiscard]] DeltaReport delta_worst_case_pairwise(const MeasurementTuple& m,
                                                    const MeasurementTuple& n);

/// ½(Σ_k |p_k − p_F| − 4).
[[nodiscard]] BoundReport triple_lower_bound(const MeasurementTuple& m);
/// ½ Σ_{i<j} (|m_i+m_j| + |m_i−m_j| − 2).
[[nodiscard]] BoundReport pairwise_sum_lower_bound(const MeasurementTuple& m);
/// |m1+m2| + |m1−m2| − 2.
[[nodiscard]] BoundReport pairwise_lower_bound(const Measurement& m1, const Measurement& m2);
/// (Σ_μ |Σ_i μ_i m_i| − 2^n) / 2^{n−2} for 4 ≤ n ≤ 20. Only a valid bound for
/// special tuples, so the report is always flagged heuristic.
[[nodiscard]] BoundReport ntuple_lower_bound_heuristic(const MeasurementTuple& m);

struct DominanceResult {
  double l1{0.0};  ///< triple bound, raw
  double l2{0.0};  ///< pairwise-sum bound, raw
  bool holds{false};  ///< l1 ≥ l2 − 1e-9
  /// Σ_k |p_F − p_k| ≥ |p_i − p_j| + |p_k − p_l| for all three pairings.
  bool pairing_holds{false};
};

/// Compares the triple bound with the pairwise-sum bound. The comparison is
/// only guaranteed when some pair is compatible; for example three coplanar
/// unit vectors at 120° give l1 = 1 < l2 = 3(√3−1)/2.
[[nodiscard]] DominanceResult dominance_check(const MeasurementTuple& m);

}  // namespace qjm
