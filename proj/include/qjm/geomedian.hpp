#pragma once

// Fermat–Torricelli point (geometric median) of a finite point set in R^3.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qjm/bloch.hpp"

namespace qjm {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FTOptions {
  double grad_tol = 1e-10;    ///< stop when |Σ_k w_k u_k| drops below this
  double step_tol = 1e-13;    ///< stop when an iterate moves less than this
  double vertex_tol = 1e-13;  ///< points this close are treated as coincident
  std::size_t max_iter = 100000;
  bool record_trace = false;  ///< keep f(x) for every accepted iterate
};

struct FTResult {
  Vec3 point;
  double total_distance{0.0};
  std::size_t iterations{0};
  /// |Σ u_k| off the input points, max(0, |Σ_{k≠v} u_k| − w_v) at input point v.
  double stationarity_residual{0.0};
  bool converged{false};
  bool at_vertex{false};
  std::vector<double> trace;
};

/// Minimizer of f(x) = Σ_k |x − points_k|.
///
/// Duplicates are merged into weighted points. Every distinct point is first
/// tested for vertex optimality; if none qualifies the minimizer lies off the
/// input points and Weiszfeld iteration runs from the centroid. An iterate that
/// lands on an input point is pushed off it along the pseudo-gradient.
/// Throws EmptyInput for an empty set. Non-convergence within max_iter is
/// reported through `converged`, with the best iterate returned.
[[nodiscard]] FTResult fermat_torricelli(std::span<const Vec3> points, const FTOptions& opts = {});

/// |Σ_{k: p_k ≠ v} (p_k − v)/|p_k − v|| ≤ multiplicity(v), with v = points[v_index].
/// Throws std::out_of_range for a bad index.
[[nodiscard]] bool is_vertex_optimal(std::span<const Vec3> points, std::size_t v_index,
                                     double vertex_tol = 1e-13);

/// Σ_k |x − points_k|.
[[nodiscard]] double sum_of_distances(std::span<const Vec3> points, const Vec3& x);

}  // namespace qjm
