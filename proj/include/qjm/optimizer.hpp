#pragma once

// Numerical minimization of the worst-case error Δ(M; N) over triple-wise
// compatible approximating triples N.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qjm/bloch.hpp"

namespace qjm {

struct OptimizerConfig {
  std::uint64_t seed{0};
  std::size_t starts{32};
  std::size_t max_evals{50000};  ///< per start, shared across penalty stages
  bool parallel{true};
};

struct OptimizeResult {
  MeasurementTuple best_n;
  double achieved_delta{0.0};
  double lower_bound{0.0};
  double gap{0.0};
  double feasibility_margin{0.0};
  std::size_t starts{0};
  bool converged{false};
};

struct ShrinkResult {
  double t_star{0.0};
  MeasurementTuple n;
};

/// Largest t ∈ [0, 1] (to 1e-10) with t·M triple-compatible, found by bisection.
[[nodiscard]] ShrinkResult shrink_to_compatible(const MeasurementTuple& m);

/// Multi-start Nelder–Mead on the 9 coordinates of N with a graduated
/// quadratic penalty on the triple criterion excess; the winning iterate is
/// shrunk back into the compatible set before Δ is reported.
[[nodiscard]] OptimizeResult minimize_delta(const MeasurementTuple& m, const OptimizerConfig& cfg = {});

namespace detail {

struct NelderMeadResult {
  std::vector<double> x;
  double f{0.0};
  std::size_t evals{0};
  bool converged{false};
};

/// Plain Nelder–Mead (standard coefficients 1, 2, ½, ½). Stops when the
/// simplex diameter falls below `diameter_tol` or after `max_evals` calls.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double initial_step, std::size_t max_evals,
                             double diameter_tol = 1e-8);

}  // namespace detail

}  // namespace qjm
