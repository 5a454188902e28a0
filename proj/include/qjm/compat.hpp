#pragma once

// Joint-measurability tests for unbiased qubit measurements.
//
// Three analytic criteria (pairwise, exact triple-wise via the Fermat–Torricelli
// point, sufficient n-tuple-wise) and one numerical oracle that searches for a
// parent POVM with the prescribed marginals.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "qjm/bloch.hpp"
#include "qjm/geomedian.hpp"

namespace qjm {

/// Slack on analytic criterion margins.
inline constexpr double kBoundaryTol = 1e-9;
/// Slack on the parent-POVM violation.
inline constexpr double kOracleTol = 1e-7;
/// Largest n for which 2^n sign patterns are enumerated.
inline constexpr std::size_t kMaxPatternArity = 20;
inline constexpr std::size_t kMaxOracleArity = 4;

enum class Verdict { compatible, incompatible, inconclusive };
enum class Criterion { pairwise, triple_ft, ntuple_sufficient, parent_feasibility };

[[nodiscard]] std::string_view to_string(Verdict v);
[[nodiscard]] std::string_view to_string(Criterion c);
[[nodiscard]] std::optional<Verdict> verdict_from_string(std::string_view s);
[[nodiscard]] std::optional<Criterion> criterion_from_string(std::string_view s);

/// Thrown when the Fermat–Torricelli point cannot be computed to tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parent operators O_μ = (a_μ I + z_μ·σ) / 2^n, one per sign pattern μ ∈ {±1}^n.
/// Pattern index bit i set means μ_i = −1. With this scaling the marginal
/// constraints read Σ_{μ_i=+1} a_μ = 2^{n−1} and Σ_{μ_i=+1} z_μ = 2^{n−1} m_i,
/// completeness reads Σ a_μ = 2^n, Σ z_μ = 0, and O_μ ≥ 0 iff |z_μ| ≤ a_μ.
struct ParentPovmParams {
  std::size_t arity{0};
  std::vector<double> a;
  std::vector<Vec3> z;

  friend bool operator==(const ParentPovmParams&, const ParentPovmParams&) = default;
};

struct ParentPovmCertificate {
  ParentPovmParams params;
  /// max_μ (|z_μ| − a_μ)_+ + Σ |equality residuals| at params.
  double violation{0.0};
  /// Optimal value of min_x max_μ (|z_μ| − a_μ); negative means strictly feasible.
  double min_cone_excess{0.0};
  std::size_t newton_steps{0};
};

using Certificate = std::variant<std::monostate, FTResult, ParentPovmCertificate>;

struct CompatReport {
  Criterion criterion{Criterion::pairwise};
  Verdict verdict{Verdict::inconclusive};
  double margin{0.0};  ///< ≥ 0 means compatible
  Certificate certificate;
};

/// margin = 2 − |m1+m2| − |m1−m2|.
[[nodiscard]] CompatReport pairwise_compatible(const Measurement& m1, const Measurement& m2);

/// Exact triple-wise test: margin = 4 − Σ_k |q_k − q_F|, where q_k are the sign
/// combinations of the triple and q_F their Fermat–Torricelli point.
[[nodiscard]] CompatReport triple_compatible(const MeasurementTuple& t);

/// Sufficient n-tuple test: margin = 2^n − Σ_μ |Σ_i μ_i m_i|. Failing it is
/// inconclusive, never incompatible.
[[nodiscard]] CompatReport ntuple_sufficient(const MeasurementTuple& t);

/// Σ over all 2^n sign patterns of |Σ_i μ_i m_i|. Throws std::length_error above kMaxPatternArity.
[[nodiscard]] double sign_pattern_sum(const MeasurementTuple& t);

struct OracleOptions {
  double gap_tol = 1e-10;  ///< barrier duality-gap target
  std::size_t max_newton = 2000;
};

/// Numerical oracle for n ∈ {2,3,4}: minimizes the largest cone excess
/// max_μ(|z_μ| − a_μ) over parent parameters that satisfy completeness and the
/// marginal constraints exactly, by a log-barrier interior-point method on the
/// null space of the equality constraints. Compatible iff the resulting
/// violation is ≤ kOracleTol; inconclusive if the Newton iteration stalls.
[[nodiscard]] CompatReport parent_povm_feasible(const MeasurementTuple& t,
                                                const OracleOptions& opts = {});

/// Violation functional for arbitrary parameters against a tuple's marginals.
[[nodiscard]] double parent_violation(const MeasurementTuple& t, const ParentPovmParams& p);

}  // namespace qjm
