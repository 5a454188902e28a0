#include "qjm/compat.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qjm {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::compatible: return "compatible";
    case Verdict::incompatible: return "incompatible";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::pairwise: return "pairwise";
    case Criterion::triple_ft: return "triple_ft";
    case Criterion::ntuple_sufficient: return "ntuple_sufficient";
    case Criterion::parent_feasibility: return "parent_feasibility";
  }
  return "pairwise";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::compatible, Verdict::incompatible, Verdict::inconclusive}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Criterion> criterion_from_string(std::string_view s) {
  for (auto c : {Criterion::pairwise, Criterion::triple_ft, Criterion::ntuple_sufficient,
                 Criterion::parent_feasibility}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

namespace {

Verdict analytic_verdict(double margin) {
  return margin >= -kBoundaryTol ? Verdict::compatible : Verdict::incompatible;
}

}  // namespace

CompatReport pairwise_compatible(const Measurement& m1, const Measurement& m2) {
  require_valid(m1);
  require_valid(m2);
  const double margin = 2.0 - (m1.bloch + m2.bloch).norm() - (m1.bloch - m2.bloch).norm();
  return {Criterion::pairwise, analytic_verdict(margin), margin, {}};
}

CompatReport triple_compatible(const MeasurementTuple& t) {
  require_arity(t, 3);
  require_valid(t);
  const auto q = derived_p_vectors(t);
  FTResult ft = fermat_torricelli(q);
  if (!ft.converged) {
    throw NumericalFailure("Fermat-Torricelli iteration did not converge (residual " +
                           std::to_string(ft.stationarity_residual) + ")");
  }
  const double margin = 4.0 - ft.total_distance;
  return {Criterion::triple_ft, analytic_verdict(margin), margin, std::move(ft)};
}

double sign_pattern_sum(const MeasurementTuple& t) {
  const std::size_t n = t.arity();
  if (n > kMaxPatternArity) {
    throw std::length_error("sign-pattern enumeration limited to " +
                            std::to_string(kMaxPatternArity) + " measurements");
  }
  const std::size_t patterns = std::size_t{1} << n;
  double total = 0.0;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    Vec3 s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        s -= t.bloch(i);
      } else {
        s += t.bloch(i);
      }
    }
    total += s.norm();
  }
  return total;
}

CompatReport ntuple_sufficient(const MeasurementTuple& t) {
  if (t.arity() < 2) throw ArityMismatch("ntuple_sufficient needs at least 2 measurements");
  require_valid(t);
  const double bound = std::ldexp(1.0, static_cast<int>(t.arity()));
  const double margin = bound - sign_pattern_sum(t);
  const Verdict v = margin >= -kBoundaryTol ? Verdict::compatible : Verdict::inconclusive;
  return {Criterion::ntuple_sufficient, v, margin, {}};
}

// ---------------------------------------------------------------------------
// Parent-POVM oracle

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Rows: completeness (a, z_x, z_y, z_z), then per measurement i the "+" marginal
// (a, z_x, z_y, z_z). Columns: 4 per pattern, ordered (a, z_x, z_y, z_z).
void build_equalities(const MeasurementTuple& t, MatrixXd& A, VectorXd& b) {
  const std::size_t n = t.arity();
  const std::size_t P = std::size_t{1} << n;
  const double half = static_cast<double>(P) / 2.0;
  A = MatrixXd::Zero(static_cast<Eigen::Index>(4 * (n + 1)), static_cast<Eigen::Index>(4 * P));
  b = VectorXd::Zero(A.rows());
  for (std::size_t mu = 0; mu < P; ++mu) {
    for (int c = 0; c < 4; ++c) A(c, static_cast<Eigen::Index>(4 * mu + c)) = 1.0;
  }
  b(0) = static_cast<double>(P);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(4 * (i + 1));
    for (std::size_t mu = 0; mu < P; ++mu) {
      if (mu & (std::size_t{1} << i)) continue;
      for (int c = 0; c < 4; ++c) A(row + c, static_cast<Eigen::Index>(4 * mu + c)) = 1.0;
    }
    const Vec3& m = t.bloch(i);
    b(row) = half;
    b(row + 1) = half * m.x;
    b(row + 2) = half * m.y;
    b(row + 3) = half * m.z;
  }
}

// a_μ = 1, z_μ = Σ_i μ_i m_i satisfies every equality.
VectorXd particular_solution(const MeasurementTuple& t) {
  const std::size_t n = t.arity();
  const std::size_t P = std::size_t{1} << n;
  VectorXd x(static_cast<Eigen::Index>(4 * P));
  for (std::size_t mu = 0; mu < P; ++mu) {
    Vec3 z;
    for (std::size_t i = 0; i < n; ++i) {
      if (mu & (std::size_t{1} << i)) {
        z -= t.bloch(i);
      } else {
        z += t.bloch(i);
      }
    }
    const auto k = static_cast<Eigen::Index>(4 * mu);
    x(k) = 1.0;
    x(k + 1) = z.x;
    x(k + 2) = z.y;
    x(k + 3) = z.z;
  }
  return x;
}

ParentPovmParams unpack(std::size_t n, const VectorXd& x) {
  const std::size_t P = std::size_t{1} << n;
  ParentPovmParams p;
  p.arity = n;
  p.a.resize(P);
  p.z.resize(P);
  for (std::size_t mu = 0; mu < P; ++mu) {
    const auto k = static_cast<Eigen::Index>(4 * mu);
    p.a[mu] = x(k);
    p.z[mu] = {x(k + 1), x(k + 2), x(k + 3)};
  }
  return p;
}

double max_cone_excess(const ParentPovmParams& p) {
  double e = -std::numeric_limits<double>::infinity();
  for (std::size_t mu = 0; mu < p.a.size(); ++mu) e = std::max(e, p.z[mu].norm() - p.a[mu]);
  return e;
}

// Log-barrier path following for
//   minimize s  subject to  |z_μ(y)| ≤ a_μ(y) + s  for every pattern μ,
// where (a, z) = x0 + K y spans exactly the parameters meeting the equalities.
class ConeExcessSolver {
 public:
  ConeExcessSolver(const VectorXd& x0, const MatrixXd& K, std::size_t patterns)
      : x0_(x0), K_(K), patterns_(patterns), dim_(K.cols() + 1) {}

  struct Outcome {
    VectorXd x;
    double s{0.0};
    double gap{0.0};
    bool stalled{false};
    std::size_t newton_steps{0};
  };

  Outcome solve(const OracleOptions& opts) {
    VectorXd w = VectorXd::Zero(dim_);
    {
      const ParentPovmParams p = unpack_x(x0_);
      w(dim_ - 1) = max_cone_excess(p) + 1.0;
    }
    Outcome out;
    const double theta = 2.0 * static_cast<double>(patterns_);
    double t = 1.0;
    for (;;) {
      const bool centered = center(w, t, opts, out.newton_steps);
      out.gap = theta / t;
      if (!centered) {
        out.stalled = true;
        break;
      }
      if (out.gap < opts.gap_tol) break;
      t *= 10.0;
    }
    out.x = x0_ + K_ * w.head(dim_ - 1);
    out.s = w(dim_ - 1);
    return out;
  }

 private:
  ParentPovmParams unpack_x(const VectorXd& x) const {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < patterns_) ++n;
    return unpack(n, x);
  }

  // Cone μ as affine map of w: (u, v) = c + B w, u = a_μ + s, v = z_μ.
  void cone(const VectorXd& w, std::size_t mu, Eigen::Vector4d& uv) const {
    const auto r = static_cast<Eigen::Index>(4 * mu);
    uv = x0_.segment<4>(r) + K_.middleRows<4>(r) * w.head(dim_ - 1);
    uv(0) += w(dim_ - 1);
  }

  // Barrier objective; +inf outside the open cones.
  double objective(const VectorXd& w, double t) const {
    double f = t * w(dim_ - 1);
    Eigen::Vector4d uv;
    for (std::size_t mu = 0; mu < patterns_; ++mu) {
      cone(w, mu, uv);
      const double u = uv(0);
      const double d = u * u - uv.tail<3>().squaredNorm();
      if (u <= 0.0 || d <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(d);
    }
    return f;
  }

  bool center(VectorXd& w, double t, const OracleOptions& opts, std::size_t& steps) const {
    constexpr std::size_t kMaxInner = 200;
    for (std::size_t inner = 0; inner < kMaxInner; ++inner) {
      if (steps >= opts.max_newton) return false;
      ++steps;
      VectorXd g = VectorXd::Zero(dim_);
      MatrixXd H = MatrixXd::Zero(dim_, dim_);
      g(dim_ - 1) = t;
      Eigen::Vector4d uv;
      Eigen::Matrix<double, 4, Eigen::Dynamic> B(4, dim_);
      for (std::size_t mu = 0; mu < patterns_; ++mu) {
        const auto r = static_cast<Eigen::Index>(4 * mu);
        cone(w, mu, uv);
        B.leftCols(dim_ - 1) = K_.middleRows<4>(r);
        B.col(dim_ - 1) << 1.0, 0.0, 0.0, 0.0;
        const double u = uv(0);
        const double d = u * u - uv.tail<3>().squaredNorm();
        // φ = −log d, ∇d = (2u, −2v), ∇²d = diag(2, −2, −2, −2)
        Eigen::Vector4d gd(2.0 * u, -2.0 * uv(1), -2.0 * uv(2), -2.0 * uv(3));
        Eigen::Vector4d gphi = -gd / d;
        Eigen::Matrix4d hphi = (gd * gd.transpose()) / (d * d);
        hphi.diagonal() += Eigen::Vector4d(-2.0, 2.0, 2.0, 2.0) / d;
        g.noalias() += B.transpose() * gphi;
        H.noalias() += B.transpose() * hphi * B;
      }
      Eigen::LDLT<MatrixXd> ldlt(H);
      VectorXd dw = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !dw.allFinite()) return false;
      const double lambda2 = -g.dot(dw);
      if (lambda2 / 2.0 <= 1e-12) return true;

      const double f0 = objective(w, t);
      double alpha = 1.0;
      for (;;) {
        const double f1 = objective(w + alpha * dw, t);
        if (f1 <= f0 - 0.25 * alpha * lambda2) break;
        alpha *= 0.5;
        if (alpha < 1e-14) return lambda2 < 1e-8;
      }
      w += alpha * dw;
    }
    return false;
  }

  VectorXd x0_;
  MatrixXd K_;
  std::size_t patterns_;
  Eigen::Index dim_;
};

}  // namespace

double parent_violation(const MeasurementTuple& t, const ParentPovmParams& p) {
  const std::size_t P = std::size_t{1} << t.arity();
  if (p.arity != t.arity() || p.a.size() != P || p.z.size() != P) {
    throw ArityMismatch("parent parameters do not match tuple arity");
  }
  MatrixXd A;
  VectorXd b;
  build_equalities(t, A, b);
  VectorXd x(static_cast<Eigen::Index>(4 * P));
  for (std::size_t mu = 0; mu < P; ++mu) {
    const auto k = static_cast<Eigen::Index>(4 * mu);
    x(k) = p.a[mu];
    x(k + 1) = p.z[mu].x;
    x(k + 2) = p.z[mu].y;
    x(k + 3) = p.z[mu].z;
  }
  return std::max(0.0, max_cone_excess(p)) + (A * x - b).cwiseAbs().sum();
}

CompatReport parent_povm_feasible(const MeasurementTuple& t, const OracleOptions& opts) {
  if (t.arity() < 2 || t.arity() > kMaxOracleArity) {
    throw ArityMismatch("parent_povm_feasible supports 2 to 4 measurements, got " +
                        std::to_string(t.arity()));
  }
  require_valid(t);
  const std::size_t n = t.arity();
  const std::size_t P = std::size_t{1} << n;

  MatrixXd A;
  VectorXd b;
  build_equalities(t, A, b);
  // Orthonormal basis of ker A. A has full row rank 4(n+1).
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::Index rank = A.rows();
  const MatrixXd K = svd.matrixV().rightCols(A.cols() - rank);

  ConeExcessSolver solver(particular_solution(t), K, P);
  const auto out = solver.solve(opts);

  ParentPovmCertificate cert;
  cert.params = unpack(n, out.x);
  cert.min_cone_excess = max_cone_excess(cert.params);
  cert.violation = parent_violation(t, cert.params);
  cert.newton_steps = out.newton_steps;

  Verdict v = Verdict::incompatible;
  if (cert.violation <= kOracleTol) {
    v = Verdict::compatible;
  } else if (out.stalled && cert.min_cone_excess - out.gap <= kOracleTol) {
    v = Verdict::inconclusive;
  }
  const double margin = -cert.min_cone_excess;
  return {Criterion::parent_feasibility, v, margin, std::move(cert)};
}

}  // namespace qjm
