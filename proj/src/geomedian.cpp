#include "qjm/geomedian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>

namespace qjm {

namespace {

struct WeightedPoint {
  Vec3 p;
  double w;
};

std::vector<WeightedPoint> merge_duplicates(std::span<const Vec3> points, double tol) {
  std::vector<WeightedPoint> out;
  for (const auto& p : points) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const WeightedPoint& q) { return distance(p, q.p) <= tol; });
    if (it == out.end()) {
      out.push_back({p, 1.0});
    } else {
      it->w += 1.0;
    }
  }
  return out;
}

double weighted_sum(const std::vector<WeightedPoint>& pts, const Vec3& x) {
  double f = 0.0;
  for (const auto& q : pts) f += q.w * distance(q.p, x);
  return f;
}

// Pull of every point other than pts[v] on pts[v], plus the pull's norm.
Vec3 vertex_pull(const std::vector<WeightedPoint>& pts, std::size_t v) {
  Vec3 r;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == v) continue;
    const Vec3 d = pts[k].p - pts[v].p;
    r += d * (pts[k].w / d.norm());
  }
  return r;
}

// f(x + s) − f(x) without the cancellation of subtracting two large sums:
// |a − s| − |a| = (s·s − 2a·s) / (|a − s| + |a|).
double weighted_change(const std::vector<WeightedPoint>& pts, const Vec3& x, const Vec3& s) {
  double df = 0.0;
  for (const auto& q : pts) {
    const Vec3 a = q.p - x;
    const double den = distance(a, s) + a.norm();
    if (den > 0.0) df += q.w * (s.norm2() - 2.0 * a.dot(s)) / den;
  }
  return df;
}

}  // namespace

double sum_of_distances(std::span<const Vec3> points, const Vec3& x) {
  double f = 0.0;
  for (const auto& p : points) f += distance(p, x);
  return f;
}

bool is_vertex_optimal(std::span<const Vec3> points, std::size_t v_index, double vertex_tol) {
  if (v_index >= points.size()) throw std::out_of_range("vertex index out of range");
  const Vec3& v = points[v_index];
  double multiplicity = 0.0;
  Vec3 pull;
  for (const auto& p : points) {
    const Vec3 d = p - v;
    const double n = d.norm();
    if (n <= vertex_tol) {
      multiplicity += 1.0;
    } else {
      pull += d / n;
    }
  }
  return pull.norm() <= multiplicity;
}

FTResult fermat_torricelli(std::span<const Vec3> points, const FTOptions& opts) {
  if (points.empty()) throw EmptyInput("fermat_torricelli needs at least one point");

  const auto pts = merge_duplicates(points, opts.vertex_tol);
  FTResult res;

  auto finish = [&](const Vec3& x) {
    res.point = x;
    res.total_distance = sum_of_distances(points, x);
    return res;
  };

  // Vertex optimality: |pull| ≤ weight. At most one distinct point can satisfy
  // it strictly; ties only arise in collinear configurations where any optimal
  // vertex will do.
  for (std::size_t v = 0; v < pts.size(); ++v) {
    const double excess = vertex_pull(pts, v).norm() - pts[v].w;
    if (excess <= 0.0) {
      res.at_vertex = true;
      res.converged = true;
      res.stationarity_residual = 0.0;
      if (opts.record_trace) res.trace.push_back(weighted_sum(pts, pts[v].p));
      return finish(pts[v].p);
    }
  }

  double wsum = 0.0;
  Vec3 x;
  for (const auto& q : pts) {
    x += q.p * q.w;
    wsum += q.w;
  }
  x = x / wsum;
  double fx = weighted_sum(pts, x);
  if (opts.record_trace) res.trace.push_back(fx);

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter + 1;

    std::size_t on_vertex = pts.size();
    Vec3 num;
    Vec3 grad;
    double den = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec3 d = pts[k].p - x;
      const double n = d.norm();
      if (n <= opts.vertex_tol) {
        on_vertex = k;
        continue;
      }
      const double inv = pts[k].w / n;
      num += pts[k].p * inv;
      den += inv;
      grad += d * inv;
    }

    Vec3 next;
    if (on_vertex < pts.size()) {
      // Not vertex-optimal (checked above), so |grad| > w and a descent step
      // along grad exists.
      const double g = grad.norm();
      const double w = pts[on_vertex].w;
      res.stationarity_residual = std::max(0.0, g - w);
      double step = (g - w) / den;
      next = x + grad * (step / g);
      while (weighted_change(pts, x, next - x) > 0.0 && step > opts.step_tol) {
        step *= 0.5;
        next = x + grad * (step / g);
      }
    } else {
      res.stationarity_residual = grad.norm();
      if (res.stationarity_residual < opts.grad_tol) {
        res.converged = true;
        break;
      }
      next = num / den;
    }

    const double df = weighted_change(pts, x, next - x);
    if (df > 0.0) {
      res.converged = on_vertex == pts.size();
      break;
    }
    const double moved = distance(next, x);
    x = next;
    fx += df;
    if (opts.record_trace) res.trace.push_back(fx);
    if (moved < opts.step_tol) {
      res.converged = true;
      break;
    }
  }

  // Weiszfeld is only linearly convergent; a few Newton steps on the smooth
  // interior bring the point to full precision.
  for (int polish = 0; polish < 20; ++polish) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    bool near_vertex = false;
    for (const auto& q : pts) {
      const Vec3 d = q.p - x;
      const double n = d.norm();
      if (n <= opts.vertex_tol) {
        near_vertex = true;
        break;
      }
      const Eigen::Vector3d u(d.x / n, d.y / n, d.z / n);
      g += q.w * u;
      h += (q.w / n) * (Eigen::Matrix3d::Identity() - u * u.transpose());
    }
    if (near_vertex) break;
    const auto ldlt = h.ldlt();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Eigen::Vector3d sv = ldlt.solve(g);
    const Vec3 s{sv.x(), sv.y(), sv.z()};
    if (!s.is_finite() || s.norm() <= 1e-17 * (1.0 + x.norm())) break;
    const double df = weighted_change(pts, x, s);
    if (df > 0.0) break;
    x += s;
    fx += df;
    if (opts.record_trace) res.trace.push_back(fx);
    if (df == 0.0) break;
  }

  // Residual at the returned point.
  Vec3 grad;
  for (const auto& q : pts) {
    const Vec3 d = q.p - x;
    const double n = d.norm();
    if (n > opts.vertex_tol) grad += d * (q.w / n);
  }
  res.stationarity_residual = grad.norm();
  if (res.stationarity_residual < opts.grad_tol) res.converged = true;
  return finish(x);
}

}  // namespace qjm
