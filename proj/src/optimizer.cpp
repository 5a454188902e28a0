#include "qjm/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "qjm/compat.hpp"
#include "qjm/geomedian.hpp"
#include "qjm/metrics.hpp"
#include "qjm/sampling.hpp"

namespace qjm {

namespace detail {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, double initial_step, std::size_t max_evals,
                             double diameter_tol) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += initial_step;

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    return f(x);
  };

  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  auto affine = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
  };

  while (res.evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) d2 += (simplex[i][k] - simplex[best][k]) * (simplex[i][k] - simplex[best][k]);
      diameter = std::max(diameter, std::sqrt(d2));
    }
    if (diameter < diameter_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    affine(-1.0, simplex[worst], xr);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      affine(-2.0, simplex[worst], xe);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // Contraction: outside if the reflection beat the worst point, inside otherwise.
    const bool outside = fr < fv[worst];
    affine(outside ? -0.5 : 0.5, simplex[worst], xc);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(fv.begin(), fv.end());
  res.f = *it;
  res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
  return res;
}

}  // namespace detail

namespace {

constexpr std::array<double, 4> kPenaltySchedule{10.0, 1e2, 1e3, 1e4};
constexpr std::array<double, 4> kStageStep{0.05, 0.02, 0.01, 0.005};
constexpr double kPerturbRadius = 0.2;

MeasurementTuple tuple_from(std::span<const double> x) {
  return MeasurementTuple{{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, {x[6], x[7], x[8]}};
}

std::vector<double> coords_of(const MeasurementTuple& t) {
  std::vector<double> x;
  for (const auto& m : t) {
    x.push_back(m.bloch.x);
    x.push_back(m.bloch.y);
    x.push_back(m.bloch.z);
  }
  return x;
}

// Σ_k |q_k − q_F| − 4 without validation; ≤ 0 means compatible.
double criterion_excess(const MeasurementTuple& n) {
  const auto q = derived_p_vectors(n);
  return fermat_torricelli(q).total_distance - 4.0;
}

bool strictly_feasible(const MeasurementTuple& n) {
  for (const auto& m : n) {
    if (!m.bloch.is_finite() || m.bloch.norm() > 1.0) return false;
  }
  return criterion_excess(n) <= 0.0;
}

// max_j |g_j| times two, no validation.
double raw_delta(const MeasurementTuple& m, const MeasurementTuple& n) {
  const auto pm = derived_p_vectors(m);
  const auto pn = derived_p_vectors(n);
  double g = 0.0;
  for (std::size_t j = 0; j < 4; ++j) g = std::max(g, (pm[j] - pn[j]).norm());
  return 2.0 * g;
}

// Largest t ∈ [0, 1] with t·n strictly feasible.
double shrink_factor(const MeasurementTuple& n) {
  if (strictly_feasible(n)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (strictly_feasible(n.scaled(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

struct Candidate {
  MeasurementTuple n;
  double delta{std::numeric_limits<double>::infinity()};
  bool converged{false};
};

Candidate run_start(const MeasurementTuple& m, const MeasurementTuple& start, std::size_t budget) {
  Candidate best;
  best.n = start;
  best.delta = raw_delta(m, start);

  auto consider = [&](const MeasurementTuple& n) {
    const double d = raw_delta(m, n);
    if (d < best.delta) {
      best.delta = d;
      best.n = n;
    }
  };

  std::vector<double> x = coords_of(start);
  const std::size_t stage_budget = std::max<std::size_t>(budget / kPenaltySchedule.size(), 1);
  for (std::size_t stage = 0; stage < kPenaltySchedule.size(); ++stage) {
    const double weight = kPenaltySchedule[stage];
    auto objective = [&](std::span<const double> v) {
      const MeasurementTuple n = tuple_from(v);
      const double delta = raw_delta(m, n);
      double excess = criterion_excess(n);
      for (const auto& item : n) excess = std::max(excess, item.bloch.norm() - 1.0);
      if (excess <= 0.0 && delta < best.delta) {
        best.delta = delta;
        best.n = n;
      }
      const double over = std::max(0.0, excess);
      return delta + weight * over * over;
    };
    auto nm = detail::nelder_mead(objective, x, kStageStep[stage], stage_budget);
    x = nm.x;
    const MeasurementTuple stage_best = tuple_from(x);
    consider(stage_best.scaled(shrink_factor(stage_best)));
    best.converged = nm.converged;
  }
  return best;
}

}  // namespace

ShrinkResult shrink_to_compatible(const MeasurementTuple& m) {
  require_arity(m, 3);
  require_valid(m);
  if (triple_compatible(m).verdict == Verdict::compatible) return {1.0, m};
  auto compatible_at = [&](double t) { return triple_compatible(m.scaled(t)).margin >= 0.0; };
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    if (compatible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, m.scaled(lo)};
}

OptimizeResult minimize_delta(const MeasurementTuple& m, const OptimizerConfig& cfg) {
  require_arity(m, 3);
  require_valid(m);
  const std::size_t starts = std::max<std::size_t>(cfg.starts, 1);
  const ShrinkResult shrink = shrink_to_compatible(m);

  std::vector<MeasurementTuple> initial;
  initial.reserve(starts);
  initial.push_back(shrink.n);
  for (std::size_t s = 1; s < starts; ++s) {
    Rng rng = make_rng(cfg.seed, s);
    std::vector<Measurement> items;
    for (const auto& item : shrink.n) items.push_back({item.bloch + random_in_ball(rng, kPerturbRadius)});
    initial.emplace_back(std::move(items));
  }

  std::vector<Candidate> results(starts);
  if (cfg.parallel) {
    std::vector<std::future<Candidate>> jobs;
    jobs.reserve(starts);
    for (std::size_t s = 0; s < starts; ++s) {
      jobs.push_back(std::async(std::launch::async, run_start, std::cref(m), std::cref(initial[s]),
                                cfg.max_evals));
    }
    for (std::size_t s = 0; s < starts; ++s) results[s] = jobs[s].get();
  } else {
    for (std::size_t s = 0; s < starts; ++s) results[s] = run_start(m, initial[s], cfg.max_evals);
  }

  // The shrinkage point itself is always a candidate.
  Candidate best{shrink.n, raw_delta(m, shrink.n), results.front().converged};
  for (const auto& c : results) {
    if (c.delta < best.delta) best = c;
  }
  if (!strictly_feasible(best.n)) best.n = shrink.n;  // unreachable unless rounding bites

  OptimizeResult out;
  out.best_n = best.n;
  out.achieved_delta = delta_worst_case(m, best.n).delta;
  out.lower_bound = triple_lower_bound(m).degree;
  out.gap = out.achieved_delta - out.lower_bound;
  out.feasibility_margin = triple_compatible(best.n).margin;
  out.starts = starts;
  out.converged = best.converged;
  return out;
}

}  // namespace qjm
