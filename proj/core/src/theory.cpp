#include "nnim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nnim/dynamics.hpp"
#include "nnim/errors.hpp"
#include "nnim/knn.hpp"
#include "nnim/rng.hpp"

namespace nnim {

namespace {

std::string format_instance(const std::vector<Rational>& phi) {
  std::ostringstream os;
  for (std::size_t i = 0; i < phi.size(); ++i)
    os << (i ? " " : "") << phi[i];
  return os.str();
}

/// Median of the L1 displacement trajectory lengths.
double median(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<Rational> rational_step(const std::vector<Rational>& phi, int k) {
  const int n = static_cast<int>(phi.size());
  if (k < 1 || k > n) throw ConfigError("rational_step requires 1 <= k <= n");
  std::vector<Rational> next(n);
  std::vector<std::pair<Rational, int>> cand;
  cand.reserve(n);
  for (int u = 0; u < n; ++u) {
    cand.clear();
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      Rational diff = phi[v] - phi[u];
      if (diff < 0) diff = -diff;
      cand.emplace_back(std::move(diff), v);
    }
    std::sort(cand.begin(), cand.end());
    Rational acc = phi[u];
    for (int j = 0; j < k - 1; ++j) acc += phi[cand[j].second];
    next[u] = acc / k;
  }
  return next;
}

RationalRun run_rational(const std::vector<Rational>& phi0, int k,
                         int step_cap) {
  RationalRun run;
  run.trace.push_back(phi0);
  for (int s = 1; s <= step_cap; ++s) {
    std::vector<Rational> next = rational_step(run.trace.back(), k);
    if (next == run.trace.back()) {
      run.converged = true;
      run.steps = s - 1;
      return run;
    }
    run.trace.push_back(std::move(next));
  }
  run.steps = step_cap;
  return run;
}

std::vector<std::vector<int>> sigma_classes(const std::vector<Rational>& phi) {
  std::vector<int> order(phi.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return phi[a] != phi[b] ? phi[a] < phi[b] : a < b;
  });
  std::vector<std::vector<int>> classes;
  for (int id : order) {
    if (classes.empty() || phi[classes.back().back()] != phi[id])
      classes.emplace_back();
    classes.back().push_back(id);
  }
  return classes;
}

std::vector<Rational> random_rational_instance(int n, std::uint64_t seed,
                                               std::uint64_t trial,
                                               int denom) {
  auto eng = rng::engine(seed, rng::kInstance, trial);
  std::uniform_int_distribution<int> num(0, denom);
  std::vector<Rational> phi(n);
  for (int u = 0; u < n; ++u) phi[u] = Rational(num(eng), denom);
  return phi;
}

ConvergenceReport check_finite_convergence(int n, int k, int trials,
                                           std::uint64_t seed, int step_cap) {
  ConvergenceReport report;
  report.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    auto phi0 = random_rational_instance(n, seed, trial);
    RationalRun run = run_rational(phi0, k, step_cap);
    if (!run.converged) {
      if (report.counterexample.empty())
        report.counterexample = format_instance(phi0);
      continue;
    }
    ++report.converged_trials;
    report.max_steps_observed = std::max(report.max_steps_observed, run.steps);
    for (const auto& cls : sigma_classes(run.trace.back()))
      if (static_cast<int>(cls.size()) < k) {
        report.sigma_condition_ok = false;
        if (report.counterexample.empty())
          report.counterexample = format_instance(phi0);
      }
  }
  return report;
}

IterationBoundReport check_iteration_bound(int n, int k, double D, int trials,
                                           std::uint64_t seed, double C,
                                           int step_cap) {
  if (D <= 0) throw ConfigError("D must be > 0");
  IterationBoundReport report;
  report.trials = trials;
  report.bound = C * std::log(1.0 / D) / std::log(static_cast<double>(k));

  std::vector<int> steps_per_trial;
  std::vector<double> slopes;
  for (int trial = 0; trial < trials; ++trial) {
    auto eng = rng::engine(seed, rng::kInstance, trial);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix phi(n, 1);
    for (int u = 0; u < n; ++u) phi(u, 0) = uni(eng);

    // steps = first t >= 0 whose computed move falls to D.
    std::vector<double> disps;
    int steps = step_cap;
    for (int t = 0; t < step_cap; ++t) {
      auto sets = exact_knn(phi, std::min(k, n), Metric::kEuclidean);
      Matrix next(n, 1);
      for (int u = 0; u < n; ++u) {
        double acc = 0.0;
        for (const Neighbor& nb : sets[u].neighbors) acc += phi(nb.id, 0);
        next(u, 0) = acc / static_cast<double>(sets[u].neighbors.size());
      }
      double disp = displacement_l11(next, phi);
      phi = std::move(next);
      disps.push_back(disp);
      if (disp <= D) {
        steps = t;
        break;
      }
    }
    if (steps == step_cap) ++report.cap_hits;
    steps_per_trial.push_back(steps);

    // least-squares slope of log displacement against step index
    std::vector<std::pair<double, double>> pts;
    for (std::size_t t = 0; t < disps.size(); ++t)
      if (disps[t] > 0) pts.emplace_back(static_cast<double>(t), std::log(disps[t]));
    if (pts.size() >= 2) {
      double mx = 0, my = 0;
      for (auto& [x, y] : pts) mx += x, my += y;
      mx /= pts.size();
      my /= pts.size();
      double num = 0, den = 0;
      for (auto& [x, y] : pts) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
      }
      if (den > 0) slopes.push_back(num / den);
    }
  }
  report.median_steps = median(steps_per_trial);
  report.within_bound = report.median_steps <= report.bound;
  report.fitted_decay =
      slopes.empty()
          ? 0.0
          : std::accumulate(slopes.begin(), slopes.end(), 0.0) / slopes.size();
  report.reference_decay = -0.5 * std::log(static_cast<double>(k));
  return report;
}

OrderingSplitReport check_ordering_and_splits(int n, int k, int trials,
                                              std::uint64_t seed,
                                              int step_cap) {
  OrderingSplitReport report;
  report.trials = trials;

  auto check_order = [&](const RationalRun& run,
                         const std::vector<Rational>& phi0) {
    for (std::size_t t = 0; t + 1 < run.trace.size(); ++t) {
      const auto& cur = run.trace[t];
      const auto& nxt = run.trace[t + 1];
      std::vector<int> order(cur.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return cur[a] != cur[b] ? cur[a] < cur[b] : a < b;
      });
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        if (nxt[order[i]] > nxt[order[i + 1]]) {
          ++report.ordering_violations;
          if (report.counterexample.empty())
            report.counterexample = format_instance(phi0);
          return;
        }
        if (cur[order[i]] == cur[order[i + 1]] &&
            nxt[order[i]] != nxt[order[i + 1]]) {
          ++report.fusion_breaks;
          if (report.counterexample.empty())
            report.counterexample = format_instance(phi0);
          return;
        }
      }
    }
  };

  // Random instances: ordering persistence at every step.
  for (int trial = 0; trial < trials; ++trial) {
    auto phi0 = random_rational_instance(n, seed, trial);
    RationalRun run = run_rational(phi0, k, step_cap);
    check_order(run, phi0);
  }

  // Planted two-cluster instances: gap 1/2, width 1/20, cluster size k.
  for (int trial = 0; trial < trials; ++trial) {
    auto eng = rng::engine(seed, rng::kInstance, 1'000'000 + trial);
    std::uniform_int_distribution<int> num(0, 20);
    std::vector<Rational> phi0;
    const int m = k;  // per-cluster population
    for (int i = 0; i < m; ++i)
      phi0.push_back(Rational(num(eng), 400));  // within [0, 1/20]
    for (int i = 0; i < m; ++i)
      phi0.push_back(Rational(11, 20) + Rational(num(eng), 400));
    RationalRun run = run_rational(phi0, k, step_cap);
    check_order(run, phi0);

    // Minimum inter-cluster distance must never decrease once both cluster
    // extremes see only their own side (the split condition).
    bool split_seen = false;
    Rational last_delta = 0;
    for (std::size_t t = 0; t < run.trace.size(); ++t) {
      const auto& state = run.trace[t];
      Rational a_max = state[0], b_min = state[m];
      for (int i = 0; i < m; ++i) a_max = std::max(a_max, state[i]);
      for (int i = m; i < 2 * m; ++i) b_min = std::min(b_min, state[i]);
      Rational delta = b_min - a_max;
      if (split_seen && delta < last_delta) {
        ++report.split_violations;
        if (report.counterexample.empty())
          report.counterexample = format_instance(phi0);
        break;
      }
      if (!split_seen) {
        // k-th nearest distance of both boundary agents below the gap
        auto kth_dist = [&](int u) {
          std::vector<Rational> d;
          for (int v = 0; v < 2 * m; ++v) {
            if (v == u) continue;
            Rational diff = state[v] - state[u];
            if (diff < 0) diff = -diff;
            d.push_back(diff);
          }
          std::sort(d.begin(), d.end());
          return d[k - 2 >= 0 ? k - 2 : 0];  // k includes self
        };
        int a_arg = 0, b_arg = m;
        for (int i = 0; i < m; ++i)
          if (state[i] == a_max) a_arg = i;
        for (int i = m; i < 2 * m; ++i)
          if (state[i] == b_min) b_arg = i;
        if (k == 1 || (kth_dist(a_arg) < delta && kth_dist(b_arg) < delta))
          split_seen = true;
      }
      last_delta = delta;
    }
    if (run.converged) {
      const auto& fin = run.trace.back();
      bool a_equal = true, b_equal = true;
      for (int i = 1; i < m; ++i) a_equal &= fin[i] == fin[0];
      for (int i = m + 1; i < 2 * m; ++i) b_equal &= fin[i] == fin[m];
      if (!(a_equal && b_equal && fin[0] != fin[m])) {
        ++report.split_violations;
        if (report.counterexample.empty())
          report.counterexample = format_instance(phi0);
      }
    }
  }
  return report;
}

OverlapReport knn_overlap_diagnostic(const Matrix& xi0, int k, int max_steps,
                                     std::uint64_t seed) {
  OverlapReport report;
  OpinionState state;
  state.t = 0;
  state.xi = xi0;
  state.X.resize(xi0.rows(), xi0.cols());
  for (Eigen::Index u = 0; u < xi0.rows(); ++u)
    for (Eigen::Index i = 0; i < xi0.cols(); ++i)
      state.X(u, i) =
          rng::bernoulli(xi0(u, i), seed, rng::kOpinionDraw, u, i, 0) ? 1.0
                                                                      : 0.0;
  const int n = static_cast<int>(xi0.rows());
  for (int t = 0; t < max_steps; ++t) {
    auto hamming_sets = exact_knn(state.X, std::min(k, n), Metric::kHamming);
    auto euclid_sets = exact_knn(state.xi, std::min(k, n), Metric::kEuclidean);
    double jaccard_sum = 0.0;
    for (int u = 0; u < n; ++u) {
      std::vector<int> a, b, inter, uni;
      for (const auto& nb : hamming_sets[u].neighbors) a.push_back(nb.id);
      for (const auto& nb : euclid_sets[u].neighbors) b.push_back(nb.id);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(inter));
      std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                     std::back_inserter(uni));
      jaccard_sum += static_cast<double>(inter.size()) / uni.size();
    }
    report.mean_jaccard.push_back(jaccard_sum / n);
    state = nnim_step(state, std::min(k, n), seed);
  }
  return report;
}

}  // namespace nnim
