#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "nnim/types.hpp"

namespace nnim {

using Rational = boost::multiprecision::cpp_rational;

/// One exact 1D mean-field round: k nearest values by (|difference|, id)
/// with the owner forced in, averaged with exact rational arithmetic.
std::vector<Rational> rational_step(const std::vector<Rational>& phi, int k);

struct RationalRun {
  std::vector<std::vector<Rational>> trace;  // trace[0] = initial state
  bool converged = false;
  int steps = 0;  // state-changing rounds until the exact fixed point
};

RationalRun run_rational(const std::vector<Rational>& phi0, int k,
                         int step_cap);

/// Groups agents by exactly equal value.
std::vector<std::vector<int>> sigma_classes(const std::vector<Rational>& phi);

struct ConvergenceReport {
  int trials = 0;
  int converged_trials = 0;
  int max_steps_observed = 0;
  bool sigma_condition_ok = true;  // every class >= k at each fixed point
  std::string counterexample;      // values of the first failing instance
};

/// Random 1D instances run exactly; asserts each reaches an exact fixed
/// point within the cap and that every sigma class there has >= k members.
ConvergenceReport check_finite_convergence(int n, int k, int trials,
                                           std::uint64_t seed,
                                           int step_cap = 400);

struct IterationBoundReport {
  int trials = 0;
  double median_steps = 0.0;
  double bound = 0.0;           // C * log(1/D) / log(k)
  bool within_bound = false;
  double fitted_decay = 0.0;    // mean slope of log displacement per step
  double reference_decay = 0.0; // -0.5 * log(k)
  int cap_hits = 0;
};

/// Steps-to-displacement<=D over random float instances, against the
/// C * log(1/D)/log(k) budget. The decay slope is reported, not asserted.
IterationBoundReport check_iteration_bound(int n, int k, double D, int trials,
                                           std::uint64_t seed, double C = 10.0,
                                           int step_cap = 2000);

struct OrderingSplitReport {
  int trials = 0;
  int ordering_violations = 0;
  int split_violations = 0;
  int fusion_breaks = 0;  // agents equal at some t that separated later
  std::string counterexample;
};

/// Order preservation on random instances plus split persistence on planted
/// two-cluster instances (gap 0.5, width 0.05); exact arithmetic throughout.
OrderingSplitReport check_ordering_and_splits(int n, int k, int trials,
                                              std::uint64_t seed,
                                              int step_cap = 120);

struct OverlapReport {
  std::vector<double> mean_jaccard;  // one entry per executed step
};

/// Mean Jaccard overlap between realization-space Hamming neighbor sets and
/// parameter-space Euclidean neighbor sets along a stochastic run.
OverlapReport knn_overlap_diagnostic(const Matrix& xi0, int k, int max_steps,
                                     std::uint64_t seed);

/// Uniform grid rationals in [0,1] with denominator `denom`; the shared
/// instance generator of the theory checks.
std::vector<Rational> random_rational_instance(int n, std::uint64_t seed,
                                               std::uint64_t trial,
                                               int denom = 64);

}  // namespace nnim
