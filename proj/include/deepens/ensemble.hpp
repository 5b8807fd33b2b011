#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "deepens/error.hpp"
#include "deepens/random.hpp"

namespace deepens {

/// Plurality over unit outputs, ties broken toward the smallest label. On {0,1} this is
/// "1 iff strictly more than half vote 1", with an even split resolving to 0.
inline int majority_vote(std::span<const int> unit_outputs) {
  if (unit_outputs.empty()) throw InputError("majority_vote: no unit outputs");
  std::map<int, std::size_t> counts;
  for (int v : unit_outputs) ++counts[v];
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

namespace detail {

inline void check_rate(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("error rate must lie in [0, 1]");
}

inline constexpr std::size_t kDirectBinomialLimit = 60;

}  // namespace detail

/// P(at most floor(n/2) of n independent units are correct) when each errs with
/// probability epsilon: sum_{k=0}^{floor(n/2)} C(n,k) (1-eps)^k eps^{n-k}.
/// An even split counts as an ensemble error.
inline double exact_error_tail(std::size_t n, double epsilon) {
  if (n < 1) throw DomainError("exact_error_tail: n must be >= 1");
  detail::check_rate(epsilon);
  const std::size_t half = n / 2;
  if (epsilon == 0.0) return 0.0;  // every term carries eps^{n-k}, n-k >= 1
  if (epsilon == 1.0) return 1.0;  // only k = 0 survives

  double total = 0.0;
  if (n <= detail::kDirectBinomialLimit) {
    double binom = 1.0;
    for (std::size_t k = 0; k <= half; ++k) {
      if (k > 0) binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
      total += binom * std::pow(1.0 - epsilon, static_cast<double>(k)) *
               std::pow(epsilon, static_cast<double>(n - k));
    }
  } else {
    const double log_correct = std::log1p(-epsilon);
    const double log_wrong = std::log(epsilon);
    const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t k = 0; k <= half; ++k) {
      const double log_binom = lg_n - std::lgamma(static_cast<double>(k) + 1.0) -
                               std::lgamma(static_cast<double>(n - k) + 1.0);
      total += std::exp(log_binom + static_cast<double>(k) * log_correct +
                        static_cast<double>(n - k) * log_wrong);
    }
  }
  return std::min(total, 1.0);
}

/// exp(-n (1 - 2 eps)^2 / 2), defined for eps < 1/2.
inline double hoeffding_bound(std::size_t n, double epsilon) {
  if (n < 1) throw DomainError("hoeffding_bound: n must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw DomainError("hoeffding_bound: requires 0 <= epsilon < 1/2");
  }
  const double gap = 1.0 - 2.0 * epsilon;
  return std::exp(-static_cast<double>(n) * gap * gap / 2.0);
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double std_error = 0.0;  // sqrt(p (1 - p) / trials)
};

/// Trials are split over a fixed number of partitions, each with a seed derived from
/// (seed, partition), so the result does not depend on the machine's core count.
inline constexpr std::size_t kSimulationPartitions = 4;

inline MonteCarloEstimate simulate_independent_ensemble(std::size_t n, double epsilon,
                                                        std::uint64_t trials, std::uint64_t seed) {
  if (n < 1) throw DomainError("simulate: n must be >= 1");
  if (trials < 1) throw DomainError("simulate: trials must be >= 1");
  detail::check_rate(epsilon);

  std::vector<std::uint64_t> errors(kSimulationPartitions, 0);
  const auto run_partition = [&](std::size_t part) {
    const std::uint64_t begin = trials * part / kSimulationPartitions;
    const std::uint64_t end = trials * (part + 1) / kSimulationPartitions;
    Rng rng = make_rng(seed, part);
    std::uint64_t local = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      std::size_t wrong = 0;
      for (std::size_t u = 0; u < n; ++u) wrong += uniform01(rng) < epsilon ? 1 : 0;
      if (2 * wrong >= n) ++local;  // ties count as an error
    }
    errors[part] = local;
  };
  std::vector<std::thread> workers;
  for (std::size_t p = 0; p < kSimulationPartitions; ++p) workers.emplace_back(run_partition, p);
  for (auto& w : workers) w.join();

  MonteCarloEstimate mc;
  mc.trials = trials;
  for (auto e : errors) mc.errors += e;
  mc.estimate = static_cast<double>(mc.errors) / static_cast<double>(trials);
  mc.std_error = std::sqrt(mc.estimate * (1.0 - mc.estimate) / static_cast<double>(trials));
  return mc;
}

struct ErrorBoundReport {
  std::size_t n = 0;
  double epsilon = 0.0;
  double exact_tail = 0.0;
  double hoeffding = 0.0;
  std::optional<MonteCarloEstimate> monte_carlo;
};

inline ErrorBoundReport error_bound_report(std::size_t n, double epsilon,
                                           std::optional<std::uint64_t> trials = std::nullopt,
                                           std::uint64_t seed = 0) {
  ErrorBoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.exact_tail = exact_error_tail(n, epsilon);
  r.hoeffding = hoeffding_bound(n, epsilon);
  if (trials) r.monte_carlo = simulate_independent_ensemble(n, epsilon, *trials, seed);
  return r;
}

}  // namespace deepens
