#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ehdiv::analytic {

constexpr double kDefaultTailTolerance = 1e-12;

/// Stationary energy at transmission under symmetric centralized access:
/// B = E_1 + ... + E_S with S ~ Geo(1/N) on {1, 2, ...}, Bernoulli(p)
/// arrivals.
struct CentralizedBatteryLaw {
  double users = 1;
  double p = 0;
  /// pmf[b] for b = 0 .. K, truncated once the remaining tail mass is below
  /// the requested tolerance.
  std::vector<double> pmf;
  double mean = 0;

  /// Exact (untruncated) P{B <= b}.
  double cdf(double b) const;
  /// Exact P{B > b}.
  double survival(double b) const;
};

/// Throws std::invalid_argument unless N >= 1, 0 < p <= 1, tail_tol > 0.
CentralizedBatteryLaw centralized_battery_pmf(double users, double p,
                                              double tail_tol = kDefaultTailTolerance);

/// Gumbel normalizers of the maximum of N standard normals.
struct GumbelNormalizers {
  double a = 0;  ///< sqrt(2 ln N)
  double b = 0;  ///< a - (ln ln N + ln 4 pi) / (2 a)
};

/// Throws std::invalid_argument for N < 2.
GumbelNormalizers gumbel_normalizers(double users);

/// exp(-e^{-x}).
double gumbel_cdf(double x);

/// E[sqrt(S)] for S ~ Geo(1/N) on {1, 2, ...}, summed until the geometric
/// tail mass drops below tail_tol.
double expected_sqrt_geometric(double users, double tail_tol = kDefaultTailTolerance);

struct ExpectedMaxBounds {
  double lower = 0;  ///< mu N
  double upper = 0;  ///< mu N + sigma E[sqrt S] (sqrt(2 ln N) + 1)
};

ExpectedMaxBounds expected_max_bounds(double users, double mu, double sigma);

struct GreedyThroughputBound {
  double upper = 0;         ///< log(1 + upper bound on E[M])
  double lower_anchor = 0;  ///< log(1 + mu N)
};

GreedyThroughputBound throughput_upper_greedy(double users, double mu, double sigma);

/// Q_n = q_n prod_{j != n} (1 - q_j). Throws std::invalid_argument for an
/// index out of range or a probability outside [0, 1].
double success_probability(std::span<const double> q, std::size_t n);

/// Q for N users all contending with probability q: q (1 - q)^(N - 1).
double uniform_success_probability(double users, double q);

/// Stationary battery law of one user of a contention scheme: success
/// probability Q per slot, Bernoulli(p) arrivals. Level 0 moves to 1 with
/// probability p; level i >= 1 resets to 0 with probability Q, else grows by
/// an arrival.
struct DistributedStationaryLaw {
  double p = 0;
  double success = 0;
  /// pi[i], truncated at tail mass below tolerance.
  std::vector<double> pi;
  double mean_exact = 0;   ///< (p / (Q + p)) (p / Q + 1 - p)
  double mean_approx = 0;  ///< p / Q

  /// Common ratio pi_{i+1} / pi_i for i >= 1.
  double ratio() const;
  /// Exact P{B = i}.
  double pmf(std::uint64_t i) const;
  /// Exact P{B > x}, x >= 0 real (B is integer-valued).
  double survival(double x) const;
  /// Exact P{B >= threshold}.
  double at_least(double threshold) const;
  double cdf(double x) const { return 1.0 - survival(x); }
};

/// Throws std::invalid_argument unless 0 < p <= 1 and 0 < Q <= 1.
DistributedStationaryLaw distributed_stationary(double p, double success,
                                                double tail_tol = kDefaultTailTolerance);

/// Transition matrix of the battery chain above truncated to `states`
/// levels; the top level keeps its growth mass (reflecting).
std::vector<std::vector<double>> battery_transition_matrix(double p, double success, std::size_t states);

/// Solves pi = pi W with sum(pi) = 1 by dense LU. Rows of W must sum to one.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition);

struct DistributedThroughput {
  double success = 0;     ///< Q
  double exact = 0;       ///< N Q log(1 + E[B])
  double asymptotic = 0;  ///< N Q log(p / Q)
};

DistributedThroughput distributed_throughput(double users, double p, double q);

/// Objective N Q log(p / Q) with q = N^-alpha.
double aloha_objective(double users, double p, double alpha);

struct AlohaOptimum {
  double alpha = 1;
  double throughput = 0;  ///< (1/e) log(p e N)
};

/// Throws std::invalid_argument unless N >= 3 and p e N > 1.
AlohaOptimum aloha_optimal(double users, double p);

/// Grid point maximizing aloha_objective; first maximizer on ties.
double aloha_grid_argmax(double users, double p, std::span<const double> alphas);

struct EnergyAwareFixedPoint {
  double epsilon = 0;  ///< 1 - N q
  double q = 0;        ///< overall per-slot attempt probability
  double success = 0;  ///< q (1 - q)^(N - 1)
  double predicted_throughput = 0;
  double residual = 0;  ///< |q - (1/N) P{B >= p e ln N}|
  std::size_t iterations = 0;
  bool converged = false;
};

/// Self-consistent attempt probability of energy-aware contention: damped
/// iteration of q <- (1/N) P{B >= p e ln N} with B from the stationary law at
/// Q = q (1 - q)^(N - 1). predicted_throughput evaluates
/// (1-e) exp(-(1-e)^2) log(exp((1-e)^2) p N / (1-e)) at the converged e.
/// Non-convergence is reported through `converged`, not thrown.
EnergyAwareFixedPoint energy_aware_fixed_point(double users, double p, double tol = 1e-9,
                                               std::size_t max_iter = 1000, double damping = 0.5);

struct F1F2 {
  double f1 = 0;  ///< log N
  double f2 = 0;  ///< (1/x) log(x N)
};

/// Throws std::invalid_argument unless 0 < x <= 1 and x N > 1.
F1F2 f1_f2(double x, double users);

/// e^{lambda x} P{B > x} at each level. Throws for lambda <= 0.
std::vector<double> heavy_tail_indicator(const std::function<double(double)>& survival, double lambda,
                                         std::span<const double> levels);

}  // namespace ehdiv::analytic
