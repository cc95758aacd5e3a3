#include "ehdiv/analytic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ehdiv::analytic {
namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

/// Smallest K with ratio^K * scale < tol (scale > 0, 0 <= ratio < 1).
std::size_t geometric_cutoff(double ratio, double scale, double tol) {
  if (ratio <= 0.0 || scale < tol) return 0;
  const double k = std::ceil(std::log(tol / scale) / std::log(ratio));
  return static_cast<std::size_t>(std::max(0.0, k));
}

struct ChainConstants {
  double denom;  // 1 - (1 - Q)(1 - p)
  double ratio;  // (1 - Q) p / denom
};

ChainConstants chain_constants(double p, double reset) {
  const double denom = 1.0 - (1.0 - reset) * (1.0 - p);
  return {denom, (1.0 - reset) * p / denom};
}

double stationary_survival(double p, double success, double x) {
  if (x < 0.0) return 1.0;
  const auto [denom, ratio] = chain_constants(p, success);
  return p / (p + success) * std::pow(ratio, std::floor(x));
}

double stationary_at_least(double p, double success, double threshold) {
  if (threshold <= 0.0) return 1.0;
  return stationary_survival(p, success, std::ceil(threshold) - 1.0);
}

}  // namespace

double CentralizedBatteryLaw::survival(double b) const {
  if (b < 0.0) return 1.0;
  const double q = 1.0 / users;
  const auto [denom, ratio] = chain_constants(p, q);
  return p / denom * std::pow(ratio, std::floor(b));
}

double CentralizedBatteryLaw::cdf(double b) const { return 1.0 - survival(b); }

CentralizedBatteryLaw centralized_battery_pmf(double users, double p, double tail_tol) {
  require(users >= 1.0, "centralized_battery_pmf: N must be >= 1");
  require(p > 0.0 && p <= 1.0, "centralized_battery_pmf: p must lie in (0, 1]");
  require(tail_tol > 0.0, "centralized_battery_pmf: tail tolerance must be positive");

  // Generating function q w / (1 - (1 - q) w), w = 1 - p + p z, expanded in z.
  const double q = 1.0 / users;
  const auto [denom, ratio] = chain_constants(p, q);
  CentralizedBatteryLaw law;
  law.users = users;
  law.p = p;
  law.mean = users * p;
  const std::size_t top = std::max<std::size_t>(1, geometric_cutoff(ratio, p / denom, tail_tol));
  law.pmf.resize(top + 1);
  law.pmf[0] = q * (1.0 - p) / denom;
  double term = q * p / (denom * denom);
  for (std::size_t b = 1; b <= top; ++b) {
    law.pmf[b] = term;
    term *= ratio;
  }
  return law;
}

GumbelNormalizers gumbel_normalizers(double users) {
  require(users >= 2.0, "gumbel_normalizers: N must be >= 2");
  const double ln_n = std::log(users);
  const double a = std::sqrt(2.0 * ln_n);
  const double b = a - (std::log(ln_n) + std::log(4.0 * std::numbers::pi)) / (2.0 * a);
  return {a, b};
}

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double expected_sqrt_geometric(double users, double tail_tol) {
  require(users >= 1.0, "expected_sqrt_geometric: N must be >= 1");
  require(tail_tol > 0.0, "expected_sqrt_geometric: tail tolerance must be positive");
  const double q = 1.0 / users;
  double weight = q;
  double tail = 1.0 - q;
  double sum = 0.0;
  for (double k = 1.0;; k += 1.0) {
    sum += weight * std::sqrt(k);
    if (tail < tail_tol) break;
    weight *= 1.0 - q;
    tail *= 1.0 - q;
  }
  return sum;
}

ExpectedMaxBounds expected_max_bounds(double users, double mu, double sigma) {
  require(users >= 1.0, "expected_max_bounds: N must be >= 1");
  const double lower = mu * users;
  const double slack = sigma * expected_sqrt_geometric(users) * (std::sqrt(2.0 * std::log(users)) + 1.0);
  return {lower, lower + slack};
}

GreedyThroughputBound throughput_upper_greedy(double users, double mu, double sigma) {
  const ExpectedMaxBounds m = expected_max_bounds(users, mu, sigma);
  return {std::log1p(m.upper), std::log1p(m.lower)};
}

double success_probability(std::span<const double> q, std::size_t n) {
  if (n >= q.size()) throw std::invalid_argument("success_probability: index out of range");
  double result = 1.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    require(q[j] >= 0.0 && q[j] <= 1.0, "success_probability: probabilities must lie in [0, 1]");
    result *= j == n ? q[j] : 1.0 - q[j];
  }
  return result;
}

double uniform_success_probability(double users, double q) {
  require(q >= 0.0 && q <= 1.0, "uniform_success_probability: q must lie in [0, 1]");
  if (q == 1.0) return users <= 1.0 ? 1.0 : 0.0;
  return q * std::exp((users - 1.0) * std::log1p(-q));
}

double DistributedStationaryLaw::ratio() const { return chain_constants(p, success).ratio; }

double DistributedStationaryLaw::pmf(std::uint64_t i) const {
  const auto [denom, r] = chain_constants(p, success);
  const double pi0 = success / (p + success);
  if (i == 0) return pi0;
  return pi0 * p / denom * std::pow(r, static_cast<double>(i - 1));
}

double DistributedStationaryLaw::survival(double x) const { return stationary_survival(p, success, x); }

double DistributedStationaryLaw::at_least(double threshold) const {
  return stationary_at_least(p, success, threshold);
}

DistributedStationaryLaw distributed_stationary(double p, double success, double tail_tol) {
  require(p > 0.0 && p <= 1.0, "distributed_stationary: p must lie in (0, 1]");
  require(success > 0.0 && success <= 1.0, "distributed_stationary: Q must lie in (0, 1]");
  require(tail_tol > 0.0, "distributed_stationary: tail tolerance must be positive");

  DistributedStationaryLaw law;
  law.p = p;
  law.success = success;
  const auto [denom, ratio] = chain_constants(p, success);
  const std::size_t top = std::max<std::size_t>(1, geometric_cutoff(ratio, p / (p + success), tail_tol));
  law.pi.resize(top + 1);
  law.pi[0] = success / (p + success);
  double term = law.pi[0] * p / denom;
  for (std::size_t i = 1; i <= top; ++i) {
    law.pi[i] = term;
    term *= ratio;
  }
  law.mean_exact = p / (success + p) * (p / success + 1.0 - p);
  law.mean_approx = p / success;
  return law;
}

std::vector<std::vector<double>> battery_transition_matrix(double p, double success, std::size_t states) {
  require(states >= 2, "battery_transition_matrix: need at least two states");
  std::vector<std::vector<double>> w(states, std::vector<double>(states, 0.0));
  w[0][0] = 1.0 - p;
  w[0][1] = p;
  for (std::size_t i = 1; i < states; ++i) {
    w[i][0] += success;
    w[i][i] += (1.0 - success) * (1.0 - p);
    w[i][std::min(i + 1, states - 1)] += (1.0 - success) * p;
  }
  return w;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition) {
  const auto n = static_cast<Eigen::Index>(transition.size());
  require(n >= 1, "stationary_distribution: empty matrix");
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(static_cast<Eigen::Index>(transition[i].size()) == n, "stationary_distribution: matrix not square");
    for (Eigen::Index j = 0; j < n; ++j) a(j, i) = transition[i][j];
  }
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  return {pi.data(), pi.data() + n};
}

DistributedThroughput distributed_throughput(double users, double p, double q) {
  require(users >= 1.0, "distributed_throughput: N must be >= 1");
  require(p > 0.0 && p <= 1.0, "distributed_throughput: p must lie in (0, 1]");
  require(q >= 0.0 && q <= 1.0, "distributed_throughput: q must lie in [0, 1]");
  DistributedThroughput out;
  out.success = uniform_success_probability(users, q);
  if (out.success <= 0.0) return out;
  // log Q directly: p / Q overflows once Q is subnormal.
  const double log_success = std::log(q) + (users - 1.0) * std::log1p(-q);
  const double mean = p / (out.success + p) * (p / out.success + 1.0 - p);
  out.exact = users * out.success * std::log1p(mean);
  out.asymptotic = users * out.success * (std::log(p) - log_success);
  return out;
}

double aloha_objective(double users, double p, double alpha) {
  require(alpha > 0.0, "aloha_objective: alpha must be positive");
  return distributed_throughput(users, p, std::pow(users, -alpha)).asymptotic;
}

AlohaOptimum aloha_optimal(double users, double p) {
  require(users >= 3.0, "aloha_optimal: N must be >= 3");
  require(p * std::numbers::e * users > 1.0, "aloha_optimal: requires p e N > 1");
  return {1.0, std::log(p * std::numbers::e * users) / std::numbers::e};
}

double aloha_grid_argmax(double users, double p, std::span<const double> alphas) {
  require(!alphas.empty(), "aloha_grid_argmax: empty grid");
  double best_alpha = alphas.front();
  double best = aloha_objective(users, p, best_alpha);
  for (const double a : alphas.subspan(1)) {
    const double v = aloha_objective(users, p, a);
    if (v > best) {
      best = v;
      best_alpha = a;
    }
  }
  return best_alpha;
}

EnergyAwareFixedPoint energy_aware_fixed_point(double users, double p, double tol, std::size_t max_iter,
                                               double damping) {
  require(users >= 2.0, "energy_aware_fixed_point: N must be >= 2");
  require(p > 0.0 && p <= 1.0, "energy_aware_fixed_point: p must lie in (0, 1]");
  require(tol > 0.0, "energy_aware_fixed_point: tolerance must be positive");
  require(damping > 0.0 && damping <= 1.0, "energy_aware_fixed_point: damping must lie in (0, 1]");

  const double threshold = p * std::numbers::e * std::log(users);
  EnergyAwareFixedPoint out;
  double q = 1.0 / users;
  for (std::size_t it = 0; it <= max_iter; ++it) {
    const double success = uniform_success_probability(users, q);
    const double next = stationary_at_least(p, success, threshold) / users;
    out.iterations = it;
    out.residual = std::abs(next - q);
    if (out.residual < tol) {
      out.converged = true;
      break;
    }
    if (it == max_iter) break;
    q = (1.0 - damping) * q + damping * next;
  }
  out.q = q;
  out.success = uniform_success_probability(users, q);
  out.epsilon = 1.0 - users * q;
  const double keep = 1.0 - out.epsilon;
  out.predicted_throughput = keep * std::exp(-keep * keep) * std::log(std::exp(keep * keep) * p * users / keep);
  return out;
}

F1F2 f1_f2(double x, double users) {
  require(x > 0.0 && x <= 1.0, "f1_f2: x must lie in (0, 1]");
  require(x * users > 1.0, "f1_f2: requires N > 1/x");
  return {std::log(users), std::log(x * users) / x};
}

std::vector<double> heavy_tail_indicator(const std::function<double(double)>& survival, double lambda,
                                         std::span<const double> levels) {
  require(lambda > 0.0, "heavy_tail_indicator: lambda must be positive");
  std::vector<double> out;
  out.reserve(levels.size());
  for (const double x : levels) out.push_back(std::exp(lambda * x) * survival(x));
  return out;
}

}  // namespace ehdiv::analytic
