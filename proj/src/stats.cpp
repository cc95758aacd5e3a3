#include "ehdiv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ehdiv/analytic.hpp"

namespace ehdiv::stats {
namespace {

EmpiricalDistribution from_sorted_runs(std::vector<std::pair<std::uint64_t, std::uint64_t>> runs, std::uint64_t total) {
  if (total == 0) throw std::invalid_argument("empirical distribution of an empty sample");
  EmpiricalDistribution e;
  e.sample_count = total;
  e.support.reserve(runs.size());
  e.pmf.reserve(runs.size());
  e.cdf.reserve(runs.size());
  std::uint64_t running = 0;
  const auto n = static_cast<double>(total);
  for (const auto& [level, count] : runs) {
    running += count;
    e.support.push_back(level);
    e.pmf.push_back(static_cast<double>(count) / n);
    e.cdf.push_back(static_cast<double>(running) / n);
  }
  e.cdf.back() = 1.0;
  return e;
}

}  // namespace

double EmpiricalDistribution::cdf_at(double x) const {
  const auto it = std::upper_bound(support.begin(), support.end(), x,
                                   [](double v, std::uint64_t s) { return v < static_cast<double>(s); });
  if (it == support.begin()) return 0.0;
  return cdf[static_cast<std::size_t>(it - support.begin()) - 1];
}

double EmpiricalDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += static_cast<double>(support[i]) * pmf[i];
  return m;
}

EmpiricalDistribution empirical(std::span<const std::uint64_t> samples) {
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    runs.emplace_back(sorted[i], j - i);
    i = j;
  }
  return from_sorted_runs(std::move(runs), sorted.size());
}

EmpiricalDistribution from_histogram(std::span<const std::uint64_t> counts) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;
  std::uint64_t total = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) continue;
    runs.emplace_back(b, counts[b]);
    total += counts[b];
  }
  return from_sorted_runs(std::move(runs), total);
}

double ks_distance(const EmpiricalDistribution& emp, const Cdf& ref_cdf) {
  double d = 0.0;
  double f_emp = 0.0;
  std::size_t next = 0;
  for (std::uint64_t x = 0; x <= emp.max_level(); ++x) {
    if (next < emp.support.size() && emp.support[next] == x) f_emp = emp.cdf[next++];
    d = std::max(d, std::abs(f_emp - ref_cdf(static_cast<double>(x))));
  }
  return std::min(d, 1.0);
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  double d = 0.0;
  const std::uint64_t top = std::max(a.max_level(), b.max_level());
  for (std::uint64_t x = 0; x <= top; ++x) {
    const auto xd = static_cast<double>(x);
    d = std::max(d, std::abs(a.cdf_at(xd) - b.cdf_at(xd)));
  }
  return d;
}

double ks_distance_continuous(std::span<const double> samples, const Cdf& ref_cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_continuous: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = ref_cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    d = std::max({d, std::abs(f - below), std::abs(at - f)});
    i = j;
  }
  return std::min(d, 1.0);
}

double tv_distance(const EmpiricalDistribution& emp, const Pmf& ref_pmf) {
  double sum = 0.0;
  double ref_mass = 0.0;
  std::size_t next = 0;
  for (std::uint64_t x = 0; x <= emp.max_level(); ++x) {
    double e = 0.0;
    if (next < emp.support.size() && emp.support[next] == x) e = emp.pmf[next++];
    const double r = ref_pmf(x);
    ref_mass += r;
    sum += std::abs(e - r);
  }
  sum += std::max(0.0, 1.0 - ref_mass);
  return std::min(0.5 * sum, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::pair<double, double> batch_means(std::span<const double> series, std::size_t batches) {
  if (batches < 2 || series.size() < 2 * batches) {
    throw std::invalid_argument("batch_means: need at least two samples per batch and two batches");
  }
  const std::size_t size = series.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += series[b * size + i];
    means[b] = s / static_cast<double>(size);
  }
  const MeanAndError r = replication_summary(means);
  return {r.mean, r.standard_error};
}

MeanAndError replication_summary(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("replication_summary: no values");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

FitReport clt_check(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs, double mu, double sigma,
                    double tolerance) {
  if (!(sigma > 0.0)) throw std::invalid_argument("clt_check: sigma must be positive");
  std::vector<double> z;
  z.reserve(pairs.size());
  for (const auto& [energy, wait] : pairs) {
    if (wait == 0) throw std::invalid_argument("clt_check: waiting time must be >= 1");
    const auto s = static_cast<double>(wait);
    z.push_back((static_cast<double>(energy) - mu * s) / (sigma * std::sqrt(s)));
  }
  FitReport r;
  r.name = "clt";
  r.ks_distance = ks_distance_continuous(z, normal_cdf);
  r.value = r.ks_distance;
  r.tolerance = tolerance;
  r.sample_count = z.size();
  r.pass = r.ks_distance < tolerance;
  return r;
}

std::vector<double> gumbel_transform(std::span<const double> standardized_maxima, double users) {
  const analytic::GumbelNormalizers g = analytic::gumbel_normalizers(users);
  std::vector<double> out;
  out.reserve(standardized_maxima.size());
  for (const double z : standardized_maxima) out.push_back(g.a * (z - g.b));
  return out;
}

FitReport gumbel_check(std::span<const double> standardized_maxima, double users, double tolerance) {
  FitReport r;
  r.name = "gumbel";
  r.ks_distance = ks_distance_continuous(gumbel_transform(standardized_maxima, users), analytic::gumbel_cdf);
  r.value = r.ks_distance;
  r.tolerance = tolerance;
  r.sample_count = standardized_maxima.size();
  r.pass = r.ks_distance < tolerance;
  return r;
}

FitReport selection_frequency_check(std::span<const std::uint64_t> selection_counts, double sigmas) {
  if (selection_counts.empty()) throw std::invalid_argument("selection_frequency_check: no users");
  std::uint64_t total = 0;
  for (const auto c : selection_counts) total += c;
  if (total == 0) throw std::invalid_argument("selection_frequency_check: no selections");
  const auto users = static_cast<double>(selection_counts.size());
  const double target = 1.0 / users;
  double worst = 0.0;
  for (const auto c : selection_counts) {
    worst = std::max(worst, std::abs(static_cast<double>(c) / static_cast<double>(total) - target));
  }
  FitReport r;
  r.name = "selection_frequency";
  r.value = worst;
  r.tolerance = sigmas * std::sqrt(target * (1.0 - target) / static_cast<double>(total));
  r.mean_rel_error = worst / target;
  r.sample_count = total;
  r.pass = worst <= r.tolerance;
  return r;
}

std::vector<HeavyTailRow> heavy_tail_report(const EmpiricalDistribution& emp, std::span<const double> lambdas,
                                            std::span<const double> levels) {
  std::vector<HeavyTailRow> rows;
  rows.reserve(lambdas.size() * levels.size());
  for (const double lambda : lambdas) {
    for (const double x : levels) {
      rows.push_back({lambda, x, std::exp(lambda * x) * emp.survival_at(x)});
    }
  }
  return rows;
}

bool strictly_increasing(std::span<const double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) return false;
  }
  return true;
}

}  // namespace ehdiv::stats
