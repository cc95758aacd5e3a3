#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ehdiv::stats {

/// Frequency table of a nonnegative integer-valued sample.
struct EmpiricalDistribution {
  std::vector<std::uint64_t> support;  ///< distinct levels, ascending
  std::vector<double> pmf;
  std::vector<double> cdf;
  std::uint64_t sample_count = 0;

  /// Empirical P{X <= x}.
  double cdf_at(double x) const;
  /// Empirical P{X > x}.
  double survival_at(double x) const { return 1.0 - cdf_at(x); }
  double mean() const;
  std::uint64_t max_level() const { return support.empty() ? 0 : support.back(); }
};

/// Throws std::invalid_argument on an empty sample.
EmpiricalDistribution empirical(std::span<const std::uint64_t> samples);
/// From counts[b] = number of observations at level b.
EmpiricalDistribution from_histogram(std::span<const std::uint64_t> counts);

using Cdf = std::function<double(double)>;
using Pmf = std::function<double(std::uint64_t)>;

/// Lattice KS distance: max over integer levels 0 .. max(support) of
/// |F_emp(x) - F_ref(x)|. Both laws are step functions jumping only at
/// integers, so this is the supremum over the real line provided F_ref has
/// no mass below 0.
double ks_distance(const EmpiricalDistribution& emp, const Cdf& ref_cdf);

/// Two-sided KS distance between a real-valued sample and a continuous cdf.
double ks_distance_continuous(std::span<const double> samples, const Cdf& ref_cdf);

/// Lattice KS distance between two empirical laws.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Total variation 0.5 sum |p_emp - p_ref| over levels 0 .. max(support),
/// plus half the reference mass beyond the empirical support.
double tv_distance(const EmpiricalDistribution& emp, const Pmf& ref_pmf);

/// Standard normal cdf.
double normal_cdf(double x);

/// Sample mean and its standard error from nonoverlapping batch means
/// (for autocorrelated series). Requires at least 2 * batches samples.
std::pair<double, double> batch_means(std::span<const double> series, std::size_t batches = 50);

struct MeanAndError {
  double mean = 0;
  double standard_error = 0;
};

/// Mean and standard error of independent replications.
MeanAndError replication_summary(std::span<const double> values);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FitReport {
  std::string name;
  double ks_distance = kNaN;
  double tv_distance = kNaN;
  double mean_rel_error = kNaN;
  /// The quantity compared against `tolerance`.
  double value = kNaN;
  double tolerance = kNaN;
  std::uint64_t sample_count = 0;
  bool pass = false;
  std::string note;
};

/// z = (B - mu S) / (sigma sqrt(S)) per pair, KS against N(0, 1).
/// Throws std::invalid_argument for sigma <= 0 or any S == 0.
FitReport clt_check(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs, double mu, double sigma,
                    double tolerance = 0.05);

/// a_N (z - b_N) for each standardized maximum z.
std::vector<double> gumbel_transform(std::span<const double> standardized_maxima, double users);

/// KS distance of gumbel_transform(samples) against exp(-e^{-x}).
FitReport gumbel_check(std::span<const double> standardized_maxima, double users, double tolerance = 0.05);

/// max_n |freq_n - 1/N|; passes within `sigmas` binomial standard errors.
FitReport selection_frequency_check(std::span<const std::uint64_t> selection_counts, double sigmas = 4.0);

struct HeavyTailRow {
  double lambda = 0;
  double level = 0;
  double indicator = 0;  ///< e^{lambda x} P{B > x}
};

std::vector<HeavyTailRow> heavy_tail_report(const EmpiricalDistribution& emp, std::span<const double> lambdas,
                                            std::span<const double> levels);

/// True iff the sequence is strictly increasing (heavy-tail divergence across
/// increasing N).
bool strictly_increasing(std::span<const double> values);

}  // namespace ehdiv::stats
