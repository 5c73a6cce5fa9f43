#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ergan/dataset.hpp"

namespace ergan {

// Per-hour summary profiles of a dataset: mean, population variance and
// quartiles (type-7 linear interpolation).
struct StatProfileSet {
    std::array<double, kHoursPerDay> mean{};
    std::array<double, kHoursPerDay> variance{};
    std::array<double, kHoursPerDay> q1{};
    std::array<double, kHoursPerDay> q3{};
};

struct L1Report {
    double mean_l1 = 0.0;
    double variance_l1 = 0.0;
    double q1_l1 = 0.0;
    double q3_l1 = 0.0;
};

struct HourBoxStats {
    double lo_whisker = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double hi_whisker = 0.0;
    std::size_t outliers = 0;
};

// Type-7 quantile of already sorted data: linear interpolation between order
// statistics at position (n-1)*p.
double quantile_sorted(std::span<const double> sorted, double p);

StatProfileSet hourly_profiles(const Dataset& dataset);

// Sum over the 24 hours of absolute differences, per profile kind.
L1Report l1_distance(const StatProfileSet& real, const StatProfileSet& synth);

// Biased ACF estimator: acf[l] = sum_t (x_t - m)(x_{t+l} - m) / sum_t (x_t - m)^2.
// Throws DataError on a constant series.
std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag);

// Pointwise mean of per-profile ACFs over non-constant profiles.
std::vector<double> dataset_acf(const Dataset& dataset, std::size_t max_lag);

// Pooled-value histogram over [0,1]: equal-width bins, last bin right-closed,
// counts normalized to sum 1.
std::vector<double> histogram(const Dataset& dataset, std::size_t n_bins);

// Tukey box statistics per hour; whiskers at the most extreme points within
// 1.5 IQR of the quartiles, points beyond counted as outliers.
std::array<HourBoxStats, kHoursPerDay> boxplot_stats(const Dataset& dataset);

// Index and Euclidean distance of the closest synthetic profile; ties to the
// smallest index.
std::pair<std::size_t, double> nearest_match(const LoadProfile& real, const Dataset& synth);

}  // namespace ergan
