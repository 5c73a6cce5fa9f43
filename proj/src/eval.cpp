#include "ergan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergan/errors.hpp"

namespace ergan {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile: empty data");
    if (p < 0.0 || p > 1.0) throw DataError("quantile: p outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

StatProfileSet hourly_profiles(const Dataset& dataset) {
    if (dataset.empty()) throw DataError("hourly_profiles: empty dataset");
    const auto n = dataset.size();
    StatProfileSet out;
    std::vector<double> column(n);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = dataset.profiles[i].values[t];
            mean += column[i];
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : column) {
            const double d = v - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        std::sort(column.begin(), column.end());
        out.mean[t] = mean;
        out.variance[t] = var;
        out.q1[t] = quantile_sorted(column, 0.25);
        out.q3[t] = quantile_sorted(column, 0.75);
    }
    return out;
}

L1Report l1_distance(const StatProfileSet& real, const StatProfileSet& synth) {
    L1Report r;
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        r.mean_l1 += std::fabs(real.mean[t] - synth.mean[t]);
        r.variance_l1 += std::fabs(real.variance[t] - synth.variance[t]);
        r.q1_l1 += std::fabs(real.q1[t] - synth.q1[t]);
        r.q3_l1 += std::fabs(real.q3[t] - synth.q3[t]);
    }
    return r;
}

std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag) {
    const std::size_t n = values.size();
    if (n < 2) throw DataError("autocorrelation: series too short");
    if (max_lag >= n) throw DataError("autocorrelation: max_lag must be below the length");
    bool constant = true;
    for (double v : values) constant = constant && v == values[0];
    if (constant) throw DataError("autocorrelation: constant series has no defined ACF");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : values) {
        const double d = v - mean;
        denom += d * d;
    }
    if (denom == 0.0) throw DataError("autocorrelation: zero variance series");
    std::vector<double> acf(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) {
            num += (values[t] - mean) * (values[t + lag] - mean);
        }
        acf[lag] = num / denom;
    }
    return acf;
}

std::vector<double> dataset_acf(const Dataset& dataset, std::size_t max_lag) {
    if (dataset.empty()) throw DataError("dataset_acf: empty dataset");
    std::vector<double> sum(max_lag + 1, 0.0);
    std::size_t counted = 0;
    for (const LoadProfile& p : dataset.profiles) {
        const double first = p.values[0];
        bool constant = true;
        for (double v : p.values) {
            if (v != first) {
                constant = false;
                break;
            }
        }
        if (constant) continue;
        const auto acf = autocorrelation(p.values, max_lag);
        for (std::size_t l = 0; l <= max_lag; ++l) sum[l] += acf[l];
        ++counted;
    }
    if (counted == 0) throw DataError("dataset_acf: every profile is constant");
    for (double& v : sum) v /= static_cast<double>(counted);
    return sum;
}

std::vector<double> histogram(const Dataset& dataset, std::size_t n_bins) {
    if (n_bins < 1) throw DataError("histogram: need at least one bin");
    std::vector<double> counts(n_bins, 0.0);
    std::size_t total = 0;
    for (const LoadProfile& p : dataset.profiles) {
        for (double v : p.values) {
            const double clamped = std::min(1.0, std::max(0.0, v));
            auto bin = static_cast<std::size_t>(clamped * static_cast<double>(n_bins));
            if (bin >= n_bins) bin = n_bins - 1;  // value 1.0 joins the last bin
            counts[bin] += 1.0;
            ++total;
        }
    }
    if (total == 0) throw DataError("histogram: empty dataset");
    for (double& c : counts) c /= static_cast<double>(total);
    return counts;
}

std::array<HourBoxStats, kHoursPerDay> boxplot_stats(const Dataset& dataset) {
    if (dataset.empty()) throw DataError("boxplot_stats: empty dataset");
    std::array<HourBoxStats, kHoursPerDay> out;
    std::vector<double> column(dataset.size());
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            column[i] = dataset.profiles[i].values[t];
        }
        std::sort(column.begin(), column.end());
        HourBoxStats& box = out[t];
        box.q1 = quantile_sorted(column, 0.25);
        box.median = quantile_sorted(column, 0.5);
        box.q3 = quantile_sorted(column, 0.75);
        const double iqr = box.q3 - box.q1;
        const double lo_fence = box.q1 - 1.5 * iqr;
        const double hi_fence = box.q3 + 1.5 * iqr;
        box.lo_whisker = std::numeric_limits<double>::infinity();
        box.hi_whisker = -std::numeric_limits<double>::infinity();
        box.outliers = 0;
        for (double v : column) {
            if (v < lo_fence || v > hi_fence) {
                ++box.outliers;
            } else {
                box.lo_whisker = std::min(box.lo_whisker, v);
                box.hi_whisker = std::max(box.hi_whisker, v);
            }
        }
    }
    return out;
}

std::pair<std::size_t, double> nearest_match(const LoadProfile& real, const Dataset& synth) {
    if (synth.empty()) throw DataError("nearest_match: empty synthetic dataset");
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < synth.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            const double d = real.values[t] - synth.profiles[i].values[t];
            d2 += d * d;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return {best, std::sqrt(best_d2)};
}

}  // namespace ergan
