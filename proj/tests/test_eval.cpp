#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ergan/errors.hpp"
#include "ergan/eval.hpp"
#include "ergan/fixture.hpp"
#include "helpers.hpp"

using namespace ergan;

namespace {

// Independent type-7 quantile oracle with a separate code path.
double quantile_oracle(std::vector<double> data, double p) {
    std::sort(data.begin(), data.end());
    const double idx = p * (data.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, data.size() - 1);
    return data[lo] * (1.0 - (idx - lo)) + data[hi] * (idx - lo);
}

// Direct-formula ACF oracle.
std::vector<double> acf_oracle(const std::vector<double>& x, std::size_t max_lag) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    std::vector<double> out;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < x.size(); ++t) {
            s += (x[t] - mean) * (x[t + lag] - mean);
        }
        out.push_back(s / denom);
    }
    return out;
}

Dataset five_handcrafted() {
    Dataset d;
    d.profiles.push_back(test::profile_cycle({0.10, 0.55, 0.90}, "p0"));
    d.profiles.push_back(test::profile_cycle({0.20, 0.35, 0.70}, "p1"));
    d.profiles.push_back(test::profile_cycle({0.05, 0.85, 0.40}, "p2"));
    d.profiles.push_back(test::profile_cycle({0.60, 0.15, 0.95}, "p3"));
    d.profiles.push_back(test::profile_cycle({0.30, 0.45, 0.25}, "p4"));
    return d;
}

}  // namespace

TEST_CASE("hourly_profiles: singleton and two-profile identities") {
    Dataset one = test::dataset_of({test::profile_cycle({0.2, 0.8, 0.5}, "a")});
    auto s = hourly_profiles(one);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        CHECK(s.mean[t] == one.profiles[0].values[t]);
        CHECK(s.variance[t] == 0.0);
        CHECK(s.q1[t] == one.profiles[0].values[t]);
        CHECK(s.q3[t] == one.profiles[0].values[t]);
    }

    Dataset two = test::dataset_of({test::profile_cycle({0.2, 0.6}, "a"),
                                    test::profile_cycle({0.4, 0.2}, "b")});
    auto s2 = hourly_profiles(two);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        const double a = two.profiles[0].values[t];
        const double b = two.profiles[1].values[t];
        CHECK(s2.mean[t] == doctest::Approx((a + b) / 2).epsilon(1e-15));
        CHECK(s2.variance[t] == doctest::Approx((a - b) * (a - b) / 4).epsilon(1e-12));
    }
    CHECK_THROWS_AS(hourly_profiles(Dataset{}), DataError);
}

TEST_CASE("hourly quartiles match an independent quantile oracle") {
    Dataset d = five_handcrafted();
    auto s = hourly_profiles(d);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        std::vector<double> column;
        for (const auto& p : d.profiles) column.push_back(p.values[t]);
        CHECK(s.q1[t] == doctest::Approx(quantile_oracle(column, 0.25)).epsilon(1e-12));
        CHECK(s.q3[t] == doctest::Approx(quantile_oracle(column, 0.75)).epsilon(1e-12));
    }
}

TEST_CASE("hourly_profiles is duplication-invariant for mean and variance") {
    Dataset d = five_handcrafted();
    Dataset doubled = d;
    doubled.profiles.insert(doubled.profiles.end(), d.profiles.begin(), d.profiles.end());
    auto s1 = hourly_profiles(d);
    auto s2 = hourly_profiles(doubled);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        CHECK(s2.mean[t] == doctest::Approx(s1.mean[t]).epsilon(1e-14));
        CHECK(s2.variance[t] == doctest::Approx(s1.variance[t]).epsilon(1e-14));
        // Type-7 quantiles are not a pure function of the empirical
        // distribution; duplication may move them by at most one adjacent
        // order-statistic gap.
        std::vector<double> column;
        for (const auto& p : d.profiles) column.push_back(p.values[t]);
        std::sort(column.begin(), column.end());
        double max_gap = 0.0;
        for (std::size_t i = 1; i < column.size(); ++i) {
            max_gap = std::max(max_gap, column[i] - column[i - 1]);
        }
        CHECK(std::fabs(s2.q1[t] - s1.q1[t]) <= max_gap + 1e-15);
        CHECK(std::fabs(s2.q3[t] - s1.q3[t]) <= max_gap + 1e-15);
    }
}

TEST_CASE("l1_distance: self-distance, uniform offset, symmetry, triangle") {
    Dataset d = five_handcrafted();
    auto s = hourly_profiles(d);
    auto self = l1_distance(s, s);
    CHECK(self.mean_l1 == 0.0);
    CHECK(self.variance_l1 == 0.0);
    CHECK(self.q1_l1 == 0.0);
    CHECK(self.q3_l1 == 0.0);

    StatProfileSet offset = s;
    for (double& v : offset.mean) v += 0.01;
    CHECK(l1_distance(s, offset).mean_l1 == doctest::Approx(0.24).epsilon(1e-12));

    const FixtureSpec fa[] = {{Archetype::MorningPeak, 12, 0.1}};
    const FixtureSpec fb[] = {{Archetype::EveningPeak, 12, 0.1}};
    const FixtureSpec fc[] = {{Archetype::FlatNight, 12, 0.1}};
    auto sa = hourly_profiles(fixture_generate(fa, 1));
    auto sb = hourly_profiles(fixture_generate(fb, 2));
    auto sc = hourly_profiles(fixture_generate(fc, 3));
    auto ab = l1_distance(sa, sb), ba = l1_distance(sb, sa);
    CHECK(ab.mean_l1 == ba.mean_l1);
    CHECK(ab.q3_l1 == ba.q3_l1);
    auto ac = l1_distance(sa, sc), cb = l1_distance(sc, sb);
    CHECK(ab.mean_l1 <= ac.mean_l1 + cb.mean_l1 + 1e-12);
    CHECK(ab.variance_l1 <= ac.variance_l1 + cb.variance_l1 + 1e-12);
    CHECK(ab.q1_l1 <= ac.q1_l1 + cb.q1_l1 + 1e-12);
    CHECK(ab.q3_l1 <= ac.q3_l1 + cb.q3_l1 + 1e-12);
}

TEST_CASE("autocorrelation: lag zero, alternation, oracle match") {
    std::vector<double> series = {0.1, 0.9, 0.2, 0.8, 0.15, 0.85};
    auto acf = autocorrelation(series, 3);
    CHECK(acf[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(acf[1] < 0.0);  // alternating series anti-correlates at lag 1

    auto oracle = acf_oracle(series, 3);
    for (std::size_t l = 0; l <= 3; ++l) {
        CHECK(acf[l] == doctest::Approx(oracle[l]).epsilon(1e-12));
    }

    std::vector<double> constant(10, 0.4);
    CHECK_THROWS_AS(autocorrelation(constant, 3), DataError);
    CHECK_THROWS_AS(autocorrelation(series, 6), DataError);
}

TEST_CASE("acf is invariant under positive affine transforms") {
    Dataset d = five_handcrafted();
    for (const auto& p : d.profiles) {
        auto base = autocorrelation(p.values, 12);
        std::vector<double> scaled(24);
        for (std::size_t t = 0; t < 24; ++t) scaled[t] = 3.7 * p.values[t] + 11.0;
        auto transformed = autocorrelation(scaled, 12);
        for (std::size_t l = 0; l <= 12; ++l) {
            CHECK(transformed[l] == doctest::Approx(base[l]).epsilon(1e-10));
        }
    }
}

TEST_CASE("dataset_acf averages per-profile curves") {
    Dataset d = five_handcrafted();
    auto avg = dataset_acf(d, 8);
    std::vector<double> manual(9, 0.0);
    for (const auto& p : d.profiles) {
        auto a = autocorrelation(p.values, 8);
        for (std::size_t l = 0; l <= 8; ++l) manual[l] += a[l];
    }
    for (std::size_t l = 0; l <= 8; ++l) {
        CHECK(avg[l] == doctest::Approx(manual[l] / d.size()).epsilon(1e-12));
    }
    CHECK(avg[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("histogram: mass, single-bin concentration, disjoint supports") {
    Dataset half = test::dataset_of({test::profile_const(0.5, "h")});
    auto bins = histogram(half, 2);
    CHECK(bins == std::vector<double>{0.0, 1.0});

    const FixtureSpec spec[] = {{Archetype::DualPeak, 9, 0.2}};
    auto mass = histogram(fixture_generate(spec, 4), 50);
    double sum = 0.0;
    for (double b : mass) sum += b;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);

    // disjoint supports -> total variation style gap of exactly 2
    Dataset low = test::dataset_of({test::profile_cycle({0.05, 0.15, 0.25, 0.35}, "lo")});
    Dataset high = test::dataset_of({test::profile_cycle({0.65, 0.75, 0.85, 0.95}, "hi")});
    auto lo_bins = histogram(low, 10);
    auto hi_bins = histogram(high, 10);
    double l1 = 0.0;
    for (std::size_t i = 0; i < 10; ++i) l1 += std::fabs(lo_bins[i] - hi_bins[i]);
    CHECK(l1 == doctest::Approx(2.0).epsilon(1e-12));

    // the value 1.0 lands in the last (right-closed) bin
    Dataset ones = test::dataset_of({test::profile_cycle({1.0, 0.0}, "x")});
    auto edge = histogram(ones, 4);
    CHECK(edge[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(edge[0] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(histogram(half, 0), DataError);
}

TEST_CASE("boxplot_stats: degenerate box, symmetric median, outlier fences") {
    Dataset one = test::dataset_of({test::profile_cycle({0.3, 0.7}, "a")});
    auto boxes = boxplot_stats(one);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        const double v = one.profiles[0].values[t];
        CHECK(boxes[t].lo_whisker == v);
        CHECK(boxes[t].q1 == v);
        CHECK(boxes[t].median == v);
        CHECK(boxes[t].q3 == v);
        CHECK(boxes[t].hi_whisker == v);
        CHECK(boxes[t].outliers == 0);
    }

    // symmetric 5-point sample: median equals mean
    Dataset sym;
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        sym.profiles.push_back(test::profile_const(v, "s"));
    }
    auto sym_boxes = boxplot_stats(sym);
    CHECK(sym_boxes[0].median == doctest::Approx(0.5).epsilon(1e-15));

    // one extreme point beyond the 1.5 IQR fence
    Dataset spread;
    for (double v : {0.40, 0.42, 0.44, 0.46, 0.48, 0.50, 0.99}) {
        spread.profiles.push_back(test::profile_const(v, "o"));
    }
    auto fence_boxes = boxplot_stats(spread);
    CHECK(fence_boxes[0].outliers == 1);
    CHECK(fence_boxes[0].hi_whisker < 0.99);
    CHECK_THROWS_AS(boxplot_stats(Dataset{}), DataError);
}

TEST_CASE("nearest_match: exact hit, tie-break, brute-force agreement") {
    Dataset d = five_handcrafted();
    auto [idx, dist] = nearest_match(d.profiles[3], d);
    CHECK(idx == 3);
    CHECK(dist == 0.0);

    Dataset pair = test::dataset_of({test::profile_const(0.4, "a"),
                                     test::profile_const(0.6, "b")});
    auto [tie_idx, tie_dist] = nearest_match(test::profile_const(0.5, "query"), pair);
    CHECK(tie_idx == 0);
    CHECK(tie_dist == doctest::Approx(std::sqrt(24 * 0.01)).epsilon(1e-12));

    const FixtureSpec spec[] = {{Archetype::MorningPeak, 5, 0.2}};
    Dataset synth = fixture_generate(spec, 8);
    LoadProfile query = test::profile_cycle({0.3, 0.6, 0.1}, "q");
    auto [best_idx, best_dist] = nearest_match(query, synth);
    std::size_t scan_idx = 0;
    double scan_best = 1e300;
    for (std::size_t i = 0; i < synth.size(); ++i) {
        const double d2 = test::sq_distance(query.values, synth.profiles[i].values);
        if (d2 < scan_best) {
            scan_best = d2;
            scan_idx = i;
        }
    }
    CHECK(best_idx == scan_idx);
    CHECK(best_dist == doctest::Approx(std::sqrt(scan_best)).epsilon(1e-12));
    CHECK_THROWS_AS(nearest_match(query, Dataset{}), DataError);
}

TEST_CASE("stat profiles of normalized data respect the documented ranges") {
    const FixtureSpec spec[] = {{Archetype::EveningPeak, 40, 0.15},
                                {Archetype::FlatNight, 40, 0.15}};
    auto s = hourly_profiles(fixture_generate(spec, 19));
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        CHECK(s.mean[t] >= 0.0);
        CHECK(s.mean[t] <= 1.0);
        CHECK(s.variance[t] >= 0.0);
        CHECK(s.variance[t] <= 0.25);
        CHECK(s.q1[t] <= s.q3[t]);
    }
}
