#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ergan/cluster.hpp"
#include "ergan/errors.hpp"
#include "ergan/fixture.hpp"
#include "helpers.hpp"

using namespace ergan;

namespace {

// Independent oracle: exhaustive scan over every label assignment, scoring
// each with centroids recomputed as cluster means. Only feasible for tiny N.
double enumerate_best_wcss(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    std::vector<std::size_t> labels(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        bool all_used = true;
        std::vector<bool> used(k, false);
        for (std::size_t l : labels) used[l] = true;
        for (bool u : used) all_used = all_used && u;
        if (all_used) {
            std::vector<Centroid> cents(k);
            std::vector<std::size_t> counts(k, 0);
            for (auto& c : cents) c.fill(0.0);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[labels[i]];
                for (std::size_t t = 0; t < kHoursPerDay; ++t) {
                    cents[labels[i]][t] += data.profiles[i].values[t];
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                for (double& v : cents[j]) v /= static_cast<double>(counts[j]);
            }
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                total += test::sq_distance(data.profiles[i].values, cents[labels[i]]);
            }
            best = std::min(best, total);
        }
        std::size_t pos = 0;
        while (pos < n && labels[pos] == k - 1) labels[pos++] = 0;
        if (pos == n) break;
        ++labels[pos];
    }
    return best;
}

// Step-by-step Davies-Bouldin re-implementation, independent of the library
// path (separate accumulation order and structure).
double db_oracle(const Dataset& data, const std::vector<std::size_t>& labels,
                 const std::vector<Centroid>& centroids) {
    const std::size_t k = centroids.size();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    std::vector<double> s(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i : members[j]) {
            s[j] += std::sqrt(test::sq_distance(data.profiles[i].values, centroids[j]));
        }
        s[j] /= static_cast<double>(members[j].size());
    }
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            const double d = std::sqrt(test::sq_distance(centroids[a], centroids[b]));
            worst = std::max(worst, (s[a] + s[b]) / d);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

Dataset two_tight_pairs() {
    Dataset d;
    d.profiles.push_back(test::profile_cycle({0.10, 0.00}, "a0"));
    d.profiles.push_back(test::profile_cycle({0.12, 0.02}, "a1"));
    d.profiles.push_back(test::profile_cycle({0.90, 1.00}, "b0"));
    d.profiles.push_back(test::profile_cycle({0.88, 0.98}, "b1"));
    return d;
}

}  // namespace

TEST_CASE("assign: K=1, exact match and tie-break") {
    Dataset d = two_tight_pairs();
    std::vector<Centroid> one = {d.profiles[0].values};
    auto labels = assign(d, one);
    CHECK(labels == std::vector<std::size_t>{0, 0, 0, 0});

    std::vector<Centroid> three = {d.profiles[3].values, d.profiles[1].values,
                                   d.profiles[2].values};
    labels = assign(d, three);
    CHECK(labels[1] == 1);  // exact hit on centroid index 1
    CHECK(labels[2] == 2);  // exact hit on centroid index 2

    // equidistant between two centroids -> smaller index wins
    Dataset mid = test::dataset_of({test::profile_const(0.5, "mid")});
    std::vector<Centroid> pair = {test::profile_const(0.4).values,
                                  test::profile_const(0.6).values};
    CHECK(assign(mid, pair)[0] == 0);
}

TEST_CASE("assign is idempotent under fixed centroids") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 20, 0.2},
                                {Archetype::EveningPeak, 20, 0.2}};
    Dataset d = fixture_generate(spec, 21);
    auto model = kmeans(d, 3, 5);
    auto again = assign(d, model.centroids);
    CHECK(model.labels == again);
}

TEST_CASE("update_centroids: means, singletons, empty-cluster reseed") {
    Dataset d = two_tight_pairs();
    std::vector<std::size_t> labels = {0, 0, 1, 1};
    auto cents = update_centroids(d, labels, 2);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        CHECK(cents[0][t] ==
              doctest::Approx((d.profiles[0].values[t] + d.profiles[1].values[t]) / 2));
    }

    labels = {0, 1, 1, 1};
    cents = update_centroids(d, labels, 2);
    CHECK(cents[0] == d.profiles[0].values);  // singleton cluster

    // Force an empty cluster 2; its reseed target must be the point farthest
    // from its own centroid, found here by brute force.
    labels = {0, 0, 1, 1};
    cents = update_centroids(d, labels, 3);
    std::vector<Centroid> mean_cents = update_centroids(d, labels, 2);
    double worst = -1.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double dist = test::sq_distance(d.profiles[i].values, mean_cents[labels[i]]);
        if (dist > worst) {
            worst = dist;
            worst_i = i;
        }
    }
    CHECK(cents[2] == d.profiles[worst_i].values);
}

TEST_CASE("wcss: zero residual and the two-point identity") {
    Dataset d = two_tight_pairs();
    std::vector<std::size_t> self_labels = {0, 1, 2, 3};
    std::vector<Centroid> self_cents;
    for (const auto& p : d.profiles) self_cents.push_back(p.values);
    CHECK(wcss(d, self_labels, self_cents) == 0.0);

    // K=1 on two profiles p, q with centroid (p+q)/2 -> ||p-q||^2 / 2
    Dataset two = test::dataset_of({d.profiles[0], d.profiles[2]});
    std::vector<std::size_t> labels = {0, 0};
    auto cents = update_centroids(two, labels, 1);
    const double expect = test::sq_distance(d.profiles[0].values, d.profiles[2].values) / 2.0;
    CHECK(wcss(two, labels, cents) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("kmeans recovers two tight far-apart pairs and matches enumeration") {
    Dataset d = two_tight_pairs();
    auto model = kmeans(d, 2, 3);
    CHECK(model.labels[0] == model.labels[1]);
    CHECK(model.labels[2] == model.labels[3]);
    CHECK(model.labels[0] != model.labels[2]);
    CHECK(model.wcss == doctest::Approx(enumerate_best_wcss(d, 2)).epsilon(1e-12));
}

TEST_CASE("kmeans attains the enumeration optimum on tiny separated fixtures") {
    // One fixture per K with exactly K well-separated groups; a single
    // seeded k-means++ run is expected to find the global optimum there.
    const Archetype kinds[3] = {Archetype::MorningPeak, Archetype::EveningPeak,
                                Archetype::FlatNight};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (std::size_t k = 1; k <= 3; ++k) {
            std::vector<FixtureSpec> spec;
            for (std::size_t j = 0; j < k; ++j) {
                spec.push_back({kinds[j], 8 / k, 0.03});
            }
            Dataset d = fixture_generate(spec, seed);
            auto model = kmeans(d, k, seed);
            const double best = enumerate_best_wcss(d, k);
            CHECK(model.wcss == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_CASE("kmeans: K=N gives zero wcss, determinism, argument checks") {
    Dataset d = two_tight_pairs();
    auto model = kmeans(d, 4, 7);
    CHECK(model.wcss == 0.0);

    auto a = kmeans(d, 2, 9);
    auto b = kmeans(d, 2, 9);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    CHECK(a.wcss == b.wcss);
    CHECK(a.iterations_run == b.iterations_run);

    CHECK_THROWS_AS(kmeans(d, 5, 1), DataError);
    CHECK_THROWS_AS(kmeans(d, 0, 1), DataError);
}

TEST_CASE("Lloyd iterations never increase wcss") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 30, 0.15},
                                {Archetype::EveningPeak, 30, 0.15},
                                {Archetype::DualPeak, 30, 0.15}};
    Dataset d = fixture_generate(spec, 13);
    for (std::size_t k : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
        auto model = kmeans(d, k, 17);
        for (std::size_t i = 1; i < model.wcss_history.size(); ++i) {
            CHECK(model.wcss_history[i] <= model.wcss_history[i - 1] + 1e-12);
        }
    }
}

TEST_CASE("finalized models have mean centroids and no empty cluster") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 12, 0.1},
                                {Archetype::FlatNight, 12, 0.1}};
    Dataset d = fixture_generate(spec, 31);
    auto model = kmeans(d, 4, 31);
    auto sizes = model.cluster_sizes();
    for (std::size_t s : sizes) CHECK(s > 0);
    auto means = update_centroids(d, model.labels, model.k);
    for (std::size_t j = 0; j < model.k; ++j) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            CHECK(model.centroids[j][t] == doctest::Approx(means[j][t]).epsilon(1e-9));
        }
    }
}

TEST_CASE("db_index: zero scatter, oracle match, scatter scaling, relabeling") {
    // two singleton clusters -> s = 0 on both sides -> DB = 0
    Dataset singletons = test::dataset_of({test::profile_cycle({0.0, 0.2}, "x"),
                                           test::profile_cycle({1.0, 0.6}, "y")});
    std::vector<std::size_t> labels01 = {0, 1};
    std::vector<Centroid> cents01 = {singletons.profiles[0].values,
                                     singletons.profiles[1].values};
    CHECK(db_index(singletons, labels01, cents01) == 0.0);

    // handcrafted 6-profile instance vs the independent step-by-step oracle
    Dataset d;
    for (double v : {0.00, 0.05, 0.10}) {
        d.profiles.push_back(test::profile_cycle({v, 0.3 + v}, "a"));
    }
    for (double v : {0.80, 0.90, 1.00}) {
        d.profiles.push_back(test::profile_cycle({v, v - 0.5}, "b"));
    }
    std::vector<std::size_t> labels = {0, 0, 0, 1, 1, 1};
    auto cents = update_centroids(d, labels, 2);
    const double lib = db_index(d, labels, cents);
    const double oracle = db_oracle(d, labels, cents);
    CHECK(lib == doctest::Approx(oracle).epsilon(1e-12));

    // doubling every point's offset from its centroid doubles DB
    Dataset wide;
    for (std::size_t i = 0; i < d.size(); ++i) {
        LoadProfile p = d.profiles[i];
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            p.values[t] = cents[labels[i]][t] + 2.0 * (p.values[t] - cents[labels[i]][t]);
        }
        wide.profiles.push_back(p);
    }
    auto wide_cents = update_centroids(wide, labels, 2);
    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            REQUIRE(wide_cents[j][t] == doctest::Approx(cents[j][t]).epsilon(1e-12));
        }
    }
    CHECK(db_index(wide, labels, wide_cents) == doctest::Approx(2.0 * lib).epsilon(1e-12));

    // invariance under cluster relabeling
    std::vector<std::size_t> permuted = {1, 1, 1, 0, 0, 0};
    std::vector<Centroid> swapped = {cents[1], cents[0]};
    CHECK(db_index(d, permuted, swapped) == doctest::Approx(lib).epsilon(1e-15));
}

TEST_CASE("db_index rejects degenerate inputs") {
    Dataset d = two_tight_pairs();
    std::vector<std::size_t> labels = {0, 0, 1, 1};
    std::vector<Centroid> coincident = {d.profiles[0].values, d.profiles[0].values};
    CHECK_THROWS_AS(db_index(d, labels, coincident), DataError);
    std::vector<Centroid> one = {d.profiles[0].values};
    std::vector<std::size_t> ones = {0, 0, 0, 0};
    CHECK_THROWS_AS(db_index(d, ones, one), DataError);
}

TEST_CASE("select_k recovers three archetypes and reports all candidates") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 40, 0.05},
                                {Archetype::EveningPeak, 40, 0.05},
                                {Archetype::FlatNight, 40, 0.05}};
    Dataset d = fixture_generate(spec, 23);
    auto report = select_k(d, 2, 6, 23);
    CHECK(report.candidates.size() == 5);
    CHECK(report.chosen_k == 3);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [k, db] : report.candidates) best = std::min(best, db);
    for (const auto& [k, db] : report.candidates) {
        if (k == report.chosen_k) CHECK(db <= best + 1e-12);  // minimum up to the tie window
    }
}

TEST_CASE("select_k single-candidate range and validation") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 10, 0.1},
                                {Archetype::EveningPeak, 10, 0.1}};
    Dataset d = fixture_generate(spec, 29);
    auto report = select_k(d, 5, 5, 29);
    CHECK(report.candidates.size() == 1);
    CHECK(report.chosen_k == 5);
    CHECK_THROWS_AS(select_k(d, 1, 5, 1), DataError);
    CHECK_THROWS_AS(select_k(d, 2, 20, 1), DataError);
}

TEST_CASE("cluster model file round-trips") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 8, 0.1},
                                {Archetype::EveningPeak, 8, 0.1}};
    Dataset d = fixture_generate(spec, 37);
    auto model = kmeans(d, 2, 37);
    model.db_index = db_index(d, model.labels, model.centroids);
    std::ostringstream out;
    save_cluster_model(model, out);
    std::istringstream in(out.str());
    auto back = load_cluster_model(in);
    CHECK(back.k == model.k);
    CHECK(back.labels == model.labels);
    CHECK(back.wcss == doctest::Approx(model.wcss).epsilon(1e-9));
    CHECK(back.db_index == doctest::Approx(model.db_index).epsilon(1e-9));
    for (std::size_t j = 0; j < model.k; ++j) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            CHECK(back.centroids[j][t] == doctest::Approx(model.centroids[j][t]).epsilon(1e-9));
        }
    }
    std::istringstream truncated(out.str().substr(0, out.str().size() / 2));
    CHECK_THROWS_AS(load_cluster_model(truncated), DataError);
}
