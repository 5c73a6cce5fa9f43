#include "ergan/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

namespace ergan {

namespace {

double sq_dist(const std::array<double, kHoursPerDay>& a,
               const std::array<double, kHoursPerDay>& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        const double d = a[t] - b[t];
        s += d * d;
    }
    return s;
}

// k-means++ seeding: first centroid uniform, the rest proportional to the
// squared distance to the nearest chosen centroid.
std::vector<Centroid> init_plus_plus(const Dataset& profiles, std::size_t k, Rng& rng) {
    const std::size_t n = profiles.size();
    std::vector<Centroid> centroids;
    centroids.reserve(k);
    std::vector<bool> chosen(n, false);

    std::size_t first = static_cast<std::size_t>(rng.below(n));
    centroids.push_back(profiles.profiles[first].values);
    chosen[first] = true;

    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Centroid& c : centroids) best = std::min(best, sq_dist(profiles.profiles[i].values, c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) pick = n - 1;  // rounding fell off the end
        } else {
            // All remaining points coincide with chosen centroids; pick any
            // unchosen index so we still emit k rows.
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) pick = static_cast<std::size_t>(rng.below(n));
        }
        chosen[pick] = true;
        centroids.push_back(profiles.profiles[pick].values);
    }
    return centroids;
}

}  // namespace

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t l : labels) ++sizes[l];
    return sizes;
}

std::vector<std::size_t> assign(const Dataset& profiles, std::span<const Centroid> centroids) {
    if (centroids.empty()) throw DataError("assign: no centroids");
    for (const Centroid& c : centroids) {
        for (double v : c) {
            if (!std::isfinite(v)) throw DataError("assign: non-finite centroid");
        }
    }
    std::vector<std::size_t> labels(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < centroids.size(); ++j) {
            const double d = sq_dist(profiles.profiles[i].values, centroids[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        labels[i] = best_j;
    }
    return labels;
}

std::vector<Centroid> update_centroids(const Dataset& profiles,
                                       std::span<const std::size_t> labels, std::size_t k) {
    if (labels.size() != profiles.size()) throw DataError("update_centroids: label count mismatch");
    std::vector<Centroid> centroids(k);
    std::vector<std::size_t> counts(k, 0);
    for (Centroid& c : centroids) c.fill(0.0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const std::size_t l = labels[i];
        if (l >= k) throw DataError("update_centroids: label out of range");
        ++counts[l];
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            centroids[l][t] += profiles.profiles[i].values[t];
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) {
            for (double& v : centroids[j]) v /= static_cast<double>(counts[j]);
        }
    }
    // Empty-cluster repair: reseed to the point farthest from its assigned
    // centroid; each repair target is used once.
    std::vector<bool> taken(profiles.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) continue;
        double worst = -1.0;
        std::size_t worst_i = profiles.size();
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            if (taken[i]) continue;
            if (counts[labels[i]] == 0) continue;  // not a settled cluster
            const double d = sq_dist(profiles.profiles[i].values, centroids[labels[i]]);
            if (d > worst) {
                worst = d;
                worst_i = i;
            }
        }
        if (worst_i == profiles.size()) {
            throw DataError("update_centroids: cannot repair empty cluster " + std::to_string(j));
        }
        centroids[j] = profiles.profiles[worst_i].values;
        taken[worst_i] = true;
    }
    return centroids;
}

double wcss(const Dataset& profiles, std::span<const std::size_t> labels,
            std::span<const Centroid> centroids) {
    double s = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        s += sq_dist(profiles.profiles[i].values, centroids[labels[i]]);
    }
    return s;
}

ClusterModel kmeans(const Dataset& profiles, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter, double tol) {
    const std::size_t n = profiles.size();
    if (k < 1) throw DataError("kmeans: K must be at least 1");
    if (k > n) throw DataError("kmeans: K=" + std::to_string(k) + " exceeds N=" + std::to_string(n));
    if (max_iter < 1) throw DataError("kmeans: max_iter must be at least 1");

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.db_index = std::numeric_limits<double>::quiet_NaN();
    model.centroids = init_plus_plus(profiles, k, rng);

    std::vector<std::size_t> prev_labels;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        model.labels = assign(profiles, model.centroids);
        std::vector<Centroid> next = update_centroids(profiles, model.labels, k);
        double max_shift = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            max_shift = std::max(max_shift, std::sqrt(sq_dist(next[j], model.centroids[j])));
        }
        model.centroids = std::move(next);
        model.iterations_run = iter + 1;
        model.wcss_history.push_back(wcss(profiles, model.labels, model.centroids));
        if (!prev_labels.empty() && prev_labels == model.labels) break;
        prev_labels = model.labels;
        if (max_shift < tol) break;
    }
    model.wcss = model.wcss_history.back();
    return model;
}

double db_index(const Dataset& profiles, std::span<const std::size_t> labels,
                std::span<const Centroid> centroids) {
    const std::size_t k = centroids.size();
    if (k < 2) throw DataError("db_index: needs at least two clusters");
    std::vector<double> scatter(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const std::size_t l = labels[i];
        if (l >= k) throw DataError("db_index: label out of range");
        scatter[l] += std::sqrt(sq_dist(profiles.profiles[i].values, centroids[l]));
        ++counts[l];
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) throw DataError("db_index: empty cluster " + std::to_string(j));
        scatter[j] /= static_cast<double>(counts[j]);
    }
    double db = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        double worst = 0.0;
        for (std::size_t b = 0; b < k; ++b) {
            if (b == a) continue;
            const double d = std::sqrt(sq_dist(centroids[a], centroids[b]));
            if (d == 0.0) {
                throw DataError("db_index: coincident centroids " + std::to_string(a) + " and " +
                                std::to_string(b) + " (degenerate clustering)");
            }
            worst = std::max(worst, (scatter[a] + scatter[b]) / d);
        }
        db += worst;
    }
    return db / static_cast<double>(k);
}

KSelectionReport select_k(const Dataset& profiles, std::size_t k_lo, std::size_t k_hi,
                          std::uint64_t seed) {
    if (k_lo < 2) throw DataError("select_k: range must start at K >= 2");
    if (k_hi < k_lo) throw DataError("select_k: empty K range");
    if (k_hi > 64) throw DataError("select_k: range must stay within [2, 64]");
    if (k_hi + 1 > profiles.size()) throw DataError("select_k: range exceeds N-1");
    KSelectionReport report;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        ClusterModel model = kmeans(profiles, k, seed);
        const double db = db_index(profiles, model.labels, model.centroids);
        report.candidates.emplace_back(k, db);
        // candidates within 1e-12 count as tied; ties keep the smaller K
        if (db < best - 1e-12) {
            best = db;
            report.chosen_k = k;
        }
    }
    return report;
}

void save_cluster_model(const ClusterModel& model, std::ostream& out) {
    char buf[64];
    out << "ergan-cluster-model v1\n";
    out << "K " << model.k << "\n";
    out << "N " << model.labels.size() << "\n";
    std::snprintf(buf, sizeof(buf), "%.9g", model.wcss);
    out << "wcss " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.9g", model.db_index);
    out << "db_index " << buf << "\n";
    out << "iterations " << model.iterations_run << "\n";
    out << "centroids\n";
    for (const Centroid& c : model.centroids) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            std::snprintf(buf, sizeof(buf), "%.9g", c[t]);
            out << (t ? " " : "") << buf;
        }
        out << "\n";
    }
    out << "labels\n";
    for (std::size_t i = 0; i < model.labels.size(); ++i) {
        out << (i ? " " : "") << model.labels[i];
    }
    out << "\n";
}

void save_cluster_model(const ClusterModel& model, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    save_cluster_model(model, f);
}

ClusterModel load_cluster_model(std::istream& in) {
    std::string tok;
    auto expect = [&](const std::string& want) {
        if (!(in >> tok) || tok != want) {
            throw DataError("cluster model file: expected '" + want + "'");
        }
    };
    // istream >> double does not reliably accept "nan"; go through strtod.
    auto read_double = [&](const char* what) {
        if (!(in >> tok)) throw DataError(std::string("cluster model file: bad ") + what);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
            throw DataError(std::string("cluster model file: bad ") + what);
        }
        return v;
    };
    expect("ergan-cluster-model");
    expect("v1");
    ClusterModel model;
    std::size_t n = 0;
    expect("K");
    if (!(in >> model.k) || model.k < 1) throw DataError("cluster model file: bad K");
    expect("N");
    if (!(in >> n)) throw DataError("cluster model file: bad N");
    expect("wcss");
    model.wcss = read_double("wcss");
    expect("db_index");
    model.db_index = read_double("db_index");
    expect("iterations");
    if (!(in >> model.iterations_run)) throw DataError("cluster model file: bad iterations");
    expect("centroids");
    model.centroids.resize(model.k);
    for (Centroid& c : model.centroids) {
        for (double& v : c) v = read_double("centroid value");
    }
    expect("labels");
    model.labels.resize(n);
    for (std::size_t& l : model.labels) {
        if (!(in >> l) || l >= model.k) throw DataError("cluster model file: bad label");
    }
    return model;
}

ClusterModel load_cluster_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read " + path);
    return load_cluster_model(f);
}

}  // namespace ergan
