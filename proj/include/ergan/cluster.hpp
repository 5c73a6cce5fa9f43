#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ergan/dataset.hpp"

namespace ergan {

using Centroid = std::array<double, kHoursPerDay>;

struct ClusterModel {
    std::size_t k = 0;
    std::vector<Centroid> centroids;   // k rows
    std::vector<std::size_t> labels;   // per profile, in [0, k)
    double wcss = 0.0;
    double db_index = 0.0;             // NaN until computed (needs k >= 2)
    std::size_t iterations_run = 0;
    std::vector<double> wcss_history;  // per Lloyd iteration, non-increasing

    std::vector<std::size_t> cluster_sizes() const;
};

struct KSelectionReport {
    std::vector<std::pair<std::size_t, double>> candidates;  // (K, DB index)
    std::size_t chosen_k = 0;  // argmin DB; ties break toward smaller K
};

// labels[i] = argmin_j ||x_i - c_j||^2, ties toward the smallest j.
std::vector<std::size_t> assign(const Dataset& profiles, std::span<const Centroid> centroids);

// Per-cluster means. An empty cluster is reseeded to the profile farthest
// from its own (freshly computed) centroid, taking each repair target at
// most once.
std::vector<Centroid> update_centroids(const Dataset& profiles,
                                       std::span<const std::size_t> labels, std::size_t k);

double wcss(const Dataset& profiles, std::span<const std::size_t> labels,
            std::span<const Centroid> centroids);

// Lloyd's algorithm with k-means++ initialization. Stops when labels are
// stable, the max centroid displacement drops below tol, or max_iter is hit.
ClusterModel kmeans(const Dataset& profiles, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 300, double tol = 1e-6);

// Davies-Bouldin index: (1/K) sum_k max_{k'!=k} (s_k + s_k') / d_kk' with
// s_k the mean Euclidean distance to the centroid and d_kk' the centroid
// distance. Requires K >= 2, no empty cluster, distinct centroids.
double db_index(const Dataset& profiles, std::span<const std::size_t> labels,
                std::span<const Centroid> centroids);

// Runs kmeans + db_index for each K in [k_lo, k_hi] and picks the argmin.
KSelectionReport select_k(const Dataset& profiles, std::size_t k_lo, std::size_t k_hi,
                          std::uint64_t seed);

// Structured text round-trip: K, centroids (9 significant digits), labels,
// wcss, db_index.
void save_cluster_model(const ClusterModel& model, std::ostream& out);
void save_cluster_model(const ClusterModel& model, const std::string& path);
ClusterModel load_cluster_model(std::istream& in);
ClusterModel load_cluster_model(const std::string& path);

}  // namespace ergan
