#pragma once

#include <cstdint>
#include <vector>

#include "ergan/cluster.hpp"
#include "ergan/dataset.hpp"
#include "ergan/ensemble.hpp"
#include "ergan/gan.hpp"

namespace ergan {

// End-to-end synthesis on an already ingested training set: choose K by the
// Davies-Bouldin index (unless fixed), cluster, train one GAN per cluster,
// apportion the requested volume and synthesize the union dataset.
struct PipelineConfig {
    std::size_t fixed_k = 0;  // 0 selects K over [k_lo, k_hi]
    std::size_t k_lo = 2;
    std::size_t k_hi = 12;
    TrainConfig train;        // template; per-cluster seed = seed + cluster index
    std::size_t synth_count = 0;  // 0 means "as many as the training set"
    std::uint64_t seed = 0;
    std::size_t jobs = 1;     // parallel cluster trainings (output-invariant)
};

struct PipelineResult {
    KSelectionReport selection;  // candidates empty when fixed_k was used
    ClusterModel clusters;
    std::vector<GanPair> gans;      // one per cluster, index order
    SynthesisPlan plan;
    Dataset synthetic;
};

PipelineResult run_pipeline(const Dataset& train_set, const PipelineConfig& config);

// Trains one GAN per cluster of an existing model (cluster k's seed is
// seed + k). jobs bounds the number of concurrent trainings; results are
// independent of it.
std::vector<GanPair> train_clusters(const Dataset& train_set, const ClusterModel& model,
                                    const TrainConfig& base, std::uint64_t seed,
                                    std::size_t jobs);

// Noise-stream seed used for synthesis, shared by the CLI and run_pipeline
// so staged and one-shot runs emit identical datasets.
std::uint64_t synthesis_seed(std::uint64_t master_seed);

}  // namespace ergan
