#include "ergan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

namespace ergan {

std::uint64_t synthesis_seed(std::uint64_t master_seed) {
    return derive_seed(master_seed, 0x53594e54ULL);
}

std::vector<GanPair> train_clusters(const Dataset& train_set, const ClusterModel& model,
                                    const TrainConfig& base, std::uint64_t seed,
                                    std::size_t jobs) {
    if (model.labels.size() != train_set.size()) {
        throw DataError("train_clusters: cluster model covers " +
                        std::to_string(model.labels.size()) + " profiles, dataset has " +
                        std::to_string(train_set.size()));
    }
    const std::size_t k = model.k;
    std::vector<Dataset> cluster_data(k);
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        cluster_data[model.labels[i]].profiles.push_back(train_set.profiles[i]);
    }

    std::vector<GanPair> gans(k);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= k) return;
            try {
                TrainConfig cfg = base;
                cfg.seed = seed + idx;  // per-cluster stream
                if (!cfg.log_prefix.empty()) {
                    cfg.log_prefix += " cluster " + std::to_string(idx);
                }
                gans[idx] = train_cluster_gan(cluster_data[idx], cfg, static_cast<int>(idx));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(k);
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, k));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < workers; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return gans;
}

PipelineResult run_pipeline(const Dataset& train_set, const PipelineConfig& config) {
    if (train_set.empty()) throw DataError("pipeline: empty training set");
    PipelineResult result;

    std::size_t k = config.fixed_k;
    if (k == 0) {
        const std::size_t hi = std::min(config.k_hi, train_set.size() - 1);
        if (config.k_lo < 2 || hi < config.k_lo) {
            throw DataError("pipeline: K range [" + std::to_string(config.k_lo) + ", " +
                            std::to_string(config.k_hi) + "] is not usable for N=" +
                            std::to_string(train_set.size()));
        }
        result.selection = select_k(train_set, config.k_lo, hi, config.seed);
        k = result.selection.chosen_k;
    }

    result.clusters = kmeans(train_set, k, config.seed);
    if (k >= 2) {
        result.clusters.db_index =
            db_index(train_set, result.clusters.labels, result.clusters.centroids);
    }

    result.gans = train_clusters(train_set, result.clusters, config.train, config.seed,
                                 config.jobs);

    const std::size_t m = config.synth_count == 0 ? train_set.size() : config.synth_count;
    result.plan = make_plan(m, result.clusters.cluster_sizes());
    std::vector<GeneratorNet> generators;
    generators.reserve(k);
    for (const GanPair& pair : result.gans) generators.push_back(pair.gen);
    result.synthetic = synthesize(generators, result.plan, synthesis_seed(config.seed));
    return result;
}

}  // namespace ergan
