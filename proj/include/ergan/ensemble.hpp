#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ergan/dataset.hpp"
#include "ergan/gan.hpp"

namespace ergan {

struct SynthesisPlan {
    std::size_t total = 0;               // requested M
    std::vector<double> alpha;           // cluster proportions, sums to 1
    std::vector<std::size_t> allocation; // per-cluster counts, sums to M
};

// alpha_k = size_k / sum(sizes). Throws on empty input or a zero size.
std::vector<double> proportions(std::span<const std::size_t> cluster_sizes);

// Largest-remainder apportionment: floor(M * alpha_k) each, leftover units
// to the largest fractional parts, ties to the smallest index. The total is
// exactly M and every |M_k - M*alpha_k| < 1.
std::vector<std::size_t> allocate(std::size_t total, std::span<const double> alpha);

SynthesisPlan make_plan(std::size_t total, std::span<const std::size_t> cluster_sizes);

// Draws allocation[k] noise sequences from a per-cluster stream seeded with
// seed + k, runs each generator, tags source_id "synth_k<cluster>_<ordinal>"
// and concatenates clusters in index order.
Dataset synthesize(std::span<const GeneratorNet> generators, const SynthesisPlan& plan,
                   std::uint64_t seed);

}  // namespace ergan
