#include "ergan/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

namespace ergan {

std::vector<double> proportions(std::span<const std::size_t> cluster_sizes) {
    if (cluster_sizes.empty()) throw DataError("proportions: no clusters");
    std::size_t total = 0;
    for (std::size_t s : cluster_sizes) {
        if (s == 0) throw DataError("proportions: empty cluster");
        total += s;
    }
    std::vector<double> alpha(cluster_sizes.size());
    for (std::size_t k = 0; k < cluster_sizes.size(); ++k) {
        alpha[k] = static_cast<double>(cluster_sizes[k]) / static_cast<double>(total);
    }
    return alpha;
}

std::vector<std::size_t> allocate(std::size_t total, std::span<const double> alpha) {
    if (total == 0) throw DataError("allocate: M must be positive");
    if (alpha.empty()) throw DataError("allocate: no proportions");
    double sum = 0.0;
    for (double a : alpha) {
        if (a < 0.0 || !std::isfinite(a)) throw DataError("allocate: bad proportion");
        sum += a;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw DataError("allocate: proportions do not sum to 1");

    std::vector<std::size_t> counts(alpha.size());
    std::vector<std::pair<double, std::size_t>> remainders(alpha.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const double exact = static_cast<double>(total) * alpha[k];
        counts[k] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[k];
        remainders[k] = {exact - std::floor(exact), k};
    }
    // Distribute the leftover units by descending fractional part; equal
    // fractions go to the smaller cluster index.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
        counts[remainders[i % remainders.size()].second] += 1;
    }
    return counts;
}

SynthesisPlan make_plan(std::size_t total, std::span<const std::size_t> cluster_sizes) {
    SynthesisPlan plan;
    plan.total = total;
    plan.alpha = proportions(cluster_sizes);
    plan.allocation = allocate(total, plan.alpha);
    return plan;
}

Dataset synthesize(std::span<const GeneratorNet> generators, const SynthesisPlan& plan,
                   std::uint64_t seed) {
    if (plan.allocation.size() != generators.size()) {
        throw DataError("synthesize: plan covers " + std::to_string(plan.allocation.size()) +
                        " clusters but " + std::to_string(generators.size()) +
                        " generators were given");
    }
    Dataset out;
    for (std::size_t k = 0; k < generators.size(); ++k) {
        const std::size_t count = plan.allocation[k];
        if (count == 0) continue;
        Rng rng(seed + k);  // independent per-cluster noise stream
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> noise(kHoursPerDay);
            for (double& v : noise) v = rng.gaussian();
            const auto values = generator_forward(generators[k], noise);
            LoadProfile p;
            std::copy(values.begin(), values.end(), p.values.begin());
            p.source_id = "synth_k" + std::to_string(k) + "_" + std::to_string(i);
            out.profiles.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace ergan
