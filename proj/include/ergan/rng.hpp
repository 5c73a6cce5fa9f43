#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ergan {

// Deterministic random source. mt19937_64 output is fully specified by the
// standard; the derived draws below (uniform doubles, Box-Muller gaussians,
// Fisher-Yates shuffles) are implemented by hand so that sequences are
// byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal draw (Box-Muller, second value cached).
    double gaussian();

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 eng_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Derives an independent stream seed from a base seed and a tag (splitmix64
// finalizer). Used for named sub-streams within one seeded computation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace ergan
