#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergan/adam.hpp"
#include "ergan/dataset.hpp"
#include "ergan/graph.hpp"
#include "ergan/lstm.hpp"
#include "ergan/params.hpp"

namespace ergan {

struct NetConfig {
    std::size_t input = 1;
    std::size_t hidden = 16;
    std::size_t layers = 5;
};

// Bi-LSTM generator: per-timestep dense head (2H -> 1) over the combined
// hidden state, sigmoid output. Output length equals the noise length.
struct GeneratorNet {
    NetConfig cfg;
    ParameterStore params;
};

// Bi-LSTM discriminator: dense head (2H -> 1) on the concatenation of the
// final forward and final backward hidden states, sigmoid output. The dense
// fan-in is recorded explicitly; only 2*hidden is a wirable width.
struct DiscriminatorNet {
    NetConfig cfg;
    std::size_t dense_inputs = 32;
    ParameterStore params;
};

GeneratorNet make_generator(const NetConfig& cfg, Rng& rng);
DiscriminatorNet make_discriminator(const NetConfig& cfg, Rng& rng);

// How the statistical-matching term of the generator loss reads mu/sigma:
// per-pattern scalar mean/variance averaged over the batch (default), or
// per-hour 24-vector profiles compared with an L1 norm.
enum class StatLossMode { kPatternScalar, kHourlyVector };

struct TrainConfig {
    std::size_t epochs = 10000;
    std::size_t batch_size = 1024;  // capped at the cluster size
    double gen_lr = 1e-4;
    double disc_lr = 1e-4;
    double lambda = 100.0;
    std::uint64_t seed = 0;
    std::size_t hidden = 16;
    std::size_t layers = 5;
    bool non_saturating = false;  // -log D(G(z)) instead of log(1 - D(G(z)))
    StatLossMode stat_mode = StatLossMode::kPatternScalar;
    // Emits "epoch g_loss d_loss" lines every log_every epochs when set.
    std::size_t log_every = 0;
    std::string log_prefix;

    void validate() const;
};

struct GanPair {
    GeneratorNet gen;
    DiscriminatorNet disc;
    AdamState gen_opt;
    AdamState disc_opt;
    int cluster_index = 0;
    TrainConfig config;
    std::vector<std::pair<double, double>> loss_history;  // per epoch (g, d)
};

// Probabilities are clamped to [1e-7, 1 - 1e-7] before any log.
inline constexpr double kProbClamp = 1e-7;

// Forward passes (inference path; the training path builds the same
// computation on a Graph and is cross-checked in tests).
std::vector<double> generator_forward(const GeneratorNet& gen, std::span<const double> noise);
double discriminator_forward(const DiscriminatorNet& disc, std::span<const double> values);

// mean over the batch of -log(real) - log(1 - fake).
double disc_loss(std::span<const double> real_scores, std::span<const double> fake_scores);

// mean over the batch of log(1 - fake_score) plus the lambda-weighted
// statistical gap between fake_batch and real_batch (rows are patterns).
double gen_loss(std::span<const double> fake_scores, const Mat& fake_batch,
                const Mat& real_batch, double lambda,
                StatLossMode mode = StatLossMode::kPatternScalar,
                bool non_saturating = false);

// Per-cluster adversarial training: per epoch, per shuffled batch, one Adam
// step on the discriminator loss then one on the generator loss with fresh
// noise. Deterministic given (cluster_data, config). Throws NumericError
// naming epoch and batch if a loss goes non-finite.
GanPair train_cluster_gan(const Dataset& cluster_data, const TrainConfig& config,
                          int cluster_index = 0);

// Checkpoint round-trip; generation after load is bit-identical.
void save_checkpoint(const GanPair& pair, std::ostream& out);
void save_checkpoint(const GanPair& pair, const std::string& path);
GanPair load_checkpoint(std::istream& in);
GanPair load_checkpoint(const std::string& path);

// --- graph builders shared with tests ---------------------------------------

struct GenGraphForward {
    StoreRefs refs;
    Graph::Ref output;  // B x T
};
GenGraphForward graph_generator_forward(Graph& g, const GeneratorNet& gen, Graph::Ref noise,
                                        bool trainable);

struct DiscGraphForward {
    StoreRefs refs;
    Graph::Ref scores;  // B x 1
};
DiscGraphForward graph_discriminator_forward(Graph& g, const DiscriminatorNet& disc,
                                             Graph::Ref profiles, bool trainable);

Graph::Ref graph_disc_loss(Graph& g, Graph::Ref real_scores, Graph::Ref fake_scores);
Graph::Ref graph_gen_loss(Graph& g, Graph::Ref fake_scores, Graph::Ref fake_batch,
                          const Mat& real_batch, double lambda, StatLossMode mode,
                          bool non_saturating);

}  // namespace ergan
