#include "ergan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ergan/errors.hpp"

namespace ergan {

namespace {

void check_net_config(const NetConfig& cfg) {
    if (cfg.input == 0 || cfg.hidden == 0 || cfg.layers == 0) {
        throw DataError("net config: sizes must be positive");
    }
}

// Batch statistics used by the pattern-scalar loss mode: mean of per-pattern
// means is the global mean; per-pattern variance uses divisor T.
double batch_pattern_mean(const Mat& batch) {
    double s = 0.0;
    for (double v : batch.a) s += v;
    return s / static_cast<double>(batch.size());
}

double batch_pattern_variance(const Mat& batch) {
    double acc = 0.0;
    for (std::size_t b = 0; b < batch.rows; ++b) {
        const double* r = batch.row(b);
        double mean = 0.0;
        for (std::size_t t = 0; t < batch.cols; ++t) mean += r[t];
        mean /= static_cast<double>(batch.cols);
        double var = 0.0;
        for (std::size_t t = 0; t < batch.cols; ++t) {
            const double d = r[t] - mean;
            var += d * d;
        }
        acc += var / static_cast<double>(batch.cols);
    }
    return acc / static_cast<double>(batch.rows);
}

void hourly_mean_variance(const Mat& batch, std::vector<double>& mean,
                          std::vector<double>& variance) {
    mean.assign(batch.cols, 0.0);
    variance.assign(batch.cols, 0.0);
    for (std::size_t b = 0; b < batch.rows; ++b) {
        const double* r = batch.row(b);
        for (std::size_t t = 0; t < batch.cols; ++t) mean[t] += r[t];
    }
    for (double& v : mean) v /= static_cast<double>(batch.rows);
    for (std::size_t b = 0; b < batch.rows; ++b) {
        const double* r = batch.row(b);
        for (std::size_t t = 0; t < batch.cols; ++t) {
            const double d = r[t] - mean[t];
            variance[t] += d * d;
        }
    }
    for (double& v : variance) v /= static_cast<double>(batch.rows);
}

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

Mat rows_to_mat(const Dataset& data, std::span<const std::size_t> indices) {
    Mat m(indices.size(), kHoursPerDay);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto& v = data.profiles[indices[i]].values;
        std::copy(v.begin(), v.end(), m.row(i));
    }
    return m;
}

std::string format_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<Graph::Ref> split_steps(Graph& g, Graph::Ref sequence_batch) {
    std::vector<Graph::Ref> x_steps(sequence_batch.cols);
    for (std::size_t t = 0; t < x_steps.size(); ++t) {
        x_steps[t] = g.slice_cols(sequence_batch, t, t + 1);
    }
    return x_steps;
}

Graph::Ref gen_output_with_refs(Graph& g, const StoreRefs& refs, std::size_t hidden,
                                Graph::Ref noise) {
    const auto x_steps = split_steps(g, noise);
    GraphBiLstmOutput out = graph_bilstm(g, x_steps, refs.layers, hidden);
    std::vector<Graph::Ref> columns(x_steps.size());
    for (std::size_t t = 0; t < x_steps.size(); ++t) {
        columns[t] = g.sigmoid(g.add_rowvec(g.linear(out.per_step[t], refs.out_w), refs.out_b));
    }
    return g.concat_cols(columns);
}

Graph::Ref disc_scores_with_refs(Graph& g, const StoreRefs& refs, std::size_t hidden,
                                 Graph::Ref profiles) {
    const auto x_steps = split_steps(g, profiles);
    GraphBiLstmOutput out = graph_bilstm(g, x_steps, refs.layers, hidden);
    const Graph::Ref parts[2] = {out.final_forward, out.final_backward};
    return g.sigmoid(g.add_rowvec(g.linear(g.concat_cols(parts), refs.out_w), refs.out_b));
}

}  // namespace

GeneratorNet make_generator(const NetConfig& cfg, Rng& rng) {
    check_net_config(cfg);
    GeneratorNet net;
    net.cfg = cfg;
    init_bilstm_params(net.params, cfg.input, cfg.hidden, cfg.layers, rng);
    init_dense_params(net.params, 2 * cfg.hidden, 1, cfg.hidden, rng);
    return net;
}

DiscriminatorNet make_discriminator(const NetConfig& cfg, Rng& rng) {
    check_net_config(cfg);
    DiscriminatorNet net;
    net.cfg = cfg;
    net.dense_inputs = 2 * cfg.hidden;
    init_bilstm_params(net.params, cfg.input, cfg.hidden, cfg.layers, rng);
    init_dense_params(net.params, net.dense_inputs, 1, cfg.hidden, rng);
    return net;
}

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || hidden == 0 || layers == 0) {
        throw DataError("train config: sizes must be positive");
    }
    if (!(gen_lr > 0.0) || !(disc_lr > 0.0)) {
        throw DataError("train config: learning rates must be positive");
    }
    if (lambda < 0.0) throw DataError("train config: lambda must be non-negative");
}

std::vector<double> generator_forward(const GeneratorNet& gen, std::span<const double> noise) {
    if (noise.empty()) throw DataError("generator: empty noise sequence");
    for (double v : noise) {
        if (!std::isfinite(v)) throw NumericError("generator: non-finite noise");
    }
    Mat seq(noise.size(), 1);
    std::copy(noise.begin(), noise.end(), seq.a.begin());
    const auto layers =
        layers_from_store(gen.params, gen.cfg.input, gen.cfg.hidden, gen.cfg.layers);
    BiLstmOutput out = bilstm_forward(seq, layers);
    const auto& w = gen.params.entry("out.W");
    const auto& b = gen.params.entry("out.b");
    Mat wm(1, 2 * gen.cfg.hidden);
    wm.a = w.values;
    std::vector<double> result(noise.size());
    for (std::size_t t = 0; t < noise.size(); ++t) {
        const auto y = dense(std::span<const double>(out.per_step.row(t), out.per_step.cols), wm,
                             b.values);
        result[t] = stable_sigmoid(y[0]);
    }
    return result;
}

double discriminator_forward(const DiscriminatorNet& disc, std::span<const double> values) {
    if (values.size() != kHoursPerDay) {
        throw DataError("discriminator: expected a 24-value profile, got " +
                        std::to_string(values.size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("discriminator: non-finite input");
    }
    Mat seq(values.size(), 1);
    std::copy(values.begin(), values.end(), seq.a.begin());
    const auto layers =
        layers_from_store(disc.params, disc.cfg.input, disc.cfg.hidden, disc.cfg.layers);
    BiLstmOutput out = bilstm_forward(seq, layers);
    std::vector<double> final_state = out.final_forward;
    final_state.insert(final_state.end(), out.final_backward.begin(), out.final_backward.end());
    const auto& w = disc.params.entry("out.W");
    const auto& b = disc.params.entry("out.b");
    Mat wm(1, disc.dense_inputs);
    wm.a = w.values;
    const auto y = dense(final_state, wm, b.values);
    return stable_sigmoid(y[0]);
}

double disc_loss(std::span<const double> real_scores, std::span<const double> fake_scores) {
    if (real_scores.empty() || fake_scores.empty()) throw DataError("disc_loss: empty batch");
    double sr = 0.0, sf = 0.0;
    for (double p : real_scores) sr += std::log(clamp_prob(p));
    for (double p : fake_scores) sf += std::log(1.0 - clamp_prob(p));
    return -sr / static_cast<double>(real_scores.size()) -
           sf / static_cast<double>(fake_scores.size());
}

double gen_loss(std::span<const double> fake_scores, const Mat& fake_batch,
                const Mat& real_batch, double lambda, StatLossMode mode, bool non_saturating) {
    if (fake_scores.empty() || fake_batch.rows == 0 || real_batch.rows == 0) {
        throw DataError("gen_loss: empty batch");
    }
    if (lambda < 0.0) throw DataError("gen_loss: negative lambda");
    double adv = 0.0;
    for (double p : fake_scores) {
        adv += non_saturating ? -std::log(clamp_prob(p)) : std::log(1.0 - clamp_prob(p));
    }
    adv /= static_cast<double>(fake_scores.size());

    double stat = 0.0;
    if (mode == StatLossMode::kPatternScalar) {
        stat = std::fabs(batch_pattern_mean(fake_batch) - batch_pattern_mean(real_batch)) +
               std::fabs(batch_pattern_variance(fake_batch) - batch_pattern_variance(real_batch));
    } else {
        std::vector<double> fm, fv, rm, rv;
        hourly_mean_variance(fake_batch, fm, fv);
        hourly_mean_variance(real_batch, rm, rv);
        for (std::size_t t = 0; t < fm.size(); ++t) {
            stat += std::fabs(fm[t] - rm[t]) + std::fabs(fv[t] - rv[t]);
        }
    }
    return adv + lambda * stat;
}

GenGraphForward graph_generator_forward(Graph& g, const GeneratorNet& gen, Graph::Ref noise,
                                        bool trainable) {
    GenGraphForward fwd;
    fwd.refs = register_store(g, gen.params, gen.cfg.input, gen.cfg.hidden, gen.cfg.layers,
                              trainable);
    fwd.output = gen_output_with_refs(g, fwd.refs, gen.cfg.hidden, noise);
    return fwd;
}

DiscGraphForward graph_discriminator_forward(Graph& g, const DiscriminatorNet& disc,
                                             Graph::Ref profiles, bool trainable) {
    DiscGraphForward fwd;
    fwd.refs = register_store(g, disc.params, disc.cfg.input, disc.cfg.hidden, disc.cfg.layers,
                              trainable);
    fwd.scores = disc_scores_with_refs(g, fwd.refs, disc.cfg.hidden, profiles);
    return fwd;
}

Graph::Ref graph_disc_loss(Graph& g, Graph::Ref real_scores, Graph::Ref fake_scores) {
    Graph::Ref lr = g.log(g.clamp(real_scores, kProbClamp, 1.0 - kProbClamp));
    Graph::Ref lf =
        g.log(g.clamp(g.affine(fake_scores, -1.0, 1.0), kProbClamp, 1.0 - kProbClamp));
    return g.sub(g.affine(g.mean_all(lr), -1.0, 0.0), g.mean_all(lf));
}

Graph::Ref graph_gen_loss(Graph& g, Graph::Ref fake_scores, Graph::Ref fake_batch,
                          const Mat& real_batch, double lambda, StatLossMode mode,
                          bool non_saturating) {
    Graph::Ref adv =
        non_saturating
            ? g.affine(g.mean_all(g.log(g.clamp(fake_scores, kProbClamp, 1.0 - kProbClamp))),
                       -1.0, 0.0)
            : g.mean_all(g.log(
                  g.clamp(g.affine(fake_scores, -1.0, 1.0), kProbClamp, 1.0 - kProbClamp)));
    if (lambda == 0.0) return adv;

    Graph::Ref stat{};
    if (mode == StatLossMode::kPatternScalar) {
        Graph::Ref fake_mean = g.mean_all(fake_batch);
        Graph::Ref centered = g.sub_colvec(fake_batch, g.row_mean(fake_batch));
        Graph::Ref fake_var = g.mean_all(g.mul(centered, centered));
        Graph::Ref dm = g.abs(g.sub(fake_mean, g.scalar_constant(batch_pattern_mean(real_batch))));
        Graph::Ref dv =
            g.abs(g.sub(fake_var, g.scalar_constant(batch_pattern_variance(real_batch))));
        stat = g.add(dm, dv);
    } else {
        std::vector<double> rm, rv;
        hourly_mean_variance(real_batch, rm, rv);
        Graph::Ref fm = g.col_mean(fake_batch);
        Graph::Ref centered = g.add_rowvec(fake_batch, g.affine(fm, -1.0, 0.0));
        Graph::Ref fv = g.col_mean(g.mul(centered, centered));
        Graph::Ref dm = g.sum_all(g.abs(g.sub(fm, g.constant(1, rm.size(), rm))));
        Graph::Ref dv = g.sum_all(g.abs(g.sub(fv, g.constant(1, rv.size(), rv))));
        stat = g.add(dm, dv);
    }
    return g.add(adv, g.affine(stat, lambda, 0.0));
}

GanPair train_cluster_gan(const Dataset& cluster_data, const TrainConfig& config,
                          int cluster_index) {
    config.validate();
    if (cluster_data.empty()) throw DataError("train: empty cluster");
    const std::size_t n = cluster_data.size();
    const std::size_t batch = std::min(config.batch_size, n);
    const std::size_t steps = kHoursPerDay;

    NetConfig net_cfg{1, config.hidden, config.layers};
    Rng rng(config.seed);
    GanPair pair;
    pair.cluster_index = cluster_index;
    pair.config = config;
    pair.gen = make_generator(net_cfg, rng);
    pair.disc = make_discriminator(net_cfg, rng);
    pair.gen_opt = AdamState::init(pair.gen.params, AdamConfig{config.gen_lr, 0.9, 0.999, 1e-8});
    pair.disc_opt =
        AdamState::init(pair.disc.params, AdamConfig{config.disc_lr, 0.9, 0.999, 1e-8});

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    const auto check_finite = [&](double loss, const char* which, std::size_t epoch,
                                  std::size_t batch_no) {
        if (!std::isfinite(loss)) {
            throw NumericError(std::string("train: non-finite ") + which + " loss at epoch " +
                               std::to_string(epoch) + " batch " + std::to_string(batch_no));
        }
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_g = 0.0, epoch_d = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += batch, ++batches) {
            const std::size_t count = std::min(batch, n - start);
            const std::span<const std::size_t> idx(order.data() + start, count);
            Mat real = rows_to_mat(cluster_data, idx);

            // Discriminator step; the fake batch is evaluated first and fed
            // in as a constant (no gradient flows back into the generator).
            Mat noise = sample_noise(steps, count, rng);
            Mat fake;
            {
                Graph g;
                GenGraphForward fwd =
                    graph_generator_forward(g, pair.gen, g.constant(noise), false);
                fake = g.value(fwd.output);
            }
            double d_loss_value = 0.0;
            {
                Graph g;
                StoreRefs refs = register_store(g, pair.disc.params, pair.disc.cfg.input,
                                                pair.disc.cfg.hidden, pair.disc.cfg.layers, true);
                Graph::Ref real_scores =
                    disc_scores_with_refs(g, refs, pair.disc.cfg.hidden, g.constant(real));
                Graph::Ref fake_scores = disc_scores_with_refs(g, refs, pair.disc.cfg.hidden,
                                                               g.constant(std::move(fake)));
                Graph::Ref loss = graph_disc_loss(g, real_scores, fake_scores);
                d_loss_value = g.scalar(loss);
                check_finite(d_loss_value, "discriminator", epoch, batches);
                g.backward(loss);
                ParameterStore grads = collect_gradients(g, refs, pair.disc.params);
                adam_step(pair.disc.params, grads, pair.disc_opt);
            }

            // Generator step with fresh noise; discriminator parameters are
            // constants, gradient flows through its activations only.
            Mat gen_noise = sample_noise(steps, count, rng);
            double g_loss_value = 0.0;
            {
                Graph g;
                GenGraphForward gen_fwd =
                    graph_generator_forward(g, pair.gen, g.constant(gen_noise), true);
                DiscGraphForward disc_fwd =
                    graph_discriminator_forward(g, pair.disc, gen_fwd.output, false);
                Graph::Ref loss = graph_gen_loss(g, disc_fwd.scores, gen_fwd.output, real,
                                                 config.lambda, config.stat_mode,
                                                 config.non_saturating);
                g_loss_value = g.scalar(loss);
                check_finite(g_loss_value, "generator", epoch, batches);
                g.backward(loss);
                ParameterStore grads = collect_gradients(g, gen_fwd.refs, pair.gen.params);
                adam_step(pair.gen.params, grads, pair.gen_opt);
            }
            epoch_d += d_loss_value;
            epoch_g += g_loss_value;
        }
        pair.loss_history.emplace_back(epoch_g / static_cast<double>(batches),
                                       epoch_d / static_cast<double>(batches));
        pair.gen.params.require_finite("generator after epoch " + std::to_string(epoch));
        pair.disc.params.require_finite("discriminator after epoch " + std::to_string(epoch));
        if (config.log_every > 0 &&
            (epoch % config.log_every == 0 || epoch + 1 == config.epochs)) {
            std::fprintf(stderr, "%s epoch %zu g_loss %.6f d_loss %.6f\n",
                         config.log_prefix.c_str(), epoch,
                         pair.loss_history.back().first, pair.loss_history.back().second);
        }
    }
    return pair;
}

namespace {

void write_net_manifest(const NetConfig& cfg, std::size_t dense_inputs,
                        const ParameterStore& params, std::ostream& out) {
    out << "ergan-net-manifest v1\n";
    out << "gate_order ifgo\n";
    out << "input " << cfg.input << "\n";
    out << "hidden " << cfg.hidden << "\n";
    out << "layers " << cfg.layers << "\n";
    out << "dense_inputs " << dense_inputs << "\n";
    write_param_block(params, out);
}

struct NetManifest {
    NetConfig cfg;
    std::size_t dense_inputs = 0;
    ParameterStore params;
};

NetManifest read_net_manifest(std::istream& in) {
    std::string tok;
    auto expect = [&](const char* want) {
        if (!(in >> tok) || tok != want) {
            throw DataError(std::string("net manifest: expected '") + want + "'");
        }
    };
    expect("ergan-net-manifest");
    expect("v1");
    expect("gate_order");
    if (!(in >> tok) || tok != "ifgo") throw DataError("net manifest: unsupported gate order");
    NetManifest m;
    expect("input");
    if (!(in >> m.cfg.input)) throw DataError("net manifest: bad input size");
    expect("hidden");
    if (!(in >> m.cfg.hidden)) throw DataError("net manifest: bad hidden size");
    expect("layers");
    if (!(in >> m.cfg.layers)) throw DataError("net manifest: bad layer count");
    expect("dense_inputs");
    if (!(in >> m.dense_inputs)) throw DataError("net manifest: bad dense_inputs");
    m.params = read_param_block(in);
    return m;
}

const char* stat_mode_name(StatLossMode mode) {
    return mode == StatLossMode::kPatternScalar ? "pattern_scalar" : "hourly_vector";
}

StatLossMode stat_mode_from_name(const std::string& name) {
    if (name == "pattern_scalar") return StatLossMode::kPatternScalar;
    if (name == "hourly_vector") return StatLossMode::kHourlyVector;
    throw DataError("unknown stat mode '" + name + "'");
}

}  // namespace

void save_checkpoint(const GanPair& pair, std::ostream& out) {
    out << "ergan-gan-checkpoint v1\n";
    out << "cluster_index " << pair.cluster_index << "\n";
    const TrainConfig& c = pair.config;
    out << "config epochs " << c.epochs << " batch_size " << c.batch_size << " gen_lr "
        << format_g(c.gen_lr) << " disc_lr " << format_g(c.disc_lr) << " lambda "
        << format_g(c.lambda) << " seed " << c.seed << " hidden " << c.hidden << " layers "
        << c.layers << " non_saturating " << (c.non_saturating ? 1 : 0) << " stat_mode "
        << stat_mode_name(c.stat_mode) << "\n";
    out << "[generator]\n";
    write_net_manifest(pair.gen.cfg, 2 * pair.gen.cfg.hidden, pair.gen.params, out);
    out << "[generator_adam]\n";
    write_adam_state(pair.gen_opt, out);
    out << "[discriminator]\n";
    write_net_manifest(pair.disc.cfg, pair.disc.dense_inputs, pair.disc.params, out);
    out << "[discriminator_adam]\n";
    write_adam_state(pair.disc_opt, out);
    out << "end\n";
}

void save_checkpoint(const GanPair& pair, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    save_checkpoint(pair, f);
}

GanPair load_checkpoint(std::istream& in) {
    std::string tok;
    auto expect = [&](const char* want) {
        if (!(in >> tok) || tok != want) {
            throw DataError(std::string("checkpoint: expected '") + want + "' (corrupt or "
                            "truncated file)");
        }
    };
    auto read_double = [&](const char* what) {
        if (!(in >> tok)) throw DataError(std::string("checkpoint: bad ") + what);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
            throw DataError(std::string("checkpoint: bad ") + what);
        }
        return v;
    };
    expect("ergan-gan-checkpoint");
    expect("v1");
    GanPair pair;
    expect("cluster_index");
    if (!(in >> pair.cluster_index)) throw DataError("checkpoint: bad cluster index");
    expect("config");
    TrainConfig& c = pair.config;
    expect("epochs");
    in >> c.epochs;
    expect("batch_size");
    in >> c.batch_size;
    expect("gen_lr");
    c.gen_lr = read_double("gen_lr");
    expect("disc_lr");
    c.disc_lr = read_double("disc_lr");
    expect("lambda");
    c.lambda = read_double("lambda");
    expect("seed");
    in >> c.seed;
    expect("hidden");
    in >> c.hidden;
    expect("layers");
    in >> c.layers;
    expect("non_saturating");
    int ns = 0;
    in >> ns;
    c.non_saturating = ns != 0;
    expect("stat_mode");
    in >> tok;
    c.stat_mode = stat_mode_from_name(tok);
    if (!in) throw DataError("checkpoint: truncated config");
    c.validate();

    expect("[generator]");
    NetManifest gm = read_net_manifest(in);
    expect("[generator_adam]");
    AdamState ga = read_adam_state(in);
    expect("[discriminator]");
    NetManifest dm = read_net_manifest(in);
    expect("[discriminator_adam]");
    AdamState da = read_adam_state(in);
    expect("end");

    if (gm.cfg.hidden != c.hidden || gm.cfg.layers != c.layers || dm.cfg.hidden != c.hidden ||
        dm.cfg.layers != c.layers) {
        throw DataError("checkpoint: network sizes disagree with the config echo");
    }
    if (dm.dense_inputs != 2 * dm.cfg.hidden) {
        throw DataError("checkpoint: discriminator dense_inputs " +
                        std::to_string(dm.dense_inputs) + " is not 2*hidden");
    }
    pair.gen.cfg = gm.cfg;
    pair.gen.params = std::move(gm.params);
    pair.disc.cfg = dm.cfg;
    pair.disc.dense_inputs = dm.dense_inputs;
    pair.disc.params = std::move(dm.params);
    pair.gen_opt = std::move(ga);
    pair.disc_opt = std::move(da);

    // Shape validation: rebuilding cell views throws on any mismatch.
    layers_from_store(pair.gen.params, pair.gen.cfg.input, pair.gen.cfg.hidden,
                      pair.gen.cfg.layers);
    layers_from_store(pair.disc.params, pair.disc.cfg.input, pair.disc.cfg.hidden,
                      pair.disc.cfg.layers);
    if (!pair.gen_opt.m.congruent(pair.gen.params) ||
        !pair.disc_opt.m.congruent(pair.disc.params)) {
        throw DataError("checkpoint: optimizer state does not match parameters");
    }
    return pair;
}

GanPair load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read " + path);
    return load_checkpoint(f);
}

}  // namespace ergan
