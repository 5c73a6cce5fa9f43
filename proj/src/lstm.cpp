#include "ergan/lstm.hpp"

#include <cmath>
#include <string>

#include "ergan/errors.hpp"

namespace ergan {

namespace {

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite input");
    }
}

std::string cell_key(std::size_t layer, bool forward, const char* field) {
    return "lstm." + std::to_string(layer) + (forward ? ".fw." : ".bw.") + field;
}

}  // namespace

void LstmCellParams::validate() const {
    const std::size_t h = hidden();
    if (h == 0 || W.rows != 4 * h || U.rows != 4 * h || b.size() != 4 * h) {
        throw DataError("lstm cell: inconsistent shapes");
    }
}

std::pair<std::vector<double>, std::vector<double>> lstm_cell_forward(
    std::span<const double> x, std::span<const double> h_prev,
    std::span<const double> c_prev, const LstmCellParams& params) {
    params.validate();
    const std::size_t h = params.hidden();
    const std::size_t in = params.input();
    if (x.size() != in || h_prev.size() != h || c_prev.size() != h) {
        throw DataError("lstm cell: input size mismatch");
    }
    check_finite(x, "lstm cell");
    check_finite(h_prev, "lstm cell");
    check_finite(c_prev, "lstm cell");

    std::vector<double> gates(params.b.begin(), params.b.end());
    for (std::size_t r = 0; r < 4 * h; ++r) {
        const double* wr = params.W.row(r);
        double s = 0.0;
        for (std::size_t i = 0; i < in; ++i) s += wr[i] * x[i];
        const double* ur = params.U.row(r);
        for (std::size_t i = 0; i < h; ++i) s += ur[i] * h_prev[i];
        gates[r] += s;
    }
    std::vector<double> h_next(h), c_next(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double gi = stable_sigmoid(gates[i]);
        const double gf = stable_sigmoid(gates[h + i]);
        const double gg = std::tanh(gates[2 * h + i]);
        const double go = stable_sigmoid(gates[3 * h + i]);
        c_next[i] = gf * c_prev[i] + gi * gg;
        h_next[i] = go * std::tanh(c_next[i]);
    }
    return {std::move(h_next), std::move(c_next)};
}

BiLstmOutput bilstm_forward(const Mat& sequence, std::span<const LstmLayerParams> layers) {
    if (sequence.rows == 0) throw DataError("bilstm: empty sequence");
    if (layers.empty()) throw DataError("bilstm: no layers");
    const std::size_t steps = sequence.rows;
    const std::size_t h = layers[0].fw.hidden();

    Mat inputs = sequence;  // T x I, replaced by T x 2H after each layer
    Mat fw_h(steps, h), bw_h(steps, h);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LstmCellParams& fw = layers[l].fw;
        const LstmCellParams& bw = layers[l].bw;
        if (fw.input() != inputs.cols || bw.input() != inputs.cols) {
            throw DataError("bilstm: layer " + std::to_string(l) + " expects input width " +
                            std::to_string(fw.input()) + ", got " + std::to_string(inputs.cols));
        }
        std::vector<double> hs(h, 0.0), cs(h, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
            auto [hn, cn] = lstm_cell_forward(
                std::span<const double>(inputs.row(t), inputs.cols), hs, cs, fw);
            hs = std::move(hn);
            cs = std::move(cn);
            std::copy(hs.begin(), hs.end(), fw_h.row(t));
        }
        hs.assign(h, 0.0);
        cs.assign(h, 0.0);
        for (std::size_t t = steps; t-- > 0;) {
            auto [hn, cn] = lstm_cell_forward(
                std::span<const double>(inputs.row(t), inputs.cols), hs, cs, bw);
            hs = std::move(hn);
            cs = std::move(cn);
            std::copy(hs.begin(), hs.end(), bw_h.row(t));
        }
        Mat next(steps, 2 * h);
        for (std::size_t t = 0; t < steps; ++t) {
            std::copy(fw_h.row(t), fw_h.row(t) + h, next.row(t));
            std::copy(bw_h.row(t), bw_h.row(t) + h, next.row(t) + h);
        }
        inputs = std::move(next);
    }
    BiLstmOutput out;
    out.per_step = std::move(inputs);
    out.final_forward.assign(fw_h.row(steps - 1), fw_h.row(steps - 1) + h);
    out.final_backward.assign(bw_h.row(0), bw_h.row(0) + h);
    return out;
}

std::vector<double> dense(std::span<const double> input, const Mat& weights,
                          std::span<const double> bias) {
    if (weights.cols != input.size() || weights.rows != bias.size()) {
        throw DataError("dense: shape mismatch");
    }
    std::vector<double> out(bias.begin(), bias.end());
    for (std::size_t r = 0; r < weights.rows; ++r) {
        const double* wr = weights.row(r);
        double s = 0.0;
        for (std::size_t i = 0; i < input.size(); ++i) s += wr[i] * input[i];
        out[r] += s;
    }
    return out;
}

Mat sample_noise(std::size_t steps, std::size_t batch, Rng& rng) {
    if (steps == 0 || batch == 0) throw DataError("sample_noise: zero dimension");
    Mat z(batch, steps);
    for (double& v : z.a) v = rng.gaussian();
    return z;
}

void init_bilstm_params(ParameterStore& store, std::size_t input, std::size_t hidden,
                        std::size_t layers, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input : 2 * hidden;
        for (bool forward : {true, false}) {
            auto& w = store.add(cell_key(l, forward, "W"), {4 * hidden, in});
            for (double& v : w) v = rng.uniform(-bound, bound);
            auto& u = store.add(cell_key(l, forward, "U"), {4 * hidden, hidden});
            for (double& v : u) v = rng.uniform(-bound, bound);
            auto& b = store.add(cell_key(l, forward, "b"), {4 * hidden});
            for (std::size_t i = hidden; i < 2 * hidden; ++i) b[i] = 1.0;  // forget gate
        }
    }
}

void init_dense_params(ParameterStore& store, std::size_t fan_in, std::size_t fan_out,
                       std::size_t hidden, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    auto& w = store.add("out.W", {fan_out, fan_in});
    for (double& v : w) v = rng.uniform(-bound, bound);
    store.add("out.b", {fan_out});
}

std::vector<LstmLayerParams> layers_from_store(const ParameterStore& store, std::size_t input,
                                               std::size_t hidden, std::size_t layers) {
    std::vector<LstmLayerParams> out(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input : 2 * hidden;
        for (bool forward : {true, false}) {
            LstmCellParams& cell = forward ? out[l].fw : out[l].bw;
            const auto& w = store.entry(cell_key(l, forward, "W"));
            const auto& u = store.entry(cell_key(l, forward, "U"));
            const auto& b = store.entry(cell_key(l, forward, "b"));
            if (w.shape != std::vector<std::size_t>{4 * hidden, in} ||
                u.shape != std::vector<std::size_t>{4 * hidden, hidden} ||
                b.shape != std::vector<std::size_t>{4 * hidden}) {
                throw DataError("store entry '" + w.name + "': shape mismatch for layer " +
                                std::to_string(l));
            }
            cell.W = Mat(4 * hidden, in);
            cell.W.a = w.values;
            cell.U = Mat(4 * hidden, hidden);
            cell.U.a = u.values;
            cell.b = b.values;
        }
    }
    return out;
}

StoreRefs register_store(Graph& g, const ParameterStore& store, std::size_t input,
                         std::size_t hidden, std::size_t layers, bool trainable) {
    StoreRefs refs;
    auto reg = [&](const std::string& name, std::size_t rows, std::size_t cols) {
        const auto& e = store.entry(name);
        if (e.size() != rows * cols) {
            throw DataError("store entry '" + name + "': expected " + std::to_string(rows) + "x" +
                            std::to_string(cols));
        }
        Graph::Ref r = trainable ? g.leaf(rows, cols, e.values) : g.constant(rows, cols, e.values);
        refs.named.emplace_back(name, r);
        return r;
    };
    refs.layers.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input : 2 * hidden;
        for (bool forward : {true, false}) {
            GraphCellRefs& cell = forward ? refs.layers[l].fw : refs.layers[l].bw;
            cell.W = reg(cell_key(l, forward, "W"), 4 * hidden, in);
            cell.U = reg(cell_key(l, forward, "U"), 4 * hidden, hidden);
            cell.b = reg(cell_key(l, forward, "b"), 1, 4 * hidden);
        }
    }
    const auto& out_w = store.entry("out.W");
    refs.out_w = reg("out.W", out_w.shape[0], out_w.shape[1]);
    refs.out_b = reg("out.b", 1, store.entry("out.b").size());
    return refs;
}

std::pair<Graph::Ref, Graph::Ref> graph_lstm_cell(Graph& g, Graph::Ref x, Graph::Ref h,
                                                  Graph::Ref c, const GraphCellRefs& p,
                                                  std::size_t hidden) {
    Graph::Ref gates = g.add_rowvec(g.add(g.linear(x, p.W), g.linear(h, p.U)), p.b);
    Graph::Ref gi = g.sigmoid(g.slice_cols(gates, 0, hidden));
    Graph::Ref gf = g.sigmoid(g.slice_cols(gates, hidden, 2 * hidden));
    Graph::Ref gg = g.tanh(g.slice_cols(gates, 2 * hidden, 3 * hidden));
    Graph::Ref go = g.sigmoid(g.slice_cols(gates, 3 * hidden, 4 * hidden));
    Graph::Ref c_next = g.add(g.mul(gf, c), g.mul(gi, gg));
    Graph::Ref h_next = g.mul(go, g.tanh(c_next));
    return {h_next, c_next};
}

GraphBiLstmOutput graph_bilstm(Graph& g, std::span<const Graph::Ref> x_steps,
                               std::span<const GraphLayerRefs> layers, std::size_t hidden) {
    if (x_steps.empty()) throw DataError("graph bilstm: empty sequence");
    const std::size_t steps = x_steps.size();
    const std::size_t batch = x_steps[0].rows;

    std::vector<Graph::Ref> inputs(x_steps.begin(), x_steps.end());
    std::vector<Graph::Ref> fw_h(steps), bw_h(steps);
    for (const GraphLayerRefs& layer : layers) {
        Graph::Ref h = g.constant(Mat(batch, hidden));
        Graph::Ref c = h;
        for (std::size_t t = 0; t < steps; ++t) {
            auto [hn, cn] = graph_lstm_cell(g, inputs[t], h, c, layer.fw, hidden);
            h = hn;
            c = cn;
            fw_h[t] = h;
        }
        h = g.constant(Mat(batch, hidden));
        c = h;
        for (std::size_t t = steps; t-- > 0;) {
            auto [hn, cn] = graph_lstm_cell(g, inputs[t], h, c, layer.bw, hidden);
            h = hn;
            c = cn;
            bw_h[t] = h;
        }
        for (std::size_t t = 0; t < steps; ++t) {
            const Graph::Ref parts[2] = {fw_h[t], bw_h[t]};
            inputs[t] = g.concat_cols(parts);
        }
    }
    GraphBiLstmOutput out;
    out.per_step = std::move(inputs);
    out.final_forward = fw_h[steps - 1];
    out.final_backward = bw_h[0];
    return out;
}

ParameterStore collect_gradients(const Graph& g, const StoreRefs& refs,
                                 const ParameterStore& like) {
    ParameterStore grads = ParameterStore::zeros_like(like);
    for (const auto& [name, ref] : refs.named) {
        const Mat& gm = g.gradient(ref);
        auto& e = grads.entry(name);
        std::copy(gm.a.begin(), gm.a.end(), e.values.begin());
    }
    return grads;
}

}  // namespace ergan
