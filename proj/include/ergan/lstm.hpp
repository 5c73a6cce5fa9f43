#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ergan/graph.hpp"
#include "ergan/params.hpp"
#include "ergan/rng.hpp"

namespace ergan {

// One LSTM cell's weights. Gate order is fixed as (input, forget, cell,
// output): rows [0,H) of W/U and entries [0,H) of b belong to the input
// gate, and so on. Checkpoints record this order.
struct LstmCellParams {
    Mat W;                  // 4H x I
    Mat U;                  // 4H x H
    std::vector<double> b;  // 4H

    std::size_t hidden() const { return U.cols; }
    std::size_t input() const { return W.cols; }
    void validate() const;  // throws DataError on inconsistent shapes
};

struct LstmLayerParams {
    LstmCellParams fw;
    LstmCellParams bw;
};

// Standard gate equations; sigmoid gates, tanh candidate and output
// transform. Throws NumericError on non-finite inputs.
std::pair<std::vector<double>, std::vector<double>> lstm_cell_forward(
    std::span<const double> x, std::span<const double> h_prev,
    std::span<const double> c_prev, const LstmCellParams& params);

struct BiLstmOutput {
    Mat per_step;                       // T x 2H, rows [fw_h_t, bw_h_t] of the last layer
    std::vector<double> final_forward;  // fw_h_T of the last layer
    std::vector<double> final_backward; // bw_h_1 of the last layer
};

// Stacked bidirectional LSTM with zero initial states. Layer 1 consumes the
// input sequence; every deeper layer consumes the previous layer's
// concatenated per-step outputs (input size 2H).
BiLstmOutput bilstm_forward(const Mat& sequence, std::span<const LstmLayerParams> layers);

// weights * input + bias.
std::vector<double> dense(std::span<const double> input, const Mat& weights,
                          std::span<const double> bias);

// i.i.d. standard normal noise, batch x T (scalar noise per timestep).
Mat sample_noise(std::size_t steps, std::size_t batch, Rng& rng);

// --- parameter store layout -------------------------------------------------
// Per layer l and direction d in {fw, bw}: "lstm.<l>.<d>.W", ".U", ".b";
// output head: "out.W" (rows x fan-in), "out.b".

// Adds freshly initialized Bi-LSTM weights to a store: W, U uniform in
// [-1/sqrt(H), 1/sqrt(H)], biases zero except the forget gate slice at 1.
void init_bilstm_params(ParameterStore& store, std::size_t input, std::size_t hidden,
                        std::size_t layers, Rng& rng);
void init_dense_params(ParameterStore& store, std::size_t fan_in, std::size_t fan_out,
                       std::size_t hidden, Rng& rng);

// Materializes cell weights from a store laid out as above.
std::vector<LstmLayerParams> layers_from_store(const ParameterStore& store, std::size_t input,
                                               std::size_t hidden, std::size_t layers);

// --- graph builders ----------------------------------------------------------
// Mirror the plain forward on an autodiff Graph, batched over rows.

struct GraphCellRefs {
    Graph::Ref W, U, b;
};
struct GraphLayerRefs {
    GraphCellRefs fw, bw;
};

// Registers every Bi-LSTM + dense entry of a store on the graph, as
// differentiable leaves when trainable, otherwise as constants. Also returns
// name->ref pairs for gradient collection.
struct StoreRefs {
    std::vector<GraphLayerRefs> layers;
    Graph::Ref out_w, out_b;
    std::vector<std::pair<std::string, Graph::Ref>> named;
};
StoreRefs register_store(Graph& g, const ParameterStore& store, std::size_t input,
                         std::size_t hidden, std::size_t layers, bool trainable);

// One batched cell step: x is B x I, h/c are B x H.
std::pair<Graph::Ref, Graph::Ref> graph_lstm_cell(Graph& g, Graph::Ref x, Graph::Ref h,
                                                  Graph::Ref c, const GraphCellRefs& p,
                                                  std::size_t hidden);

struct GraphBiLstmOutput {
    std::vector<Graph::Ref> per_step;  // T refs, each B x 2H
    Graph::Ref final_forward;          // B x H
    Graph::Ref final_backward;         // B x H
};
GraphBiLstmOutput graph_bilstm(Graph& g, std::span<const Graph::Ref> x_steps,
                               std::span<const GraphLayerRefs> layers, std::size_t hidden);

// Collects leaf gradients into a store congruent with the registered one.
ParameterStore collect_gradients(const Graph& g, const StoreRefs& refs,
                                 const ParameterStore& like);

}  // namespace ergan
