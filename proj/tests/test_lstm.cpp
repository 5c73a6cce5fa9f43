#include <cmath>
#include <vector>

#include "doctest.h"
#include "ergan/errors.hpp"
#include "ergan/lstm.hpp"
#include "ergan/rng.hpp"

using namespace ergan;

namespace {

LstmCellParams tiny_cell(double wi, double wf, double wg, double wo, double ui, double uf,
                         double ug, double uo, double bi, double bf, double bg, double bo) {
    LstmCellParams cell;
    cell.W = Mat(4, 1);
    cell.W.a = {wi, wf, wg, wo};
    cell.U = Mat(4, 1);
    cell.U.a = {ui, uf, ug, uo};
    cell.b = {bi, bf, bg, bo};
    return cell;
}

std::vector<LstmLayerParams> random_layers(std::size_t input, std::size_t hidden,
                                           std::size_t layers, std::uint64_t seed) {
    ParameterStore store;
    Rng rng(seed);
    init_bilstm_params(store, input, hidden, layers, rng);
    return layers_from_store(store, input, hidden, layers);
}

}  // namespace

TEST_CASE("all-zero weights give a zero hidden state") {
    LstmCellParams cell = tiny_cell(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
    const double x[1] = {3.7}, h[1] = {0.4}, c[1] = {-0.2};
    auto [hn, cn] = lstm_cell_forward(x, h, c, cell);
    // c' = sigmoid(0)*c + sigmoid(0)*tanh(0) = c/2; h' = sigmoid(0)*tanh(c/2)
    CHECK(cn[0] == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(hn[0] == doctest::Approx(0.5 * std::tanh(-0.1)).epsilon(1e-15));
    const double z[1] = {0.0};
    auto [h0, c0] = lstm_cell_forward(x, z, z, cell);
    CHECK(h0[0] == 0.0);
    CHECK(c0[0] == 0.0);
}

TEST_CASE("hand-executed tiny gate computation") {
    LstmCellParams cell =
        tiny_cell(0.5, -0.3, 0.8, 0.2, 0.1, 0.4, -0.6, 0.7, 0.05, 1.0, -0.1, 0.3);
    const double x = 0.9, h_prev = -0.25, c_prev = 0.6;
    const double gi = stable_sigmoid(0.5 * x + 0.1 * h_prev + 0.05);
    const double gf = stable_sigmoid(-0.3 * x + 0.4 * h_prev + 1.0);
    const double gg = std::tanh(0.8 * x + -0.6 * h_prev + -0.1);
    const double go = stable_sigmoid(0.2 * x + 0.7 * h_prev + 0.3);
    const double c_expect = gf * c_prev + gi * gg;
    const double h_expect = go * std::tanh(c_expect);
    const double xs[1] = {x}, hs[1] = {h_prev}, cs[1] = {c_prev};
    auto [hn, cn] = lstm_cell_forward(xs, hs, cs, cell);
    CHECK(cn[0] == doctest::Approx(c_expect).epsilon(1e-15));
    CHECK(hn[0] == doctest::Approx(h_expect).epsilon(1e-15));
}

TEST_CASE("two sequential cell calls compose the recurrence") {
    auto layers = random_layers(1, 3, 1, 5);
    const LstmCellParams& cell = layers[0].fw;
    std::vector<double> h(3, 0.0), c(3, 0.0);
    const double x1[1] = {0.7}, x2[1] = {-1.1};
    auto [h1, c1] = lstm_cell_forward(x1, h, c, cell);
    auto [h2, c2] = lstm_cell_forward(x2, h1, c1, cell);

    Mat seq(2, 1);
    seq.a = {0.7, -1.1};
    auto out = bilstm_forward(seq, layers);
    CHECK(out.final_forward == h2);
}

TEST_CASE("lstm cell validates shapes and rejects non-finite input") {
    auto layers = random_layers(2, 3, 1, 6);
    std::vector<double> x = {0.1, 0.2}, h(3, 0.0), c(3, 0.0);
    auto ok = lstm_cell_forward(x, h, c, layers[0].fw);
    CHECK(ok.first.size() == 3);
    std::vector<double> bad_x = {0.1};
    CHECK_THROWS_AS(lstm_cell_forward(bad_x, h, c, layers[0].fw), DataError);
    std::vector<double> nan_x = {std::nan(""), 0.0};
    CHECK_THROWS_AS(lstm_cell_forward(nan_x, h, c, layers[0].fw), NumericError);
}

TEST_CASE("single-step bilstm has mirror-symmetric directions") {
    auto layers = random_layers(1, 4, 1, 7);
    layers[0].bw = layers[0].fw;  // same cell both directions
    Mat seq(1, 1);
    seq.a = {0.42};
    auto out = bilstm_forward(seq, layers);
    REQUIRE(out.per_step.rows == 1);
    REQUIRE(out.per_step.cols == 8);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(out.per_step(0, i) == out.per_step(0, 4 + i));
    }
    CHECK(out.final_forward == out.final_backward);
}

TEST_CASE("reversing the input swaps forward and backward roles") {
    auto layers = random_layers(1, 3, 1, 8);
    layers[0].bw = layers[0].fw;  // mirrored parameters
    const std::size_t steps = 6;
    Mat seq(steps, 1), rev(steps, 1);
    Rng rng(9);
    for (std::size_t t = 0; t < steps; ++t) seq.a[t] = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < steps; ++t) rev.a[t] = seq.a[steps - 1 - t];
    auto orig = bilstm_forward(seq, layers);
    auto flipped = bilstm_forward(rev, layers);
    const std::size_t h = 3;
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < h; ++i) {
            // forward states of the reversed input = backward states of the
            // original, read in reverse order
            CHECK(flipped.per_step(t, i) ==
                  doctest::Approx(orig.per_step(steps - 1 - t, h + i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("five stacked bidirectional layers produce 24x32 per-step output") {
    auto layers = random_layers(1, 16, 5, 10);
    Mat seq(24, 1);
    Rng rng(10);
    for (double& v : seq.a) v = rng.gaussian();
    auto out = bilstm_forward(seq, layers);
    CHECK(out.per_step.rows == 24);
    CHECK(out.per_step.cols == 32);
    CHECK(out.final_forward.size() == 16);
    CHECK(out.final_backward.size() == 16);
}

TEST_CASE("bilstm rejects an empty sequence") {
    auto layers = random_layers(1, 2, 1, 11);
    CHECK_THROWS_AS(bilstm_forward(Mat(0, 1), layers), DataError);
}

TEST_CASE("extreme-magnitude inputs stay finite through the recurrence") {
    auto layers = random_layers(1, 4, 2, 12);
    Mat seq(8, 1);
    seq.a = {50.0, -50.0, 25.0, -25.0, 50.0, 0.0, -50.0, 10.0};
    auto out = bilstm_forward(seq, layers);
    for (std::size_t t = 0; t < 8; ++t) {
        for (std::size_t j = 0; j < out.per_step.cols; ++j) {
            CHECK(std::isfinite(out.per_step(t, j)));
        }
    }
}

TEST_CASE("dense: identity, pure bias and a 1x2 arithmetic case") {
    Mat eye(3, 3);
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
    std::vector<double> x = {0.3, -0.7, 2.0}, zero3(3, 0.0);
    CHECK(dense(x, eye, zero3) == x);

    Mat zeros(3, 3);
    std::vector<double> b = {1.0, 2.0, 3.0};
    CHECK(dense(x, zeros, b) == b);

    Mat w(1, 2);
    w.a = {1.0, 2.0};
    std::vector<double> in = {3.0, 4.0}, bias = {5.0};
    CHECK(dense(in, w, bias) == std::vector<double>{16.0});

    std::vector<double> wrong = {1.0};
    CHECK_THROWS_AS(dense(wrong, w, bias), DataError);
}

TEST_CASE("sample_noise: shape, determinism and moments") {
    Rng a(12), b(12);
    Mat z1 = sample_noise(24, 4, a);
    Mat z2 = sample_noise(24, 4, b);
    CHECK(z1.rows == 4);
    CHECK(z1.cols == 24);
    CHECK(z1.a == z2.a);

    Rng big(13);
    Mat z = sample_noise(100, 1000, big);  // 1e5 draws
    double sum = 0.0, sum2 = 0.0;
    for (double v : z.a) {
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / z.a.size();
    const double var = sum2 / z.a.size() - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(var > 0.97);
    CHECK(var < 1.03);
    CHECK_THROWS_AS(sample_noise(0, 1, big), DataError);
}

TEST_CASE("weight init: bounds and forget-gate bias") {
    ParameterStore store;
    Rng rng(14);
    init_bilstm_params(store, 1, 4, 2, rng);
    const double bound = 0.5;  // 1/sqrt(4)
    for (const auto& e : store.entries()) {
        if (e.name.ends_with(".b")) {
            for (std::size_t i = 0; i < 4; ++i) CHECK(e.values[i] == 0.0);
            for (std::size_t i = 4; i < 8; ++i) CHECK(e.values[i] == 1.0);  // forget slice
            for (std::size_t i = 8; i < 16; ++i) CHECK(e.values[i] == 0.0);
        } else {
            for (double v : e.values) {
                CHECK(v >= -bound);
                CHECK(v <= bound);
            }
        }
    }
}

TEST_CASE("graph bilstm agrees with the plain forward") {
    const std::size_t hidden = 3, layer_count = 2, steps = 5;
    ParameterStore store;
    Rng rng(15);
    init_bilstm_params(store, 1, hidden, layer_count, rng);
    auto layers = layers_from_store(store, 1, hidden, layer_count);

    Mat seq(steps, 1);
    for (double& v : seq.a) v = rng.gaussian();
    auto plain = bilstm_forward(seq, layers);

    Graph g;
    StoreRefs refs;
    // register only the lstm entries (no dense head in this store)
    Rng dummy(0);
    ParameterStore with_head = store;
    init_dense_params(with_head, 2 * hidden, 1, hidden, dummy);
    refs = register_store(g, with_head, 1, hidden, layer_count, false);
    Mat noise_row(1, steps);
    for (std::size_t t = 0; t < steps; ++t) noise_row.a[t] = seq.a[t];
    auto noise = g.constant(noise_row);
    std::vector<Graph::Ref> x_steps(steps);
    for (std::size_t t = 0; t < steps; ++t) x_steps[t] = g.slice_cols(noise, t, t + 1);
    auto out = graph_bilstm(g, x_steps, refs.layers, hidden);
    for (std::size_t t = 0; t < steps; ++t) {
        const Mat& row = g.value(out.per_step[t]);
        for (std::size_t j = 0; j < 2 * hidden; ++j) {
            CHECK(row.a[j] == doctest::Approx(plain.per_step(t, j)).epsilon(1e-14));
        }
    }
    const Mat& ff = g.value(out.final_forward);
    for (std::size_t i = 0; i < hidden; ++i) {
        CHECK(ff.a[i] == doctest::Approx(plain.final_forward[i]).epsilon(1e-14));
    }
}
