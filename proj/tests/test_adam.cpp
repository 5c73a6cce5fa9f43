#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ergan/adam.hpp"
#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

using namespace ergan;

TEST_CASE("zero gradient leaves parameters unchanged but advances t") {
    ParameterStore params;
    params.add("w", {2, 2}, 0.7);
    ParameterStore grads = ParameterStore::zeros_like(params);
    AdamState state = AdamState::init(params, AdamConfig{0.1, 0.9, 0.999, 1e-8});
    adam_step(params, grads, state);
    CHECK(state.t == 1);
    for (double v : params.entry("w").values) CHECK(v == 0.7);
}

TEST_CASE("single-step bias-corrected update on a scalar") {
    ParameterStore params;
    params.add("w", {1}, 0.0);
    ParameterStore grads = ParameterStore::zeros_like(params);
    grads.entry("w").values[0] = 1.0;
    AdamState state = AdamState::init(params, AdamConfig{0.1, 0.9, 0.999, 1e-8});
    adam_step(params, grads, state);
    // m_hat = 1, v_hat = 1 -> update = -lr * 1 / (1 + eps)
    const double expect = -0.1 / (1.0 + 1e-8);
    CHECK(params.entry("w").values[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(params.entry("w").values[0] == doctest::Approx(-0.0999999990).epsilon(1e-9));
}

TEST_CASE("two identical runs produce bit-identical trajectories") {
    auto run = [] {
        ParameterStore params;
        params.add("w", {8}, 0.5);
        AdamState state = AdamState::init(params, AdamConfig{0.01, 0.9, 0.999, 1e-8});
        Rng rng(77);
        for (int step = 0; step < 50; ++step) {
            ParameterStore grads = ParameterStore::zeros_like(params);
            for (auto& v : grads.entry("w").values) v = rng.gaussian();
            adam_step(params, grads, state);
        }
        return params.entry("w").values;
    };
    CHECK(run() == run());
}

TEST_CASE("adam converges on a simple quadratic") {
    ParameterStore params;
    params.add("w", {1}, 4.0);
    AdamState state = AdamState::init(params, AdamConfig{0.05, 0.9, 0.999, 1e-8});
    for (int step = 0; step < 2000; ++step) {
        ParameterStore grads = ParameterStore::zeros_like(params);
        grads.entry("w").values[0] = 2.0 * params.entry("w").values[0];  // d/dw w^2
        adam_step(params, grads, state);
    }
    CHECK(std::fabs(params.entry("w").values[0]) < 1e-3);
}

TEST_CASE("adam rejects mismatched layouts") {
    ParameterStore params;
    params.add("w", {2});
    ParameterStore other;
    other.add("w", {3});
    AdamState state = AdamState::init(params, AdamConfig{});
    CHECK_THROWS_AS(adam_step(params, other, state), DataError);
}

TEST_CASE("adam state round-trips through text") {
    ParameterStore params;
    params.add("w", {3}, 0.25);
    AdamState state = AdamState::init(params, AdamConfig{0.004, 0.85, 0.95, 1e-7});
    ParameterStore grads = ParameterStore::zeros_like(params);
    grads.entry("w").values = {0.1, -0.2, 0.3};
    adam_step(params, grads, state);
    std::ostringstream out;
    write_adam_state(state, out);
    std::istringstream in(out.str());
    AdamState back = read_adam_state(in);
    CHECK(back.t == state.t);
    CHECK(back.cfg.lr == state.cfg.lr);
    CHECK(back.cfg.beta1 == state.cfg.beta1);
    CHECK(back.m == state.m);
    CHECK(back.v == state.v);
}

TEST_CASE("parameter store basics and hex round-trip") {
    ParameterStore store;
    auto& w = store.add("layer.W", {2, 3});
    Rng rng(5);
    for (auto& v : w) v = rng.gaussian() * 1e-7;
    store.add("layer.b", {3}, -0.125);
    CHECK_THROWS_AS(store.add("layer.W", {1}), DataError);
    CHECK_THROWS_AS(store.entry("missing"), DataError);
    CHECK(store.total_size() == 9);

    std::ostringstream out;
    write_param_block(store, out);
    std::istringstream in(out.str());
    ParameterStore back = read_param_block(in);
    CHECK(back == store);  // bit-exact via %a encoding

    std::istringstream truncated(out.str().substr(0, out.str().size() - 10));
    CHECK_THROWS_AS(read_param_block(truncated), DataError);

    store.entry("layer.b").values[0] = std::nan("");
    CHECK_THROWS_AS(store.require_finite("test"), NumericError);
}
