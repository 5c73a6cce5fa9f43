#pragma once

#include <cstdint>
#include <iosfwd>

#include "ergan/params.hpp"

namespace ergan {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    std::uint64_t t = 0;
    ParameterStore m;  // first moments, mirrors the parameter store
    ParameterStore v;  // second moments

    static AdamState init(const ParameterStore& params, AdamConfig cfg);
};

// Standard Adam update with bias correction (epsilon added after the square
// root). Increments state.t. Throws DataError on a grads/params mismatch.
void adam_step(ParameterStore& params, const ParameterStore& grads, AdamState& state);

void write_adam_state(const AdamState& state, std::ostream& out);
AdamState read_adam_state(std::istream& in);

}  // namespace ergan
