#include "ergan/adam.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "ergan/errors.hpp"

namespace ergan {

AdamState AdamState::init(const ParameterStore& params, AdamConfig cfg) {
    AdamState s;
    s.cfg = cfg;
    s.m = ParameterStore::zeros_like(params);
    s.v = ParameterStore::zeros_like(params);
    return s;
}

void adam_step(ParameterStore& params, const ParameterStore& grads, AdamState& state) {
    if (!params.congruent(grads) || !params.congruent(state.m)) {
        throw DataError("adam_step: parameter/gradient/state layouts differ");
    }
    state.t += 1;
    const double b1 = state.cfg.beta1;
    const double b2 = state.cfg.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    auto pe = params.entries();
    auto ge = grads.entries();
    auto me = state.m.entries();
    auto ve = state.v.entries();
    for (std::size_t e = 0; e < pe.size(); ++e) {
        double* p = pe[e].values.data();
        const double* g = ge[e].values.data();
        double* m = me[e].values.data();
        double* v = ve[e].values.data();
        const std::size_t n = pe[e].values.size();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double m_hat = m[i] / corr1;
            const double v_hat = v[i] / corr2;
            p[i] -= state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.eps);
        }
    }
}

void write_adam_state(const AdamState& state, std::ostream& out) {
    char buf[48];
    out << "adam t " << state.t;
    for (double v : {state.cfg.lr, state.cfg.beta1, state.cfg.beta2, state.cfg.eps}) {
        std::snprintf(buf, sizeof(buf), "%a", v);
        out << " " << buf;
    }
    out << "\n";
    write_param_block(state.m, out);
    write_param_block(state.v, out);
}

AdamState read_adam_state(std::istream& in) {
    std::string tok;
    if (!(in >> tok) || tok != "adam") throw DataError("adam state: expected 'adam'");
    if (!(in >> tok) || tok != "t") throw DataError("adam state: expected 't'");
    AdamState s;
    if (!(in >> s.t)) throw DataError("adam state: bad step counter");
    for (double* v : {&s.cfg.lr, &s.cfg.beta1, &s.cfg.beta2, &s.cfg.eps}) {
        if (!(in >> tok)) throw DataError("adam state: truncated hyperparameters");
        char* end = nullptr;
        *v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw DataError("adam state: bad hyperparameter");
    }
    s.m = read_param_block(in);
    s.v = read_param_block(in);
    if (!s.m.congruent(s.v)) throw DataError("adam state: moment layouts differ");
    return s;
}

}  // namespace ergan
