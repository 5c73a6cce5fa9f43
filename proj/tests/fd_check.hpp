#pragma once

#include <cmath>
#include <functional>

#include "ergan/params.hpp"

namespace ergan::test {

// Central finite-difference gradient check. loss_value re-evaluates the loss
// for perturbed parameters; analytic is the reverse-mode gradient under test.
struct FdReport {
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    std::size_t checked = 0;
};

inline FdReport finite_difference_check(
    const std::function<double(const ParameterStore&)>& loss_value,
    const ParameterStore& params, const ParameterStore& analytic, double step = 1e-5) {
    FdReport report;
    ParameterStore work = params;
    for (std::size_t e = 0; e < params.entries().size(); ++e) {
        const auto& base = params.entries()[e].values;
        auto& values = work.entries()[e].values;
        const auto& grad = analytic.entries()[e].values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = base[i] + step;
            const double up = loss_value(work);
            values[i] = base[i] - step;
            const double down = loss_value(work);
            values[i] = base[i];
            const double fd = (up - down) / (2.0 * step);
            const double abs_err = std::fabs(fd - grad[i]);
            const double scale = std::max({std::fabs(fd), std::fabs(grad[i]), 1e-5});
            report.max_abs_err = std::max(report.max_abs_err, abs_err);
            report.max_rel_err = std::max(report.max_rel_err, abs_err / scale);
            ++report.checked;
        }
    }
    return report;
}

}  // namespace ergan::test
