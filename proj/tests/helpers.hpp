#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "ergan/dataset.hpp"

namespace ergan::test {

// A profile whose 24 values repeat a short pattern (handy for tiny fixtures).
inline LoadProfile profile_cycle(std::initializer_list<double> pattern,
                                 std::string source_id = "p") {
    LoadProfile p;
    p.source_id = std::move(source_id);
    std::vector<double> pat(pattern);
    for (std::size_t t = 0; t < kHoursPerDay; ++t) p.values[t] = pat[t % pat.size()];
    return p;
}

inline LoadProfile profile_const(double value, std::string source_id = "p") {
    return profile_cycle({value}, std::move(source_id));
}

inline Dataset dataset_of(std::initializer_list<LoadProfile> profiles) {
    Dataset d;
    d.profiles.assign(profiles);
    return d;
}

inline double sq_distance(const std::array<double, kHoursPerDay>& a,
                          const std::array<double, kHoursPerDay>& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        const double d = a[t] - b[t];
        s += d * d;
    }
    return s;
}

}  // namespace ergan::test
