#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ergan/dataset.hpp"

namespace ergan {

// Deterministic fixture datasets: a fixed library of 24-point base curves
// plus seeded Gaussian noise, renormalized to [0,1]. These stand in for
// proprietary meter data in tests and demos.
enum class Archetype { MorningPeak, EveningPeak, DualPeak, FlatNight };

struct FixtureSpec {
    Archetype archetype = Archetype::EveningPeak;
    std::size_t count = 0;
    double noise = 0.0;  // stddev of additive Gaussian noise, >= 0
};

// Base curve (already min 0 / max 1) for an archetype.
const std::array<double, kHoursPerDay>& archetype_curve(Archetype a);

// Inclusive hour window containing the curve's peak; small-noise fixtures
// keep their argmax inside this window.
std::pair<int, int> archetype_peak_window(Archetype a);

std::string_view archetype_name(Archetype a);
Archetype archetype_from_name(std::string_view name);  // DataError on unknown

// Pure function of (spec, seed). source_id is "<archetype>_<ordinal>".
// Throws DataError on an empty spec, a zero count or negative noise.
Dataset fixture_generate(std::span<const FixtureSpec> spec, std::uint64_t seed);

// Renders a fixture dataset as raw hourly readings (one household-day per
// profile, kwh = scale * value) so the ingest path can be exercised end to
// end on synthetic input.
void write_fixture_readings_csv(const Dataset& dataset, std::ostream& out,
                                double scale = 5.0);

}  // namespace ergan
