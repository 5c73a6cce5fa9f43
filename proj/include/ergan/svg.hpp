#pragma once

#include <span>
#include <string>
#include <vector>

#include "ergan/eval.hpp"

namespace ergan {

// Static SVG renderings of the evaluation views. Minimal vector graphics,
// no interactivity.

// Overlaid value histograms of two datasets (normalized bin fractions).
std::string svg_histogram_overlay(std::span<const double> real_bins,
                                  std::span<const double> synth_bins);

// Real and synthetic Tukey boxes side by side for each hour.
std::string svg_hourly_boxplots(const std::array<HourBoxStats, kHoursPerDay>& real,
                                const std::array<HourBoxStats, kHoursPerDay>& synth);

// Mean ACF curves of both datasets over lag.
std::string svg_acf_curves(std::span<const double> real_acf, std::span<const double> synth_acf);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ergan
