#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ergan {

inline constexpr std::size_t kHoursPerDay = 24;

// Naive local hour-resolution timestamp. The pipeline performs no timezone
// or DST handling.
struct HourStamp {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31
    int hour = 0;   // 0..23

    friend auto operator<=>(const HourStamp&, const HourStamp&) = default;

    // "YYYY-MM-DDTHH:00:00"
    std::string to_string() const;
    std::string date_string() const;  // "YYYY-MM-DD"
};

// Parses an ISO 8601 timestamp on an hour boundary ("2017-01-01T05:00:00";
// minutes/seconds may be omitted but must be zero when present). Throws
// DataError otherwise.
HourStamp parse_hour_stamp(const std::string& text);

struct Reading {
    std::string household_id;
    HourStamp timestamp;
    double kwh = 0.0;  // >= 0
};

// One normalized 24-point daily consumption sequence. Profiles produced by
// normalize() have min exactly 0 and max exactly 1; profiles read back from
// CSV or produced by a generator only guarantee values in [0, 1].
struct LoadProfile {
    std::array<double, kHoursPerDay> values{};
    std::string source_id;
};

struct Dataset {
    std::vector<LoadProfile> profiles;

    std::size_t size() const { return profiles.size(); }
    bool empty() const { return profiles.empty(); }
};

// --- ingestion -------------------------------------------------------------

// Parses `household_id,timestamp,kwh` CSV. Malformed rows and negative
// consumption raise DataError naming the line number; an empty input raises
// DataError.
std::vector<Reading> parse_readings(std::istream& in);

struct RawDay {
    std::string household_id;
    HourStamp day_start;  // hour 0 of the day
    std::array<double, kHoursPerDay> kwh{};
};

struct SegmentResult {
    std::vector<RawDay> days;        // complete days, sorted by (household, date)
    std::size_t days_dropped = 0;    // days with at least one missing hour
    std::size_t readings_dropped = 0;  // readings belonging to dropped days
};

// Groups readings per household and emits every (household, day) with all 24
// hourly readings present. Days with gaps are dropped and counted. Duplicate
// (household, timestamp) pairs raise DataError.
SegmentResult segment_daily(const std::vector<Reading>& readings);

// Linear [0,1] scaling: (x - min) / (max - min). Throws DataError on a
// constant sequence (max == min).
LoadProfile normalize(std::span<const double, kHoursPerDay> raw, std::string source_id);
LoadProfile normalize(const RawDay& day);

// Seeded uniform split into (train, validation); |train| = round(fraction*N).
// Profiles keep their original relative order on each side. Throws on a
// fraction outside (0,1) or an empty dataset.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed);

// --- dataset CSV -----------------------------------------------------------
// Header `source_id,h00,...,h23`; values printed with 9 significant digits.

void save_dataset_csv(const Dataset& dataset, std::ostream& out);
void save_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset load_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::string& path);

}  // namespace ergan
