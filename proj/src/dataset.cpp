#include "ergan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

namespace ergan {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, bool& ok) {
    const std::string t = trim(text);
    if (t.empty()) {
        ok = false;
        return 0.0;
    }
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    ok = end == t.c_str() + t.size() && std::isfinite(v);
    return v;
}

void format_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out += buf;
}

}  // namespace

std::string HourStamp::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00", year, month, day, hour);
    return buf;
}

std::string HourStamp::date_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

HourStamp parse_hour_stamp(const std::string& text) {
    const std::string t = trim(text);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    int n = -1;
    // Accept "YYYY-MM-DDTHH", "YYYY-MM-DDTHH:MM" and "YYYY-MM-DDTHH:MM:SS".
    if (std::sscanf(t.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se, &n) >= 4 &&
        n == static_cast<int>(t.size())) {
    } else if (n = -1, se = 0,
               std::sscanf(t.c_str(), "%4d-%2d-%2dT%2d:%2d%n", &y, &mo, &d, &h, &mi, &n) >= 4 &&
                   n == static_cast<int>(t.size())) {
    } else if (n = -1, mi = 0,
               std::sscanf(t.c_str(), "%4d-%2d-%2dT%2d%n", &y, &mo, &d, &h, &n) == 4 &&
                   n == static_cast<int>(t.size())) {
    } else {
        throw DataError("bad timestamp '" + t + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || h < 0 || h > 23 || y < 1) {
        throw DataError("bad timestamp '" + t + "'");
    }
    if (d > days_in_month(y, mo)) throw DataError("bad timestamp '" + t + "'");
    if (mi != 0 || se != 0) {
        throw DataError("timestamp '" + t + "' is not on an hour boundary");
    }
    return HourStamp{y, mo, d, h};
}

std::vector<Reading> parse_readings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input");
    if (trim(line) != "household_id,timestamp,kwh") {
        throw DataError("bad header, expected 'household_id,timestamp,kwh'");
    }
    std::vector<Reading> readings;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw DataError("malformed row at line " + std::to_string(line_no));
        }
        Reading r;
        r.household_id = trim(fields[0]);
        if (r.household_id.empty()) {
            throw DataError("empty household_id at line " + std::to_string(line_no));
        }
        try {
            r.timestamp = parse_hour_stamp(fields[1]);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
        }
        bool ok = false;
        r.kwh = parse_double(fields[2], ok);
        if (!ok) throw DataError("unparseable kwh at line " + std::to_string(line_no));
        if (r.kwh < 0) {
            throw DataError("negative consumption at line " + std::to_string(line_no));
        }
        readings.push_back(std::move(r));
    }
    if (readings.empty()) throw DataError("no data rows");
    return readings;
}

SegmentResult segment_daily(const std::vector<Reading>& readings) {
    struct DaySlots {
        std::array<std::optional<double>, kHoursPerDay> kwh;
        std::size_t count = 0;
    };
    // (household, date) -> hourly slots; std::map keeps output deterministic.
    std::map<std::string, std::map<std::array<int, 3>, DaySlots>> grouped;
    for (const Reading& r : readings) {
        auto& day = grouped[r.household_id][{r.timestamp.year, r.timestamp.month, r.timestamp.day}];
        auto& slot = day.kwh[static_cast<std::size_t>(r.timestamp.hour)];
        if (slot.has_value()) {
            throw DataError("duplicate reading for " + r.household_id + " at " +
                            r.timestamp.to_string());
        }
        slot = r.kwh;
        ++day.count;
    }
    SegmentResult result;
    for (const auto& [household, days] : grouped) {
        for (const auto& [date, slots] : days) {
            if (slots.count == kHoursPerDay) {
                RawDay d;
                d.household_id = household;
                d.day_start = HourStamp{date[0], date[1], date[2], 0};
                for (std::size_t h = 0; h < kHoursPerDay; ++h) d.kwh[h] = *slots.kwh[h];
                result.days.push_back(std::move(d));
            } else {
                ++result.days_dropped;
                result.readings_dropped += slots.count;
            }
        }
    }
    return result;
}

LoadProfile normalize(std::span<const double, kHoursPerDay> raw, std::string source_id) {
    double lo = raw[0], hi = raw[0];
    for (double v : raw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
        throw DataError("constant sequence" +
                        (source_id.empty() ? "" : " (" + source_id + ")"));
    }
    LoadProfile p;
    p.source_id = std::move(source_id);
    const double range = hi - lo;
    for (std::size_t t = 0; t < kHoursPerDay; ++t) p.values[t] = (raw[t] - lo) / range;
    return p;
}

LoadProfile normalize(const RawDay& day) {
    return normalize(std::span<const double, kHoursPerDay>(day.kwh),
                     day.household_id + "_" + day.day_start.date_string());
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed) {
    if (dataset.empty()) throw DataError("cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0,1)");
    }
    const std::size_t n = dataset.size();
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    Rng rng(seed);
    std::vector<std::size_t> order = rng.permutation(n);
    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;
    std::pair<Dataset, Dataset> out;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? out.first : out.second).profiles.push_back(dataset.profiles[i]);
    }
    return out;
}

void save_dataset_csv(const Dataset& dataset, std::ostream& out) {
    std::string line = "source_id";
    for (int h = 0; h < 24; ++h) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ",h%02d", h);
        line += buf;
    }
    line += "\n";
    out << line;
    for (const LoadProfile& p : dataset.profiles) {
        line = p.source_id;
        for (double v : p.values) {
            line += ',';
            format_value(line, v);
        }
        line += '\n';
        out << line;
    }
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    save_dataset_csv(dataset, f);
}

Dataset load_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file");
    {
        auto header = split_fields(trim(line));
        if (header.size() != 25 || header[0] != "source_id") {
            throw DataError("bad dataset header: expected source_id,h00,...,h23");
        }
    }
    Dataset dataset;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 25) {
            throw DataError("dataset row at line " + std::to_string(line_no) +
                            " does not have 24 value columns");
        }
        LoadProfile p;
        p.source_id = trim(fields[0]);
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            bool ok = false;
            double v = parse_double(fields[t + 1], ok);
            if (!ok || v < 0.0 || v > 1.0) {
                throw DataError("bad value at line " + std::to_string(line_no) +
                                " column " + std::to_string(t + 2));
            }
            p.values[t] = v;
        }
        dataset.profiles.push_back(std::move(p));
    }
    if (dataset.empty()) throw DataError("dataset file has no profiles");
    return dataset;
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read " + path);
    return load_dataset_csv(f);
}

}  // namespace ergan
