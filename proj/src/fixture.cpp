#include "ergan/fixture.hpp"

#include <cstdio>
#include <ostream>
#include <string>

#include "ergan/errors.hpp"
#include "ergan/rng.hpp"

namespace ergan {

namespace {

// Base curves, pre-normalized to min 0 / max 1 so a zero-noise fixture
// reproduces them bit-exactly. Gaussian bumps over a 24-hour grid:
//   morning_peak: main bump at hour 7 plus a faint evening shoulder
//   evening_peak: main bump at hour 19 plus a faint morning shoulder
//   dual_peak:    bumps at hours 7 and 19, evening dominant
//   flat_night:   daytime plateau (rise ~8h, fall ~21h), near-zero overnight
constexpr std::array<double, kHoursPerDay> kMorningPeak = {
    0, 0.008940615044374014, 0.0418388750537817, 0.1334330611056526,
    0.3231561752804339, 0.6056403255281124, 0.8822073873670292, 1,
    0.8823757789960462, 0.6062186498572389, 0.3248255334688001, 0.1377269631552149,
    0.0517192544485587, 0.02928438337776047, 0.03748293851141063, 0.05994292313123362,
    0.08902242908792414, 0.1181794154196019, 0.1400059156081941, 0.148129101189217,
    0.1400056457427536, 0.1181756808078194, 0.08898227798131993, 0.05960674202649426};

constexpr std::array<double, kHoursPerDay> kEveningPeak = {
    0, 0.004474254091831972, 0.01285458058432967, 0.02658168317840491,
    0.04605683772510226, 0.06958429353322951, 0.09296589836721993, 0.1104502745379442,
    0.1169598923062365, 0.1104826547906777, 0.09319887031955219, 0.0709334406587348,
    0.05241068560220642, 0.05091960769520087, 0.08867741174566997, 0.1966002750872323,
    0.3959516120268338, 0.6615921447334374, 0.9018483349905317, 1,
    0.9014232844796155, 0.6602647445689376, 0.3925147069455097, 0.1886873174711643};

constexpr std::array<double, kHoursPerDay> kDualPeak = {
    0, 0.002510437321626327, 0.0154482850803612, 0.06312812847053421,
    0.1866969831718059, 0.4043233273179204, 0.6426082928740567, 0.7499024816221005,
    0.642608562267807, 0.4043270554020795, 0.1867370640994145, 0.06346372197372878,
    0.01763662961273331, 0.0136237678547349, 0.04395407490562026, 0.1350364873283404,
    0.3243917873820065, 0.6063773028514485, 0.8824510663195555, 1,
    0.8824510604924093, 0.6063771538621192, 0.3243889913017081, 0.1349979481503762};

constexpr std::array<double, kHoursPerDay> kFlatNight = {
    0, 2.139487702803625e-05, 0.0001172688209200899, 0.0005467203362543092,
    0.002466866455301147, 0.01098252349200627, 0.04742717843136833, 0.1824480367970349,
    0.5000724010203418, 0.8176967560505048, 0.9527175619709505, 0.9891619793582396,
    0.9976765712019782, 0.9995919433603062, 1, 1,
    0.9995919433603063, 0.9976765712019781, 0.9891619793582397, 0.9527175619709504,
    0.8176967560505047, 0.5000724010203418, 0.1824480367970349, 0.04742717843136833};

}  // namespace

const std::array<double, kHoursPerDay>& archetype_curve(Archetype a) {
    switch (a) {
        case Archetype::MorningPeak: return kMorningPeak;
        case Archetype::EveningPeak: return kEveningPeak;
        case Archetype::DualPeak: return kDualPeak;
        case Archetype::FlatNight: return kFlatNight;
    }
    throw DataError("unknown archetype");
}

std::pair<int, int> archetype_peak_window(Archetype a) {
    switch (a) {
        case Archetype::MorningPeak: return {5, 9};
        case Archetype::EveningPeak: return {17, 21};
        case Archetype::DualPeak: return {17, 21};
        case Archetype::FlatNight: return {9, 20};
    }
    throw DataError("unknown archetype");
}

std::string_view archetype_name(Archetype a) {
    switch (a) {
        case Archetype::MorningPeak: return "morning_peak";
        case Archetype::EveningPeak: return "evening_peak";
        case Archetype::DualPeak: return "dual_peak";
        case Archetype::FlatNight: return "flat_night";
    }
    throw DataError("unknown archetype");
}

Archetype archetype_from_name(std::string_view name) {
    if (name == "morning_peak") return Archetype::MorningPeak;
    if (name == "evening_peak") return Archetype::EveningPeak;
    if (name == "dual_peak") return Archetype::DualPeak;
    if (name == "flat_night") return Archetype::FlatNight;
    throw DataError("unknown archetype '" + std::string(name) +
                    "' (known: morning_peak, evening_peak, dual_peak, flat_night)");
}

Dataset fixture_generate(std::span<const FixtureSpec> spec, std::uint64_t seed) {
    if (spec.empty()) throw DataError("empty fixture spec");
    Rng rng(seed);
    Dataset dataset;
    for (const FixtureSpec& s : spec) {
        if (s.count == 0) throw DataError("fixture count must be positive");
        if (s.noise < 0.0) throw DataError("fixture noise must be non-negative");
        const auto& base = archetype_curve(s.archetype);
        for (std::size_t i = 0; i < s.count; ++i) {
            std::array<double, kHoursPerDay> raw;
            for (std::size_t t = 0; t < kHoursPerDay; ++t) {
                raw[t] = base[t] + (s.noise > 0.0 ? s.noise * rng.gaussian() : 0.0);
            }
            std::string id = std::string(archetype_name(s.archetype)) + "_" + std::to_string(i);
            dataset.profiles.push_back(
                normalize(std::span<const double, kHoursPerDay>(raw), std::move(id)));
        }
    }
    return dataset;
}

void write_fixture_readings_csv(const Dataset& dataset, std::ostream& out, double scale) {
    out << "household_id,timestamp,kwh\n";
    // One synthetic household per profile, each contributing one day.
    int year = 2017, month = 1, day = 1;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const std::string household = "fixh" + std::to_string(i);
        for (int h = 0; h < 24; ++h) {
            char ts[32];
            std::snprintf(ts, sizeof(ts), "%04d-%02d-%02dT%02d:00:00", year, month, day, h);
            char val[40];
            std::snprintf(val, sizeof(val), "%.9g", scale * dataset.profiles[i].values[h]);
            out << household << ',' << ts << ',' << val << '\n';
        }
    }
}

}  // namespace ergan
