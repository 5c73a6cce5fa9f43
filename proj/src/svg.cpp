#include "ergan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ergan/errors.hpp"

namespace ergan {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 45.0;
constexpr const char* kRealColor = "#3465a4";
constexpr const char* kSynthColor = "#cc4125";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Canvas {
    std::string body;
    double x0, x1, y0, y1;  // data bounds

    double px(double x) const {
        return kMarginLeft + (x - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
    }

    void line(double ax, double ay, double bx, double by, const char* color, double width = 1.0,
              double opacity = 1.0) {
        body += "<line x1=\"" + num(px(ax)) + "\" y1=\"" + num(py(ay)) + "\" x2=\"" +
                num(px(bx)) + "\" y2=\"" + num(py(by)) + "\" stroke=\"" + color +
                "\" stroke-width=\"" + num(width) + "\" stroke-opacity=\"" + num(opacity) +
                "\"/>\n";
    }

    void rect(double ax, double ay, double bx, double by, const char* color, double opacity) {
        const double x = px(ax);
        const double y = py(by);
        const double w = px(bx) - px(ax);
        const double h = py(ay) - py(by);
        body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                "\" height=\"" + num(h) + "\" fill=\"" + color + "\" fill-opacity=\"" +
                num(opacity) + "\" stroke=\"" + color + "\" stroke-width=\"0.5\"/>\n";
    }

    void polyline(std::span<const double> xs, std::span<const double> ys, const char* color) {
        body += "<polyline fill=\"none\" stroke=\"";
        body += color;
        body += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            body += num(px(xs[i])) + "," + num(py(ys[i])) + " ";
        }
        body += "\"/>\n";
    }

    void text(double x_px, double y_px, const std::string& content, const char* anchor = "middle",
              const char* color = "#333333") {
        body += "<text x=\"" + num(x_px) + "\" y=\"" + num(y_px) + "\" font-family=\"sans-serif\""
                " font-size=\"11\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" + color +
                "\">" + content + "</text>\n";
    }

    void axes(const std::string& x_label, const std::string& y_label, int x_ticks, int y_ticks) {
        line(x0, y0, x1, y0, "#000000");
        line(x0, y0, x0, y1, "#000000");
        for (int i = 0; i <= x_ticks; ++i) {
            const double x = x0 + (x1 - x0) * i / x_ticks;
            text(px(x), kHeight - kMarginBottom + 16, num(x));
        }
        for (int i = 0; i <= y_ticks; ++i) {
            const double y = y0 + (y1 - y0) * i / y_ticks;
            text(kMarginLeft - 8, py(y) + 4, num(y), "end");
        }
        text((kMarginLeft + kWidth - kMarginRight) / 2, kHeight - 12, x_label);
        text(16, kMarginTop - 12, y_label, "start");
    }

    void legend() {
        text(kWidth - 150, kMarginTop + 6, "real", "start", kRealColor);
        text(kWidth - 100, kMarginTop + 6, "synthetic", "start", kSynthColor);
    }

    std::string render() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/"
               "svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " +
               num(kWidth) + " " + num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" "
               "fill=\"#ffffff\"/>\n" + body + "</svg>\n";
    }
};

}  // namespace

std::string svg_histogram_overlay(std::span<const double> real_bins,
                                  std::span<const double> synth_bins) {
    if (real_bins.size() != synth_bins.size() || real_bins.empty()) {
        throw DataError("svg histogram: bin counts differ");
    }
    double peak = 0.0;
    for (double v : real_bins) peak = std::max(peak, v);
    for (double v : synth_bins) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    Canvas c{.body = {}, .x0 = 0.0, .x1 = 1.0, .y0 = 0.0, .y1 = peak * 1.05};
    const double w = 1.0 / static_cast<double>(real_bins.size());
    for (std::size_t i = 0; i < real_bins.size(); ++i) {
        c.rect(i * w, 0.0, (i + 1) * w, real_bins[i], kRealColor, 0.45);
        c.rect(i * w, 0.0, (i + 1) * w, synth_bins[i], kSynthColor, 0.45);
    }
    c.axes("normalized load", "fraction of values", 5, 4);
    c.legend();
    return c.render();
}

std::string svg_hourly_boxplots(const std::array<HourBoxStats, kHoursPerDay>& real,
                                const std::array<HourBoxStats, kHoursPerDay>& synth) {
    Canvas c{.body = {}, .x0 = -0.5, .x1 = 23.5, .y0 = 0.0, .y1 = 1.0};
    auto draw = [&](const HourBoxStats& box, double center, const char* color) {
        const double half = 0.18;
        c.rect(center - half, box.q1, center + half, std::max(box.q3, box.q1 + 1e-4), color, 0.35);
        c.line(center - half, box.median, center + half, box.median, color, 1.6);
        c.line(center, box.q3, center, box.hi_whisker, color);
        c.line(center, box.lo_whisker, center, box.q1, color);
        c.line(center - half / 2, box.hi_whisker, center + half / 2, box.hi_whisker, color);
        c.line(center - half / 2, box.lo_whisker, center + half / 2, box.lo_whisker, color);
    };
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
        draw(real[t], static_cast<double>(t) - 0.2, kRealColor);
        draw(synth[t], static_cast<double>(t) + 0.2, kSynthColor);
    }
    c.axes("hour of day", "normalized load", 23, 4);
    c.legend();
    return c.render();
}

std::string svg_acf_curves(std::span<const double> real_acf, std::span<const double> synth_acf) {
    if (real_acf.size() != synth_acf.size() || real_acf.empty()) {
        throw DataError("svg acf: lag counts differ");
    }
    double lo = -1.0, hi = 1.0;
    for (double v : real_acf) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : synth_acf) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Canvas c{.body = {}, .x0 = 0.0, .x1 = static_cast<double>(real_acf.size() - 1),
             .y0 = lo, .y1 = hi};
    std::vector<double> lags(real_acf.size());
    for (std::size_t i = 0; i < lags.size(); ++i) lags[i] = static_cast<double>(i);
    c.line(0.0, 0.0, c.x1, 0.0, "#999999", 0.8);
    c.polyline(lags, real_acf, kRealColor);
    c.polyline(lags, synth_acf, kSynthColor);
    c.axes("lag (hours)", "autocorrelation", static_cast<int>(real_acf.size() - 1), 4);
    c.legend();
    return c.render();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << content;
}

}  // namespace ergan
