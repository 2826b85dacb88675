#include "sbc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

namespace sbc {

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> values;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::vector<Series> series;
    std::vector<double> hlines;
};

constexpr int kWidth = 760;
constexpr int kPanelHeight = 180;
constexpr int kMarginLeft = 58;
constexpr int kMarginRight = 14;
constexpr int kMarginTop = 24;
constexpr int kMarginBottom = 26;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void write_panel(std::ofstream& f, const Panel& panel, const std::vector<double>& t, int y_off) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Series& s : panel.series)
        for (double v : s.values) {
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    for (double h : panel.hlines) {
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    if (hi - lo < 1e-12) {
        hi += 1.0;
        lo -= 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double t0 = t.front(), t1 = t.back();
    const double px = kWidth - kMarginLeft - kMarginRight;
    const double py = kPanelHeight - kMarginTop - kMarginBottom;
    auto X = [&](double tv) { return kMarginLeft + (tv - t0) / (t1 - t0) * px; };
    auto Y = [&](double v) { return y_off + kMarginTop + (hi - v) / (hi - lo) * py; };

    f << "<rect x='" << kMarginLeft << "' y='" << y_off + kMarginTop << "' width='" << px
      << "' height='" << py << "' fill='none' stroke='#999'/>\n";
    f << "<text x='" << kMarginLeft << "' y='" << y_off + kMarginTop - 7
      << "' font-size='12' fill='#333'>" << panel.title << "</text>\n";
    f << "<text x='6' y='" << Y(lo) << "' font-size='10' fill='#666'>" << fmt(lo) << "</text>\n";
    f << "<text x='6' y='" << Y(hi) + 4 << "' font-size='10' fill='#666'>" << fmt(hi) << "</text>\n";
    f << "<text x='" << X(t1) - 30 << "' y='" << y_off + kPanelHeight - 8
      << "' font-size='10' fill='#666'>t=" << fmt(t1) << "</text>\n";

    for (double h : panel.hlines)
        f << "<line x1='" << X(t0) << "' y1='" << Y(h) << "' x2='" << X(t1) << "' y2='" << Y(h)
          << "' stroke='#bbb' stroke-dasharray='4,3'/>\n";

    int legend_x = kMarginLeft + 8;
    for (const Series& s : panel.series) {
        f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2'";
        if (s.dashed) f << " stroke-dasharray='5,3'";
        f << " points='";
        const std::size_t stride = std::max<std::size_t>(1, t.size() / 2000);
        for (std::size_t i = 0; i < t.size(); i += stride)
            f << fmt(X(t[i])) << "," << fmt(Y(s.values[i])) << " ";
        f << fmt(X(t.back())) << "," << fmt(Y(s.values.back()));
        f << "'/>\n";
        f << "<text x='" << legend_x << "' y='" << y_off + kMarginTop + 12
          << "' font-size='10' fill='" << s.color << "'>" << s.label << "</text>\n";
        legend_x += static_cast<int>(s.label.size()) * 7 + 16;
    }
}

void write_figure(const std::string& path, const std::vector<Panel>& panels,
                  const std::vector<double>& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open plot file for writing: " + path);
    const int height = static_cast<int>(panels.size()) * kPanelHeight;
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << height
      << "' viewBox='0 0 " << kWidth << " " << height << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    int y = 0;
    for (const Panel& p : panels) {
        write_panel(f, p, t, y);
        y += kPanelHeight;
    }
    f << "</svg>\n";
}

std::vector<double> column(const Trace& tr, const std::function<double(const TraceRow&)>& get) {
    std::vector<double> v;
    v.reserve(tr.rows.size());
    for (const auto& r : tr.rows) v.push_back(get(r));
    return v;
}

}  // namespace

void write_plots(const Trace& trace, const ControllerConfig& cfg, const std::string& dir,
                 const std::string& prefix) {
    if (trace.rows.size() < 2) return;
    const std::string base = dir.empty() ? prefix : dir + "/" + prefix;
    std::vector<double> t = column(trace, [](const TraceRow& r) { return r.t; });

    std::vector<Panel> tracking;
    for (int k = 0; k < trace.n; ++k) {
        Panel p;
        p.title = "x" + std::to_string(k + 1) + " vs x" + std::to_string(k + 1) + "d";
        p.series.push_back({"desired", "#000000",
                            column(trace, [k](const TraceRow& r) { return r.xd[static_cast<std::size_t>(k)]; }),
                            true});
        p.series.push_back({"actual", "#888888",
                            column(trace, [k](const TraceRow& r) { return r.x[static_cast<std::size_t>(k)]; }),
                            false});
        tracking.push_back(std::move(p));
    }
    {
        Panel p;
        p.title = "control u";
        p.series.push_back({"u", "#2255aa", column(trace, [](const TraceRow& r) { return r.u; }), false});
        tracking.push_back(std::move(p));
    }
    write_figure(base + "tracking.svg", tracking, t);

    std::vector<Panel> errors;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
    for (int k = 0; k < trace.n; ++k) {
        Panel p;
        p.title = "e" + std::to_string(k + 1);
        p.series.push_back({"e" + std::to_string(k + 1), palette[k % 6],
                            column(trace, [k](const TraceRow& r) { return r.e[static_cast<std::size_t>(k)]; }),
                            false});
        p.hlines.push_back(0.0);
        errors.push_back(std::move(p));
    }
    write_figure(base + "errors.svg", errors, t);

    std::vector<Panel> params;
    std::size_t flat = 0;
    for (std::size_t k = 0; k < cfg.theta.size(); ++k) {
        for (std::size_t z = 0; z < cfg.theta[k].size(); ++z, ++flat) {
            const auto& law = cfg.theta[k][z];
            if (!law.adapt) continue;
            Panel p;
            p.title = trace.theta_labels[flat];
            const std::size_t idx = flat;
            p.series.push_back({trace.theta_labels[flat], palette[params.size() % 6],
                                column(trace, [idx](const TraceRow& r) { return r.theta_hat[idx]; }),
                                false});
            if (law.projection) {
                p.hlines.push_back(law.projection->lower);
                p.hlines.push_back(law.projection->upper);
                p.hlines.push_back(law.projection->lower - law.projection->activation);
                p.hlines.push_back(law.projection->upper + law.projection->activation);
            }
            params.push_back(std::move(p));
        }
    }
    if (!params.empty()) write_figure(base + "params.svg", params, t);
}

}  // namespace sbc
