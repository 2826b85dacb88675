#include "sbc/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sbc/errors.hpp"

namespace sbc {

std::vector<std::string> column_names(const Trace& trace) {
    std::vector<std::string> cols;
    const int n = trace.n;
    for (int k = 1; k <= n; ++k) cols.push_back("x" + std::to_string(k));
    for (int k = 1; k <= n; ++k) cols.push_back("x" + std::to_string(k) + "d");
    for (int k = 1; k <= n; ++k) cols.push_back("e" + std::to_string(k));
    cols.push_back("u");
    for (const auto& l : trace.theta_labels) cols.push_back(l);
    for (int k = 1; k < n; ++k) cols.push_back("s" + std::to_string(k));
    cols.push_back("nu_tot");
    return cols;
}

namespace {

void append_value(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    line += buf;
}

std::vector<double> row_values(const TraceRow& r) {
    std::vector<double> v;
    v.reserve(r.x.size() * 3 + r.theta_hat.size() + r.s.size() + 2);
    v.insert(v.end(), r.x.begin(), r.x.end());
    v.insert(v.end(), r.xd.begin(), r.xd.end());
    v.insert(v.end(), r.e.begin(), r.e.end());
    v.push_back(r.u);
    v.insert(v.end(), r.theta_hat.begin(), r.theta_hat.end());
    v.insert(v.end(), r.s.begin(), r.s.end());
    v.push_back(r.nu_tot);
    return v;
}

}  // namespace

void write_csv(const Trace& trace, const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!f) throw Error("cannot open trace file for writing: " + path);
    std::string line = "t";
    for (const auto& c : column_names(trace)) line += "," + c;
    line += '\n';
    f << line;
    for (const TraceRow& r : trace.rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", r.t);
        line.assign(buf);
        for (double v : row_values(r)) append_value(line, v);
        line += '\n';
        f << line;
    }
    if (!f) throw Error("failed writing trace file: " + path);
}

Trace read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open trace file: " + path);
    std::string header;
    if (!std::getline(f, header)) throw Error("empty trace file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 2 || cols[0] != "t" || cols.back() != "nu_tot")
        throw Error("unrecognized trace header in " + path);

    int n = 0;
    while (static_cast<std::size_t>(n + 1) < cols.size() &&
           cols[static_cast<std::size_t>(n + 1)] == "x" + std::to_string(n + 1))
        ++n;
    if (n == 0) throw Error("no state columns in " + path);

    Trace trace;
    trace.n = n;
    std::size_t i = 1 + 3 * static_cast<std::size_t>(n) + 1;  // past t, x, xd, e, u
    while (i < cols.size() && cols[i].rfind("theta_", 0) == 0) trace.theta_labels.push_back(cols[i++]);

    const std::size_t expected = 1 + 3 * static_cast<std::size_t>(n) + 1 +
                                 trace.theta_labels.size() + static_cast<std::size_t>(n - 1) + 1;
    if (cols.size() != expected) throw Error("unexpected column count in " + path);

    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> vals;
        vals.reserve(cols.size());
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            double v = 0.0;
            auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) throw Error("bad numeric field in " + path);
            vals.push_back(v);
            p = res.ptr;
            if (p < end) {
                if (*p != ',') throw Error("bad field separator in " + path);
                ++p;
            }
        }
        if (vals.size() != cols.size()) throw Error("short row in " + path);

        TraceRow r;
        std::size_t j = 0;
        r.t = vals[j++];
        r.x.assign(vals.begin() + static_cast<std::ptrdiff_t>(j), vals.begin() + static_cast<std::ptrdiff_t>(j + static_cast<std::size_t>(n)));
        j += static_cast<std::size_t>(n);
        r.xd.assign(vals.begin() + static_cast<std::ptrdiff_t>(j), vals.begin() + static_cast<std::ptrdiff_t>(j + static_cast<std::size_t>(n)));
        j += static_cast<std::size_t>(n);
        r.e.assign(vals.begin() + static_cast<std::ptrdiff_t>(j), vals.begin() + static_cast<std::ptrdiff_t>(j + static_cast<std::size_t>(n)));
        j += static_cast<std::size_t>(n);
        r.u = vals[j++];
        r.theta_hat.assign(vals.begin() + static_cast<std::ptrdiff_t>(j),
                           vals.begin() + static_cast<std::ptrdiff_t>(j + trace.theta_labels.size()));
        j += trace.theta_labels.size();
        r.s.assign(vals.begin() + static_cast<std::ptrdiff_t>(j),
                   vals.begin() + static_cast<std::ptrdiff_t>(j + static_cast<std::size_t>(n - 1)));
        j += static_cast<std::size_t>(n - 1);
        r.nu_tot = vals[j++];
        trace.rows.push_back(std::move(r));
    }
    return trace;
}

std::vector<std::pair<std::string, double>> compare(const Trace& a, const Trace& b, double t_min,
                                                    double t_max) {
    if (a.n != b.n || a.theta_labels != b.theta_labels)
        throw ValidationError("compare: traces have different layouts");
    if (a.rows.size() != b.rows.size())
        throw ValidationError("compare: traces have different sampling grids");

    const std::vector<std::string> cols = column_names(a);
    std::vector<std::pair<std::string, double>> report;
    report.reserve(cols.size());
    for (const auto& c : cols) report.emplace_back(c, 0.0);

    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const TraceRow& ra = a.rows[i];
        const TraceRow& rb = b.rows[i];
        if (ra.t != rb.t) throw ValidationError("compare: traces have different sampling grids");
        if (ra.t < t_min || ra.t > t_max) continue;
        const std::vector<double> va = row_values(ra);
        const std::vector<double> vb = row_values(rb);
        for (std::size_t c = 0; c < report.size(); ++c) {
            const double d = std::fabs(va[c] - vb[c]);
            if (d > report[c].second) report[c].second = d;
        }
    }
    return report;
}

}  // namespace sbc
