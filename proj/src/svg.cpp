#include "snm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace snm {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    std::vector<double> ticks;

    double place(double v) const {  // -> [0, 1]
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }
};

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
        t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

Axis make_axis(double lo, double hi, bool log) {
    Axis ax;
    ax.log = log;
    if (log) {
        if (!(lo > 0.0)) lo = std::max(hi * 1e-6, 1e-12);
        ax.lo = std::pow(10.0, std::floor(std::log10(lo)));
        ax.hi = std::pow(10.0, std::ceil(std::log10(hi)));
        if (ax.hi <= ax.lo) ax.hi = ax.lo * 10.0;
        for (double v = ax.lo; v <= ax.hi * 1.0001; v *= 10.0) ax.ticks.push_back(v);
    } else {
        if (hi <= lo) hi = lo + 1.0;
        const double pad = 0.05 * (hi - lo);
        ax.lo = lo - pad;
        ax.hi = hi + pad;
        ax.ticks = linear_ticks(ax.lo, ax.hi);
    }
    return ax;
}

}  // namespace

std::string SvgChart::render() const {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (log_x && !(s.x[i] > 0.0)) continue;
            if (log_y && !(s.y[i] > 0.0)) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    if (!std::isfinite(xlo)) {
        xlo = 0.0;
        xhi = 1.0;
        ylo = 0.0;
        yhi = 1.0;
    }
    const Axis ax = make_axis(xlo, xhi, log_x);
    const Axis ay = make_axis(ylo, yhi, log_y);

    const double ml = 62, mr = 18, mt = title.empty() ? 18 : 38, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto X = [&](double v) { return ml + ax.place(v) * pw; };
    const auto Y = [&](double v) { return mt + (1.0 - ay.place(v)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!title.empty())
        out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
            << escape(title) << "</text>\n";

    for (double t : ax.ticks) {
        const double x = X(t);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ay.ticks) {
        const double y = Y(t);
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!x_label.empty())
        out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 8)
            << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    if (!y_label.empty())
        out << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << fmt(mt + ph / 2)
            << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color =
            s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        const auto ok = [&](std::size_t i) {
            return std::isfinite(s.x[i]) && std::isfinite(s.y[i]) &&
                   (!log_x || s.x[i] > 0.0) && (!log_y || s.y[i] > 0.0);
        };
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.marks) {
            for (std::size_t i = 0; i < n; ++i)
                if (ok(i))
                    out << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
                        << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
        } else {
            std::string d;
            bool pen_up = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!ok(i)) {
                    pen_up = true;
                    continue;
                }
                d += (pen_up ? "M" : "L");
                d += fmt(X(s.x[i])) + " " + fmt(Y(s.y[i])) + " ";
                pen_up = false;
            }
            if (!d.empty())
                out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.8\"/>\n";
        }
        const double ly = mt + 16 + 16 * static_cast<double>(si);
        out << "<line x1=\"" << fmt(ml + pw - 120) << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << fmt(ml + pw - 98) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(ml + pw - 92) << "\" y=\"" << fmt(ly + 4) << "\">"
            << escape(s.label) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

void SvgChart::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << render();
}

}  // namespace snm
