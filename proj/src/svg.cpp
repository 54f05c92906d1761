#include "irgnm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "irgnm/error.hpp"

namespace irgnm::svg {

namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 52;

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// About five round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (span / step <= 6) break;
    }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

struct Frame
{
    double x0, x1, y0, y1; // data range (y in log10 when log_y)
    const ChartOptions& opts;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (opts.width - kLeft - kRight); }
    double py(double y) const
    {
        return opts.height - kBottom - (y - y0) / (y1 - y0) * (opts.height - kTop - kBottom);
    }
};

void pad_range(double& lo, double& hi)
{
    if (!(hi > lo)) {
        const double d = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= d;
        hi += d;
    }
}

void open_document(std::ostringstream& os, const ChartOptions& o)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!o.title.empty())
        os << "<text x=\"" << o.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(o.title)
           << "</text>\n";
}

void draw_axes(std::ostringstream& os, const Frame& f)
{
    const ChartOptions& o = f.opts;
    const double bottom = o.height - kBottom, right = o.width - kRight;
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << right - kLeft << "\" height=\""
       << bottom - kTop << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(f.x0, f.x1)) {
        const double x = f.px(t);
        os << "<line x1=\"" << x << "\" y1=\"" << bottom << "\" x2=\"" << x << "\" y2=\"" << bottom + 5
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    std::vector<double> yt;
    if (o.log_y) {
        for (double e = std::ceil(f.y0); e <= f.y1; e += std::max(1.0, std::floor((f.y1 - f.y0) / 8))) yt.push_back(e);
    } else {
        yt = nice_ticks(f.y0, f.y1);
    }
    for (double t : yt) {
        const double y = f.py(t);
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
           << "\" stroke=\"black\"/>\n";
        const std::string label = o.log_y ? "1e" + fmt(t) : fmt(t);
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    os << "<text x=\"" << (kLeft + right) / 2 << "\" y=\"" << o.height - 12 << "\" text-anchor=\"middle\">"
       << escape(o.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kTop + bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (kTop + bottom) / 2 << ")\">" << escape(o.y_label) << "</text>\n";
}

} // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& opts)
{
    auto ty = [&](double y) { return opts.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!opts.log_y || y > 0); };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series& s : series) {
        if (s.x.size() != s.y.size()) throw Error(ErrorKind::invalid_input, "series '" + s.label + "' has ragged data");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    pad_range(x0, x1);
    pad_range(y0, y1);
    const double margin = 0.05 * (y1 - y0);
    const Frame f{x0, x1, y0 - margin, y1 + margin, opts};

    std::ostringstream os;
    open_document(os, opts);
    draw_axes(os, f);
    int legend_row = 0;
    for (const Series& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) os << f.px(s.x[i]) << ',' << f.py(ty(s.y[i])) << ' ';
        os << "\"/>\n";
        if (!s.label.empty()) {
            const double lx = opts.width - kRight - 150, ly = kTop + 16 + 16 * legend_row++;
            os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly - 4
               << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
               << "/>\n";
            os << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string histogram(const std::vector<double>& values, int bins, const ChartOptions& opts)
{
    if (bins < 1) throw Error(ErrorKind::invalid_input, "histogram needs at least one bin");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo)) {
        lo = 0;
        hi = 1;
    }
    pad_range(lo, hi);
    std::vector<int> count(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
        ++count[static_cast<std::size_t>(b)];
    }
    const int peak = std::max(1, *std::max_element(count.begin(), count.end()));
    ChartOptions o = opts;
    o.log_y = false;
    const Frame f{lo, hi, 0.0, peak * 1.05, o};

    std::ostringstream os;
    open_document(os, o);
    draw_axes(os, f);
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        const double xa = f.px(lo + b * w), xb = f.px(lo + (b + 1) * w);
        const double top = f.py(count[static_cast<std::size_t>(b)]), base = f.py(0);
        os << "<rect x=\"" << xa << "\" y=\"" << top << "\" width=\"" << xb - xa << "\" height=\"" << base - top
           << "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot write " + path);
    os << content;
}

} // namespace irgnm::svg
