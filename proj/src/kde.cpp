#include "irgnm/kde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace irgnm {

namespace {

double sample_sd(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1));
}

inline double gauss(double x, double h)
{
    const double t = x / h;
    return std::exp(-0.5 * t * t) / (h * std::sqrt(2 * std::numbers::pi));
}

} // namespace

void write_sample_csv(const std::string& path, const Sample& s)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "y,z,w\n";
    for (std::size_t i = 0; i < s.size(); ++i) os << s.y[i] << ',' << s.z[i] << ',' << s.w[i] << '\n';
}

Sample read_sample_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::parse, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "y,z,w") throw Error(ErrorKind::parse, path + ": expected header 'y,z,w'");
    Sample s;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        double y = 0, z = 0;
        int w = 0;
        char c1 = 0, c2 = 0;
        std::string rest;
        if (!(ss >> y >> c1 >> z >> c2 >> w) || c1 != ',' || c2 != ',' || (ss >> rest))
            throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": malformed row");
        if (w != 0 && w != 1) throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": w must be 0 or 1");
        if (!(z >= 0 && z <= 1)) throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": z outside [0,1]");
        if (!std::isfinite(y)) throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": y not finite");
        s.push_back(y, z, w);
    }
    return s;
}

std::array<Bandwidths, 2> select_bandwidths(const Sample& s, const KdeConfig& cfg)
{
    std::array<Bandwidths, 2> out;
    for (int w = 0; w < 2; ++w) {
        std::vector<double> ys, zs;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.w[i] == w) {
                ys.push_back(s.y[i]);
                zs.push_back(s.z[i]);
            }
        if (ys.size() < 2)
            throw Error(ErrorKind::invalid_input, "level w=" + std::to_string(w) + " has fewer than 2 observations");
        if (const auto* fixed = std::get_if<FixedBandwidth>(&cfg.bandwidth)) {
            if (!(fixed->h_y > 0 && fixed->h_z > 0)) throw Error(ErrorKind::invalid_input, "fixed bandwidths must be positive");
            out[static_cast<std::size_t>(w)] = {fixed->h_y, fixed->h_z};
            continue;
        }
        const double factor = std::pow(static_cast<double>(ys.size()), -1.0 / 6.0);
        const double sy = sample_sd(ys), sz = sample_sd(zs);
        if (!(sy > 0) || !(sz > 0))
            throw Error(ErrorKind::invalid_input,
                        "zero sample variance at level w=" + std::to_string(w) + "; use a fixed bandwidth");
        out[static_cast<std::size_t>(w)] = {sy * factor, sz * factor};
    }
    return out;
}

Grid1D kde_y_grid(const Sample& s, const KdeConfig& cfg)
{
    const auto bw = select_bandwidths(s, cfg);
    const double h = std::max(bw[0].h_y, bw[1].h_y);
    const auto [lo, hi] = std::minmax_element(s.y.begin(), s.y.end());
    return Grid1D(cfg.n_y, *lo - cfg.y_window_pad * h, *hi + cfg.y_window_pad * h);
}

JointDensityGrid kde_fit(const Sample& s, const KdeConfig& cfg, const Grid1D& y_grid, const Grid1D& z_grid)
{
    if (s.y.size() != s.z.size() || s.y.size() != s.w.size())
        throw Error(ErrorKind::invalid_input, "sample columns have different lengths");
    if (z_grid.lo() != 0.0 || z_grid.hi() != 1.0) throw Error(ErrorKind::invalid_input, "z-grid must span [0,1]");
    for (double z : s.z)
        if (!(z >= 0 && z <= 1)) throw Error(ErrorKind::invalid_input, "sample has z outside [0,1]");
    const auto bw = select_bandwidths(s, cfg);
    const double n = static_cast<double>(s.size());
    const Vector yn = y_grid.nodes();
    const Vector zn = z_grid.nodes();

    std::array<Matrix, 2> f;
    std::size_t n0 = 0;
    for (int w = 0; w < 2; ++w) {
        const Bandwidths& h = bw[static_cast<std::size_t>(w)];
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.w[i] == w) idx.push_back(i);
        if (w == 0) n0 = idx.size();
        // accumulate in blocks so memory stays bounded for large samples
        constexpr std::size_t block = 2048;
        Matrix fw = Matrix::Zero(y_grid.size(), z_grid.size());
        for (std::size_t start = 0; start < idx.size(); start += block) {
            const Eigen::Index m = static_cast<Eigen::Index>(std::min(block, idx.size() - start));
            Matrix ky(y_grid.size(), m), kz(z_grid.size(), m);
            for (Eigen::Index c = 0; c < m; ++c) {
                const std::size_t i = idx[start + static_cast<std::size_t>(c)];
                const double yi = s.y[i];
                const double zi = s.z[i];
                for (Eigen::Index r = 0; r < y_grid.size(); ++r) ky(r, c) = gauss(yn[r] - yi, h.h_y);
                // reflection at both ends of [0,1]
                for (Eigen::Index r = 0; r < z_grid.size(); ++r)
                    kz(r, c) = gauss(zn[r] - zi, h.h_z) + gauss(zn[r] + zi, h.h_z) + gauss(zn[r] - (2.0 - zi), h.h_z);
            }
            fw.noalias() += ky * kz.transpose();
        }
        fw /= n;
        f[static_cast<std::size_t>(w)] = std::move(fw);
    }
    double ey = 0;
    for (double y : s.y) ey += y;
    ey /= n;
    return JointDensityGrid(y_grid, z_grid, std::move(f[0]), std::move(f[1]), static_cast<double>(n0) / n, ey);
}

} // namespace irgnm
