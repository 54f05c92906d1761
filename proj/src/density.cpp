#include "irgnm/density.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace irgnm {

namespace {

constexpr double kMassTolerance = 0.02;

Matrix cdf_along_y(const Grid1D& y_grid, const Matrix& f)
{
    Matrix G(f.rows(), f.cols());
    for (Eigen::Index j = 0; j < f.cols(); ++j) G.col(j) = cumtrapz_values(y_grid, f.col(j));
    return G;
}

double double_integral(const Grid1D& y_grid, const Grid1D& z_grid, const Matrix& f)
{
    return y_grid.weights().dot(f * z_grid.weights());
}

} // namespace

Matrix y_derivative(const Grid1D& y_grid, const Matrix& f)
{
    const Eigen::Index n = f.rows();
    const double h = y_grid.spacing();
    Matrix d(n, f.cols());
    d.row(0) = (f.row(1) - f.row(0)) / h;
    d.row(n - 1) = (f.row(n - 1) - f.row(n - 2)) / h;
    if (n > 2) d.middleRows(1, n - 2) = (f.bottomRows(n - 2) - f.topRows(n - 2)) / (2 * h);
    return d;
}

JointDensityGrid::JointDensityGrid(Grid1D y_grid, Grid1D z_grid, Matrix f0, Matrix f1, double w0, double EY,
                                   std::optional<GridFn> fZ)
    : y_grid_(std::move(y_grid)), z_grid_(std::move(z_grid)), f_{std::move(f0), std::move(f1)}, w0_(w0), EY_(EY)
{
    for (const Matrix& f : f_) {
        if (f.rows() != y_grid_.size() || f.cols() != z_grid_.size())
            throw Error(ErrorKind::invalid_input, "density table shape does not match the grids");
        if (!f.allFinite()) throw Error(ErrorKind::numerical, "density table has non-finite entries");
        if ((f.array() < 0).any()) throw Error(ErrorKind::invalid_input, "density table has negative entries");
    }
    if (!(w0_ > 0 && w0_ < 1)) throw Error(ErrorKind::invalid_input, "w0 must lie in (0, 1)");
    if (!std::isfinite(EY_)) throw Error(ErrorKind::invalid_input, "E[Y] must be finite");

    const double total = mass(0) + mass(1);
    if (std::abs(total - 1.0) > kMassTolerance)
        throw Error(ErrorKind::invalid_input,
                    "density table mass " + std::to_string(total) + " is not within 2% of 1");

    for (int w = 0; w < 2; ++w) {
        dfy_[static_cast<std::size_t>(w)] = y_derivative(y_grid_, f_[static_cast<std::size_t>(w)]);
        G_[static_cast<std::size_t>(w)] = cdf_along_y(y_grid_, f_[static_cast<std::size_t>(w)]);
    }

    if (fZ) {
        if (!(fZ->grid() == z_grid_)) throw Error(ErrorKind::invalid_input, "fZ must live on the z-grid");
        fZ_ = std::move(*fZ);
    } else {
        const Vector wy = y_grid_.weights();
        fZ_ = GridFn(z_grid_, f_[0].transpose() * wy + f_[1].transpose() * wy);
    }
    if ((fZ_.values().array() < 0).any()) throw Error(ErrorKind::invalid_input, "fZ has negative entries");
    if (std::abs(integrate(fZ_) - 1.0) > kMassTolerance)
        throw Error(ErrorKind::invalid_input, "fZ mass is not within 2% of 1");
}

double JointDensityGrid::mass(int w) const
{
    return double_integral(y_grid_, z_grid_, f(w));
}

Marginals marginals(const JointDensityGrid& d)
{
    const Vector wy = d.y_grid().weights();
    const Vector wz = d.z_grid().weights();
    Marginals m;
    m.fZ = GridFn(d.z_grid(), d.f(0).transpose() * wy + d.f(1).transpose() * wy);
    m.fY = GridFn(d.y_grid(), d.f(0) * wz + d.f(1) * wz);
    const double m0 = d.mass(0), m1 = d.mass(1);
    m.w0 = m0 / (m0 + m1);
    m.w1 = m1 / (m0 + m1);
    return m;
}

void write_density_bundle(const std::string& stem, const JointDensityGrid& d)
{
    nlohmann::json header;
    header["y_grid"] = {{"n", d.y_grid().size()}, {"lo", d.y_grid().lo()}, {"hi", d.y_grid().hi()}};
    header["z_grid"] = {{"n", d.z_grid().size()}, {"lo", d.z_grid().lo()}, {"hi", d.z_grid().hi()}};
    header["w0"] = d.w0();
    header["EY"] = d.EY();
    header["fZ"] = std::vector<double>(d.fZ().values().begin(), d.fZ().values().end());
    header["layout"] = "row-major y x z";
    {
        std::ofstream os(stem + ".json");
        if (!os) throw Error(ErrorKind::io, "cannot write " + stem + ".json");
        os << std::setprecision(std::numeric_limits<double>::max_digits10) << header.dump(2) << '\n';
    }
    for (int w = 0; w < 2; ++w) {
        const std::string path = stem + "_w" + std::to_string(w) + ".csv";
        std::ofstream os(path);
        if (!os) throw Error(ErrorKind::io, "cannot write " + path);
        os << std::setprecision(std::numeric_limits<double>::max_digits10);
        const Matrix& f = d.f(w);
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            for (Eigen::Index j = 0; j < f.cols(); ++j) os << (j ? "," : "") << f(i, j);
            os << '\n';
        }
    }
}

JointDensityGrid read_density_bundle(const std::string& stem)
{
    std::ifstream hs(stem + ".json");
    if (!hs) throw Error(ErrorKind::io, "cannot open " + stem + ".json");
    nlohmann::json header;
    try {
        hs >> header;
        auto grid = [&](const char* key) {
            const auto& g = header.at(key);
            return Grid1D(g.at("n").get<Eigen::Index>(), g.at("lo").get<double>(), g.at("hi").get<double>());
        };
        const Grid1D y_grid = grid("y_grid");
        const Grid1D z_grid = grid("z_grid");
        std::array<Matrix, 2> f;
        for (int w = 0; w < 2; ++w) {
            const std::string path = stem + "_w" + std::to_string(w) + ".csv";
            std::ifstream is(path);
            if (!is) throw Error(ErrorKind::io, "cannot open " + path);
            Matrix m(y_grid.size(), z_grid.size());
            std::string line;
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                if (!std::getline(is, line)) throw Error(ErrorKind::parse, path + ": too few rows");
                std::istringstream ss(line);
                std::string cell;
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    if (!std::getline(ss, cell, ',')) throw Error(ErrorKind::parse, path + ": too few columns");
                    m(i, j) = std::stod(cell);
                }
            }
            f[static_cast<std::size_t>(w)] = std::move(m);
        }
        const auto fz = header.at("fZ").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(fz.size()) != z_grid.size())
            throw Error(ErrorKind::parse, stem + ".json: fZ length does not match the z-grid");
        GridFn fZ(z_grid, Eigen::Map<const Vector>(fz.data(), z_grid.size()));
        return JointDensityGrid(y_grid, z_grid, std::move(f[0]), std::move(f[1]), header.at("w0").get<double>(),
                                header.at("EY").get<double>(), std::move(fZ));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, stem + ".json: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorKind::parse, stem + ": malformed number");
    }
}

} // namespace irgnm
