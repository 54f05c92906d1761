#pragma once

#include <array>
#include <optional>
#include <string>

#include "irgnm/grid.hpp"

namespace irgnm {

/// f_YZW tabulated on (y-grid x z-grid) for each level of a binary W, with
/// the y-derivative and y-CDF cached. Matrices are indexed (y, z).
class JointDensityGrid
{
public:
    /// Builds the caches and checks the invariants. `fZ` defaults to the
    /// y-marginal of the table when left empty.
    JointDensityGrid(Grid1D y_grid, Grid1D z_grid, Matrix f0, Matrix f1, double w0, double EY,
                     std::optional<GridFn> fZ = std::nullopt);

    const Grid1D& y_grid() const { return y_grid_; }
    const Grid1D& z_grid() const { return z_grid_; }
    const Matrix& f(int w) const { return f_.at(static_cast<std::size_t>(w)); }
    const Matrix& dfy(int w) const { return dfy_.at(static_cast<std::size_t>(w)); }
    const Matrix& cdf(int w) const { return G_.at(static_cast<std::size_t>(w)); }
    double w0() const { return w0_; }
    double w1() const { return 1.0 - w0_; }
    const GridFn& fZ() const { return fZ_; }
    double EY() const { return EY_; }

    /// Double integral of f(., ., w) over the tabulated window.
    double mass(int w) const;

private:
    Grid1D y_grid_;
    Grid1D z_grid_;
    std::array<Matrix, 2> f_;
    std::array<Matrix, 2> dfy_;
    std::array<Matrix, 2> G_;
    double w0_;
    GridFn fZ_;
    double EY_;
};

struct Marginals
{
    GridFn fZ;
    double w0 = 0;
    double w1 = 0;
    GridFn fY;
};

/// fZ(z) = int f(y,z,0) + f(y,z,1) dy, fY analogously, W masses from the table.
Marginals marginals(const JointDensityGrid& d);

/// Central differences along y, one-sided at the ends.
Matrix y_derivative(const Grid1D& y_grid, const Matrix& f);

/// Writes `<stem>.json` (grids, w0, EY, fZ) and `<stem>_w0.csv`, `<stem>_w1.csv`
/// (row-major y x z, one y per row).
void write_density_bundle(const std::string& stem, const JointDensityGrid& d);
JointDensityGrid read_density_bundle(const std::string& stem);

} // namespace irgnm
