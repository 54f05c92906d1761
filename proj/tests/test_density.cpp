#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "irgnm/density.hpp"
#include "irgnm/sim_binary.hpp"

using namespace irgnm;
using namespace irgnm::test;

TEST_SUITE("density")
{
    TEST_CASE("exact density: level masses")
    {
        const auto d = exact_density_shared(256);
        // trapezoid error of the truncated normal in z is about 3.4e-6 at 255 cells
        CHECK(std::abs(d->mass(0) - 2.0 / 3.0) <= 5e-6);
        CHECK(std::abs(d->mass(1) - 1.0 / 3.0) <= 5e-6);

        const SimDesign design;
        // 1275 cells keep the jumps of f_ZW(., 1) at cell midpoints
        const JointDensityGrid fine = exact_density(design, default_y_grid(design, 256), Grid1D(1276, 0.0, 1.0));
        CHECK(std::abs(fine.mass(0) - 2.0 / 3.0) <= 1e-6);
        CHECK(std::abs(fine.mass(1) - 1.0 / 3.0) <= 1e-6);
    }

    TEST_CASE("exact density: marginals")
    {
        const auto d = exact_density_shared(256);
        CHECK(d->w0() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        const Marginals m = marginals(*d);
        CHECK(std::abs(m.w0 - 2.0 / 3.0) <= 1e-5);
        CHECK(m.w0 + m.w1 == doctest::Approx(1.0));
        CHECK(std::abs(integrate(m.fZ) - 1.0) <= 1e-5);
        CHECK(std::abs(integrate(m.fY) - 1.0) <= 1e-5);

        const SimDesign design;
        double worst = 0;
        for (Eigen::Index j = 0; j < m.fZ.size(); ++j) {
            const double z = m.fZ.grid().node(j);
            worst = std::max(worst, std::abs(m.fZ[j] - design.f_zw(z, 0) - design.f_zw(z, 1)));
        }
        CHECK(worst <= 1e-3);
    }

    TEST_CASE("caches: derivative and cumulative integral")
    {
        const auto d = exact_density_shared(256);
        const Grid1D& y = d->y_grid();
        for (int w = 0; w < 2; ++w) {
            const Matrix& G = d->cdf(w);
            CHECK((G.row(0).array() == 0).all());
            for (Eigen::Index i = 1; i < G.rows(); ++i) CHECK((G.row(i).array() >= G.row(i - 1).array()).all());
            const Vector wy = y.weights();
            for (Eigen::Index j = 0; j < G.cols(); j += 17)
                CHECK(std::abs(G(G.rows() - 1, j) - wy.dot(d->f(w).col(j))) <= 1e-10 * (1 + G(G.rows() - 1, j)));
        }

        const Grid1D g(5, 0.0, 4.0);
        Matrix f(5, 1);
        f << 0, 1, 4, 9, 16;
        const Matrix df = y_derivative(g, f);
        CHECK(df(0, 0) == 1.0);
        CHECK(df(2, 0) == 4.0);
        CHECK(df(4, 0) == 7.0);
    }

    TEST_CASE("constructor rejects invalid tables")
    {
        const Grid1D y(10, -1.0, 1.0), z(8, 0.0, 1.0);
        const Matrix half = Matrix::Constant(10, 8, 0.25);
        CHECK_NOTHROW(JointDensityGrid(y, z, half, half, 0.5, 0.0));
        CHECK_THROWS_AS(JointDensityGrid(y, z, 2 * half, half, 0.5, 0.0), Error);
        CHECK_THROWS_AS(JointDensityGrid(y, z, half, half, 1.0, 0.0), Error);
        Matrix neg = half;
        neg(3, 3) = -0.1;
        CHECK_THROWS_AS(JointDensityGrid(y, z, neg, half, 0.5, 0.0), Error);
        CHECK_THROWS_AS(JointDensityGrid(y, z, half.topRows(9), half, 0.5, 0.0), Error);
    }

    TEST_CASE("bundle round trip")
    {
        const auto d = exact_density_shared(64);
        const auto stem = (std::filesystem::temp_directory_path() / "irgnm_density_roundtrip").string();
        write_density_bundle(stem, *d);
        const JointDensityGrid back = read_density_bundle(stem);
        CHECK(back.y_grid() == d->y_grid());
        CHECK(back.z_grid() == d->z_grid());
        CHECK(back.f(0) == d->f(0));
        CHECK(back.f(1) == d->f(1));
        CHECK(back.fZ().values() == d->fZ().values());
        CHECK(back.EY() == d->EY());
        CHECK(back.w0() == d->w0());
        for (const char* suffix : {".json", "_w0.csv", "_w1.csv"}) std::filesystem::remove(stem + suffix);
        CHECK_THROWS_AS(read_density_bundle(stem), Error);
    }
}
