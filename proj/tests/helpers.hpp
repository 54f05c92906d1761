#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "irgnm/forward_model.hpp"
#include "irgnm/grid.hpp"
#include "irgnm/sim_binary.hpp"

namespace irgnm::test {

/// Seeded generator for hand-rolled property tests.
class Gen
{
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>()(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Vector normal_vector(Eigen::Index n);
    GridFn normal_fn(const Grid1D& g) { return GridFn(g, normal_vector(g.size())); }
    /// Strictly positive function with unit trapezoid mass.
    GridFn unit_mass_fn(const Grid1D& g);
    /// Smooth random function: a few low-frequency cosines.
    GridFn smooth_fn(const Grid1D& g, double scale = 1.0);

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// h -> (M h, <c, h>) from `domain` to `codomain`, with the adjoint taken in
/// the trapezoid geometry of both grids.
LinearOperator matrix_operator(const Matrix& M, const Vector& c, const Grid1D& domain, const Grid1D& codomain,
                               double scalar_weight = 1.0);

/// F(phi) = (M phi + a phi^3 - g, <c, phi> - s) on node values; linear for a = 0.
class MatrixModel final : public ForwardModel
{
public:
    MatrixModel(Matrix M, Vector c, Grid1D domain, Grid1D codomain, Vector g, double s, double a = 0.0);

    const Grid1D& domain_grid() const override { return domain_; }
    const Grid1D& codomain_grid() const override { return codomain_; }

    CodomainElem apply(const GridFn& phi) const override;
    CodomainElem deriv_apply(const GridFn& phi, const GridFn& h) const override;
    GridFn deriv_adjoint(const GridFn& phi, const CodomainElem& y) const override;

private:
    Matrix M_;
    Vector c_;
    Grid1D domain_, codomain_;
    Vector g_;
    double s_;
    double a_;
};

/// Well-conditioned square matrix: identity plus a small random part.
Matrix well_conditioned(Gen& gen, Eigen::Index n, double spread = 0.3);

/// Exact density of the default design on n x n grids, shared between tests.
std::shared_ptr<const JointDensityGrid> exact_density_shared(Eigen::Index n);

bool close_rel(double a, double b, double rel);

} // namespace irgnm::test
