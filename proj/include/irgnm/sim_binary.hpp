#pragma once

#include <cstdint>
#include <memory>

#include "irgnm/density.hpp"
#include "irgnm/kde.hpp"

namespace irgnm {

/// Synthetic design with an endogenous regressor Z on [0,1], a binary
/// instrument W independent of U, and Gaussian errors whose mean depends on (Z, W).
struct SimDesign
{
    double amplitude = 1.0 / 6.0; // phi(z) = amplitude sin(2 pi (z + phase)) + offset
    double phase = 0.25;
    double offset = 0.41;
    double w0 = 2.0 / 3.0; // P(W = 0)
    double mu0_slope = 0.2;
    double mu0_intercept = -0.1;
    double mu1_slope = 0.25;
    double mu1_intercept = -0.125;
    double sigma_u = 0.09;
    double z_mean = 0.5; // f_ZW(., 0): normal truncated to [0,1], scaled to mass w0
    double z_sd = 0.3;
    double transform_scale = 1.25; // f_ZW(z,1) = factor * f_ZW(scale z - shift, 0)
    double transform_shift = 0.125;

    void validate() const;

    double true_phi(double z) const;
    double mu(int w, double z) const;
    /// Normalization a of the truncated normal so that f_ZW(., 0) has mass w0.
    double normalization() const;
    /// scale * w1 / w0, which gives f_ZW(., 1) the mass w1 (0.625 by default).
    double transform_factor() const;
    double f_zw(double z, int w) const;
    double f_yzw(double y, double z, int w) const;
    double naive_limit(double z) const;
};

/// phi(z) = sin(2 pi (z + 0.25)) / 6 + 0.41 for the default design.
double true_phi(double z);
double naive_limit(double z);

/// Smallest y-window that holds phi + mu_w +- `sigmas` standard deviations.
std::pair<double, double> support_window(const SimDesign& design, double sigmas);
Grid1D default_y_grid(const SimDesign& design, Eigen::Index n);

/// Tabulates the exact joint density. Rejects windows narrower than 5 sigma.
JointDensityGrid exact_density(const SimDesign& design, const Grid1D& y_grid, const Grid1D& z_grid);

/// sup_u | int w1 f(u + phi(z), z, 0) - w0 f(u + phi(z), z, 1) dz | at the true phi.
double independence_residual(const SimDesign& design, const Grid1D& y_grid, const Grid1D& z_grid,
                             const Grid1D& u_grid);

/// E[U] = sum_w int f_ZW(z, w) mu_w(z) dz by the trapezoid rule on z_grid.
double mean_u(const SimDesign& design, const Grid1D& z_grid);

/// Seed for replication r of a run with the given master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

/// i.i.d. draws from the design; deterministic given the seed.
Sample sample(const SimDesign& design, std::size_t n, std::uint64_t seed);

} // namespace irgnm
