#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "irgnm/forward_model.hpp"
#include "irgnm/irgnm.hpp"
#include "irgnm/source_condition.hpp"

namespace irgnm {

/// Dense F'[phi]. `raw` maps grid values of h to the codomain values of
/// F'[phi]h (ufun rows first, scalar row last). The weighted form carries the
/// quadrature so that its matrix SVD is the operator SVD.
struct JacobianMatrix
{
    Matrix raw;
    Vector row_weights; // codomain trapezoid weights, then the scalar-row weight
    Vector col_weights; // domain trapezoid weights

    Matrix weighted() const;
    Vector multiply(const Vector& h) const { return raw * h; }
};

constexpr Eigen::Index kMaxJacobianColumns = 512;

JacobianMatrix assemble_jacobian(const ForwardModel& model, const GridFn& phi);

/// Non-increasing singular values of J.weighted().
Vector singular_values(const JacobianMatrix& J);

struct LinearFit
{
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

/// Least-squares line through (x_i, y_i). Throws on fewer than 2 points or constant x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log sigma_j against j over j = first..last (1-based, inclusive).
LinearFit log_decay_fit(const Vector& sigma, int first, int last);

/// sqrt(|| A*A - B*B ||) in the weighted geometry, by power iteration on the
/// squared Gram difference.
double gamma_bound(const JacobianMatrix& J_true, const JacobianMatrix& J_est);

struct PolynomialDecay
{
    double a = 2.0; // sigma_j = j^-a
};

struct ExponentialDecay
{
    double c = 0.5; // sigma_j = exp(-c j)
};

using SpectralDecay = std::variant<PolynomialDecay, ExponentialDecay>;

/// F(phi) = sigma .* phi - g on the node grid 1..N, scalar row zero.
/// The weights of domain and codomain coincide, so sigma are the singular values.
class DiagonalModel final : public ForwardModel
{
public:
    DiagonalModel(Vector sigma, Vector data);

    const Grid1D& domain_grid() const override { return grid_; }
    const Grid1D& codomain_grid() const override { return grid_; }

    CodomainElem apply(const GridFn& phi) const override;
    CodomainElem deriv_apply(const GridFn& phi, const GridFn& h) const override;
    GridFn deriv_adjoint(const GridFn& phi, const CodomainElem& y) const override;

    const Vector& sigma() const { return sigma_; }

private:
    Grid1D grid_;
    Vector sigma_;
    Vector data_;
};

Vector decay_spectrum(const SpectralDecay& decay, Eigen::Index n);

struct RateConfig
{
    SourceCondition sc = SourceCondition::holder(0.5);
    SpectralDecay decay = PolynomialDecay{};
    std::vector<double> deltas;
    Eigen::Index n = 1000;
    std::uint64_t seed = 1;
    int k_max = 2000;
    // the subproblem error has to stay well below the regularization error at
    // the smallest alpha reached
    CgSolver cg{20000, 1e-13};
};

struct RateReport
{
    std::vector<double> deltas;
    std::vector<double> errors;
    std::vector<int> stop_indices;
    LinearFit fit;
    /// Hoelder: slope of log error vs log delta. Logarithmic: -slope of log
    /// error vs log(-ln delta), i.e. the fitted p.
    double exponent = 0;
    /// 2 mu / (2 mu + 1) or p.
    double target = 0;
};

/// Exact solution phi0 + coefficients Lambda(sigma_j^2) j^-0.51 scaled to unit
/// norm, phi0 = 0, data sigma .* phi + delta xi with a seeded unit xi. Runs the
/// a-priori stopped iteration for each delta.
RateReport rate_experiment(const RateConfig& cfg);

} // namespace irgnm
