#pragma once

#include <memory>

#include "irgnm/density.hpp"
#include "irgnm/forward_model.hpp"

namespace irgnm {

enum class OperatorForm
{
    density_form, // integrand uses f
    cdf_form      // integrand uses the y-CDF G
};

/// Independent-instrument regression with binary W:
///   F(phi)(u) = ( int w1 A(u + phi(z), z, 0) - w0 A(u + phi(z), z, 1) dz ,
///                 int phi(z) fZ(z) dz - E[Y] )
/// with A = f (density form) or A = G (cdf form). A is interpolated in y by
/// cubic Hermite polynomials with the tabulated y-derivative as node slopes;
/// the derivative uses d/dy of that interpolant.
class BinaryIVOperator final : public ForwardModel
{
public:
    BinaryIVOperator(std::shared_ptr<const JointDensityGrid> density, Grid1D u_grid, OperatorForm form,
                     double scalar_weight = 1.0);

    const Grid1D& domain_grid() const override { return density_->z_grid(); }
    const Grid1D& codomain_grid() const override { return u_grid_; }
    double scalar_weight() const override { return scalar_weight_; }
    OperatorForm form() const { return form_; }
    const JointDensityGrid& density() const { return *density_; }

    CodomainElem apply(const GridFn& phi) const override;
    CodomainElem deriv_apply(const GridFn& phi, const GridFn& h) const override;
    GridFn deriv_adjoint(const GridFn& phi, const CodomainElem& y) const override;
    LinearOperator linearize(const GridFn& phi) const override;

    /// Matrix K(u_i, z_j) of the derivative integrand (before z-quadrature).
    Matrix derivative_kernel(const GridFn& phi) const;

private:
    Matrix kernel(bool derivative, const GridFn& phi) const;
    void check_domain(const GridFn& phi) const;

    std::shared_ptr<const JointDensityGrid> density_;
    Grid1D u_grid_;
    OperatorForm form_;
    double scalar_weight_;
};

/// Instrumental quantile regression: F(phi)(w) = int G(phi(z), z, w) dz - q f_W(w),
/// one codomain node per level of W; the scalar row is identically zero.
class QuantileIVOperator final : public ForwardModel
{
public:
    QuantileIVOperator(std::shared_ptr<const JointDensityGrid> density, double q);

    const Grid1D& domain_grid() const override { return density_->z_grid(); }
    const Grid1D& codomain_grid() const override { return w_grid_; }

    CodomainElem apply(const GridFn& phi) const override;
    CodomainElem deriv_apply(const GridFn& phi, const GridFn& h) const override;
    GridFn deriv_adjoint(const GridFn& phi, const CodomainElem& y) const override;

    double q() const { return q_; }

private:
    std::shared_ptr<const JointDensityGrid> density_;
    Grid1D w_grid_;
    double q_;
};

} // namespace irgnm
