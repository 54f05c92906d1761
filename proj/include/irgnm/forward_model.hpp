#pragma once

#include <functional>

#include "irgnm/grid.hpp"

namespace irgnm {

/// A bounded linear map X -> Y together with its adjoint with respect to the
/// trapezoid inner products (and the scalar-row weight on Y).
struct LinearOperator
{
    Grid1D domain;
    Grid1D codomain;
    double scalar_weight = 1.0;
    std::function<CodomainElem(const GridFn&)> apply;
    std::function<GridFn(const CodomainElem&)> adjoint;

    GridFn normal(const GridFn& h) const { return adjoint(apply(h)); }
};

/// Estimated operator F-hat with Gateaux derivative and its adjoint.
class ForwardModel
{
public:
    virtual ~ForwardModel() = default;

    virtual const Grid1D& domain_grid() const = 0;
    virtual const Grid1D& codomain_grid() const = 0;
    virtual double scalar_weight() const { return 1.0; }

    virtual CodomainElem apply(const GridFn& phi) const = 0;
    virtual CodomainElem deriv_apply(const GridFn& phi, const GridFn& h) const = 0;
    virtual GridFn deriv_adjoint(const GridFn& phi, const CodomainElem& y) const = 0;

    /// F'[phi] frozen at phi. Models override this when the derivative can be
    /// tabulated once and reused across a whole subproblem solve.
    virtual LinearOperator linearize(const GridFn& phi) const;

    double residual_norm(const GridFn& phi) const { return codomain_norm(apply(phi), scalar_weight()); }
};

inline LinearOperator ForwardModel::linearize(const GridFn& phi) const
{
    LinearOperator op;
    op.domain = domain_grid();
    op.codomain = codomain_grid();
    op.scalar_weight = scalar_weight();
    op.apply = [this, phi](const GridFn& h) { return deriv_apply(phi, h); };
    op.adjoint = [this, phi](const CodomainElem& y) { return deriv_adjoint(phi, y); };
    return op;
}

// Codomain arithmetic used by the solvers.
inline CodomainElem operator+(const CodomainElem& a, const CodomainElem& b)
{
    return {a.ufun + b.ufun, a.scalar + b.scalar};
}

inline CodomainElem operator-(const CodomainElem& a, const CodomainElem& b)
{
    return {a.ufun - b.ufun, a.scalar - b.scalar};
}

inline CodomainElem operator*(double s, const CodomainElem& a)
{
    return {s * a.ufun, s * a.scalar};
}

} // namespace irgnm
