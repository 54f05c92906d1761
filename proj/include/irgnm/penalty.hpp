#pragma once

#include <limits>
#include <variant>

#include "irgnm/grid.hpp"

namespace irgnm {

/// R(phi) = ||phi - phi0||^2.
struct QuadraticPenalty
{
    GridFn phi0;
};

/// R(phi) = int phi ln phi, with phi clamped below at `floor`.
struct EntropyPenalty
{
    double floor = 1e-12;
};

/// Quadratic penalty plus the indicator of lower <= phi <= upper.
/// Either bound may be infinite.
struct BoxQuadraticPenalty
{
    GridFn phi0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

/// A convex, separable penalty functional on grid functions.
class Penalty
{
public:
    using Kind = std::variant<QuadraticPenalty, EntropyPenalty, BoxQuadraticPenalty>;

    Penalty(QuadraticPenalty p);
    Penalty(EntropyPenalty p);
    Penalty(BoxQuadraticPenalty p);

    static Penalty quadratic(GridFn phi0) { return Penalty(QuadraticPenalty{std::move(phi0)}); }
    static Penalty entropy(double floor = 1e-12) { return Penalty(EntropyPenalty{floor}); }
    static Penalty box(GridFn phi0, double lower, double upper)
    {
        return Penalty(BoxQuadraticPenalty{std::move(phi0), lower, upper});
    }

    const Kind& kind() const { return kind_; }
    bool is_quadratic() const { return std::holds_alternative<QuadraticPenalty>(kind_); }

    /// Center of the quadratic part, if any.
    const GridFn* center() const;

private:
    Kind kind_;
};

/// Dual element paired with primal grid functions through the trapezoid rule.
struct SubgradientElem
{
    Vector values;
};

/// +infinity encodes a violated constraint.
double penalty_eval(const Penalty& p, const GridFn& phi);

SubgradientElem subgradient(const Penalty& p, const GridFn& phi);

/// <g, h> with the same quadrature as the primal inner product.
double dual_pairing(const SubgradientElem& g, const GridFn& h);

/// R(phi) - R(psi) - <psi_star, phi - psi>.
double bregman(const Penalty& p, const GridFn& phi, const GridFn& psi, const SubgradientElem& psi_star);

/// argmin_phi ||phi - v||^2 + tau * R(phi), computed pointwise.
GridFn prox(const Penalty& p, const GridFn& v, double tau);

} // namespace irgnm
