#include "irgnm/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace irgnm {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_same_grid(const GridFn& a, const GridFn& b, const char* what)
{
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::invalid_input, std::string(what) + ": grid mismatch");
}

bool inside_box(const GridFn& phi, double lower, double upper)
{
    return (phi.values().array() >= lower).all() && (phi.values().array() <= upper).all();
}

// Root of 2(t - v) + tau (ln t + 1) = 0 for t > 0. Newton in s = ln t,
// safeguarded by a bracket; the left side is increasing in s.
double entropy_prox_scalar(double v, double tau)
{
    auto g = [&](double s) { return 2.0 * (std::exp(s) - v) + tau * (s + 1.0); };
    double lo = -1.0, hi = 1.0;
    while (g(lo) > 0) lo *= 2.0;
    while (g(hi) < 0) hi *= 2.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gs = g(s);
        if (gs > 0) hi = s; else lo = s;
        const double ds = 2.0 * std::exp(s) + tau;
        double next = s - gs / ds;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s))) {
            s = next;
            break;
        }
        s = next;
    }
    return std::exp(s);
}

} // namespace

Penalty::Penalty(QuadraticPenalty p)
    : kind_(std::move(p))
{}

Penalty::Penalty(EntropyPenalty p)
    : kind_(p)
{
    if (!(p.floor > 0)) throw Error(ErrorKind::invalid_input, "entropy floor must be positive");
}

Penalty::Penalty(BoxQuadraticPenalty p)
    : kind_(std::move(p))
{
    const auto& b = std::get<BoxQuadraticPenalty>(kind_);
    if (!(b.lower < b.upper)) throw Error(ErrorKind::invalid_input, "box penalty needs lower < upper");
}

const GridFn* Penalty::center() const
{
    if (auto* q = std::get_if<QuadraticPenalty>(&kind_)) return &q->phi0;
    if (auto* b = std::get_if<BoxQuadraticPenalty>(&kind_)) return &b->phi0;
    return nullptr;
}

double penalty_eval(const Penalty& p, const GridFn& phi)
{
    return std::visit(
        overloaded{
            [&](const QuadraticPenalty& q) {
                require_same_grid(phi, q.phi0, "penalty_eval");
                const Vector d = phi.values() - q.phi0.values();
                return weighted_dot(phi.grid(), d, d);
            },
            [&](const EntropyPenalty& e) {
                const Vector t = phi.values().cwiseMax(e.floor);
                const Vector tlogt = (t.array() * t.array().log()).matrix();
                return weighted_dot(phi.grid(), tlogt, Vector::Ones(phi.size()));
            },
            [&](const BoxQuadraticPenalty& b) {
                require_same_grid(phi, b.phi0, "penalty_eval");
                if (!inside_box(phi, b.lower, b.upper)) return std::numeric_limits<double>::infinity();
                const Vector d = phi.values() - b.phi0.values();
                return weighted_dot(phi.grid(), d, d);
            },
        },
        p.kind());
}

SubgradientElem subgradient(const Penalty& p, const GridFn& phi)
{
    return std::visit(
        overloaded{
            [&](const QuadraticPenalty& q) {
                require_same_grid(phi, q.phi0, "subgradient");
                return SubgradientElem{2.0 * (phi.values() - q.phi0.values())};
            },
            [&](const EntropyPenalty& e) {
                return SubgradientElem{(phi.values().cwiseMax(e.floor).array().log() + 1.0).matrix()};
            },
            [&](const BoxQuadraticPenalty& b) {
                require_same_grid(phi, b.phi0, "subgradient");
                if (!inside_box(phi, b.lower, b.upper))
                    throw Error(ErrorKind::invalid_input, "subgradient: point violates the box constraint");
                return SubgradientElem{2.0 * (phi.values() - b.phi0.values())};
            },
        },
        p.kind());
}

double dual_pairing(const SubgradientElem& g, const GridFn& h)
{
    if (g.values.size() != h.size()) throw Error(ErrorKind::invalid_input, "dual_pairing: size mismatch");
    return weighted_dot(h.grid(), g.values, h.values());
}

double bregman(const Penalty& p, const GridFn& phi, const GridFn& psi, const SubgradientElem& psi_star)
{
    require_same_grid(phi, psi, "bregman");
    const double r_phi = penalty_eval(p, phi);
    const double r_psi = penalty_eval(p, psi);
    if (!std::isfinite(r_phi) || !std::isfinite(r_psi))
        throw Error(ErrorKind::invalid_input, "bregman: penalty is infinite at an argument");
    if (p.is_quadratic() || std::holds_alternative<BoxQuadraticPenalty>(p.kind())) {
        // closed form avoids cancellation between the two penalty values
        const Vector d = phi.values() - psi.values();
        const Vector expected_grad = 2.0 * (psi.values() - p.center()->values());
        const Vector gap = expected_grad - psi_star.values;
        return weighted_dot(phi.grid(), d, d) + weighted_dot(phi.grid(), gap, d);
    }
    return r_phi - r_psi - dual_pairing(psi_star, phi - psi);
}

GridFn prox(const Penalty& p, const GridFn& v, double tau)
{
    if (!(tau > 0)) throw Error(ErrorKind::invalid_input, "prox: tau must be positive");
    return std::visit(
        overloaded{
            [&](const QuadraticPenalty& q) {
                require_same_grid(v, q.phi0, "prox");
                return v.with_values((v.values() + tau * q.phi0.values()) / (1.0 + tau));
            },
            [&](const EntropyPenalty&) {
                Vector out(v.size());
                for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = entropy_prox_scalar(v[i], tau);
                return v.with_values(std::move(out));
            },
            [&](const BoxQuadraticPenalty& b) {
                require_same_grid(v, b.phi0, "prox");
                // 1-D strictly convex quadratic: the constrained minimizer is the
                // projection of the unconstrained one
                const Vector shrunk = (v.values() + tau * b.phi0.values()) / (1.0 + tau);
                return v.with_values(shrunk.cwiseMax(b.lower).cwiseMin(b.upper));
            },
        },
        p.kind());
}

} // namespace irgnm
