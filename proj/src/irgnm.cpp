#include "irgnm/irgnm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

namespace irgnm {

void IrgnmConfig::validate() const
{
    if (!(alpha0 > 0)) throw Error(ErrorKind::invalid_input, "alpha0 must be positive");
    if (!(ratio > 0 && ratio < 1)) throw Error(ErrorKind::invalid_input, "ratio must lie in (0, 1)");
    if (k_max < 1) throw Error(ErrorKind::invalid_input, "k_max must be at least 1");
    if (!(eta >= 0 && eta < 1)) throw Error(ErrorKind::invalid_input, "eta must lie in [0, 1)");
    if (const auto* l = std::get_if<LepskiiStop>(&stopping)) {
        if (!(l->kappa > 0)) throw Error(ErrorKind::invalid_input, "Lepskii kappa must be positive");
        if (l->delta_proxy && !(*l->delta_proxy > 0))
            throw Error(ErrorKind::invalid_input, "Lepskii delta proxy must be positive");
    }
    if (const auto* f = std::get_if<FixedStop>(&stopping); f && f->K < 0)
        throw Error(ErrorKind::invalid_input, "fixed stop index must be non-negative");
}

double alpha_schedule(const IrgnmConfig& cfg, int k)
{
    if (k < 0) throw Error(ErrorKind::invalid_input, "alpha_schedule: k must be non-negative");
    return cfg.alpha0 * std::pow(cfg.ratio, k);
}

SubproblemResult solve_subproblem_quadratic(const LinearOperator& T, const CodomainElem& b, double alpha,
                                            const GridFn& phi0, const GridFn& phi_prev, double tol,
                                            int max_iter)
{
    if (!(alpha > 0)) throw Error(ErrorKind::invalid_input, "subproblem: alpha must be positive");
    const Grid1D& grid = T.domain;
    auto normal = [&](const Vector& v) -> Vector {
        return T.normal(GridFn(grid, v)).values() + alpha * v;
    };
    auto dot = [&](const Vector& a, const Vector& c) { return weighted_dot(grid, a, c); };

    // (T*T + alpha I) phi = T*(T phi_prev - b) + alpha phi0
    const CodomainElem tprev = T.apply(phi_prev);
    const Vector rhs = T.adjoint(tprev - b).values() + alpha * phi0.values();
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    const double target = tol * (1.0 + rhs_norm);

    Vector x = phi_prev.values();
    Vector r = rhs - normal(x);
    Vector p = r;
    double rr = dot(r, r);
    int it = 0;
    for (; it < max_iter && std::sqrt(rr) > target; ++it) {
        const Vector Ap = normal(p);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0)) break;
        const double step = rr / pAp;
        x += step * p;
        r -= step * Ap;
        const double rr_next = dot(r, r);
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    const Vector true_r = rhs - normal(x);
    SubproblemResult out;
    out.kkt_residual = std::sqrt(dot(true_r, true_r));
    out.iters = it;
    out.converged = out.kkt_residual <= 10 * target || std::sqrt(rr) <= target;
    out.phi = GridFn(grid, std::move(x));
    return out;
}

double normal_operator_norm(const LinearOperator& T, int iters)
{
    const Grid1D& grid = T.domain;
    std::mt19937_64 gen(0x5eed);
    std::normal_distribution<double> nd;
    Vector v(grid.size());
    for (auto& x : v) x = nd(gen);
    double lam = 0;
    for (int i = 0; i < iters; ++i) {
        const double nv = std::sqrt(weighted_dot(grid, v, v));
        if (nv == 0) return 0;
        v /= nv;
        const Vector w = T.normal(GridFn(grid, v)).values();
        lam = weighted_dot(grid, v, w);
        v = w;
    }
    return std::max(lam, 0.0);
}

SubproblemResult solve_subproblem_convex(const LinearOperator& T, const CodomainElem& b, double alpha,
                                         const Penalty& p, const GridFn& phi_prev, const FistaSolver& opts)
{
    if (!(alpha > 0)) throw Error(ErrorKind::invalid_input, "subproblem: alpha must be positive");
    const Grid1D& grid = T.domain;
    auto norm = [&](const Vector& v) { return std::sqrt(weighted_dot(grid, v, v)); };

    // h(phi) = ||T(phi - phi_prev) + b||^2, grad h = 2 T*(T(phi - phi_prev) + b)
    const CodomainElem tprev = T.apply(phi_prev);
    auto grad = [&](const Vector& y) -> Vector {
        const CodomainElem r = T.apply(GridFn(grid, y)) - tprev + b;
        return 2.0 * T.adjoint(r).values();
    };

    const double lam = normal_operator_norm(T, opts.power_iters);
    const double L = std::max(2.0 * lam * opts.lipschitz_safety, 1e-12);
    const double tau = 2.0 * alpha / L;

    Vector x = phi_prev.values();
    Vector y = x;
    double t = 1.0;
    SubproblemResult out;
    out.converged = false;
    int it = 0;
    double res = std::numeric_limits<double>::infinity();
    for (; it < opts.max_iter; ++it) {
        const Vector v = y - grad(y) / L;
        Vector x_next = prox(p, GridFn(grid, v), tau).values();
        const Vector step = x_next - y;
        res = norm(step) / (1.0 + norm(x_next));
        if (res <= opts.tol) {
            x = std::move(x_next);
            out.converged = true;
            ++it;
            break;
        }
        // restart momentum when it points uphill
        if (weighted_dot(grid, Vector(y - x_next), Vector(x_next - x)) > 0) {
            t = 1.0;
            y = x_next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x_next + ((t - 1.0) / t_next) * (x_next - x);
            t = t_next;
        }
        x = std::move(x_next);
    }
    out.iters = it;
    out.kkt_residual = res;
    out.phi = GridFn(grid, std::move(x));
    return out;
}

int a_priori_stop_index(const IrgnmConfig& cfg, const SourceCondition& sc, double delta, double gamma)
{
    cfg.validate();
    if (!(delta >= 0 && gamma >= 0)) throw Error(ErrorKind::invalid_input, "noise levels must be non-negative");
    const double level = std::max(delta > 0 ? theta_inverse(sc, delta) : 0.0, gamma * gamma);
    if (!(level > 0)) throw Error(ErrorKind::invalid_input, "a-priori stopping needs delta > 0 or gamma > 0");
    if (!(cfg.alpha0 > level))
        throw Error(ErrorKind::invalid_input,
                    "a-priori stopping requires alpha0 > max(Theta^{-1}(delta), gamma^2)");
    // ties within the accuracy of Theta^{-1} count as met
    const double threshold = level * (1.0 + 1e-12);
    int K = 0;
    while (alpha_schedule(cfg, K + 1) > threshold) ++K;
    return K;
}

int lepskii_stop(const IterateTrace& trace, const std::function<double(int)>& rho)
{
    const int last = trace.last_index();
    if (last <= 0) return 0;
    for (int k = 0; k <= last; ++k) {
        bool ok = true;
        for (int m = k + 1; m <= last && ok; ++m) {
            const double d = l2_norm(trace.records[m].phi - trace.records[k].phi);
            ok = d <= 4.0 * rho(m);
        }
        if (ok) return k;
    }
    return last;
}

int lepskii_stop(const IterateTrace& trace, double kappa, double delta_proxy)
{
    return lepskii_stop(trace, [&](int m) {
        return kappa * delta_proxy / std::sqrt(trace.records[static_cast<std::size_t>(m)].alpha);
    });
}

IterateTrace irgnm_run(const ForwardModel& model, const Penalty& p, const GridFn& phi_start,
                       const IrgnmConfig& cfg)
{
    cfg.validate();
    if (!std::isfinite(penalty_eval(p, phi_start)))
        throw Error(ErrorKind::invalid_input, "initial guess is outside the penalty domain");
    if (std::holds_alternative<CgSolver>(cfg.subproblem) && !p.is_quadratic())
        throw Error(ErrorKind::invalid_input, "the CG subproblem solver needs the quadratic penalty");

    IterateTrace trace;
    trace.eta_admissible = check_eta_q(cfg.eta, 1.0 / cfg.ratio);

    int wanted = cfg.k_max;
    std::string rule = "lepskii";
    if (const auto* a = std::get_if<APrioriStop>(&cfg.stopping)) {
        wanted = a_priori_stop_index(cfg, a->sc, a->delta, a->gamma);
        rule = "a_priori";
    } else if (const auto* f = std::get_if<FixedStop>(&cfg.stopping)) {
        wanted = f->K;
        rule = "fixed";
    }
    const int k_stop = std::min(cfg.k_max, wanted);

    CodomainElem residual = model.apply(phi_start);
    trace.records.push_back({0, alpha_schedule(cfg, 0), phi_start,
                             codomain_norm(residual, model.scalar_weight()), 0, 0.0});

    std::string failure;
    for (int k = 1; k <= k_stop; ++k) {
        const double alpha = alpha_schedule(cfg, k);
        const GridFn& prev = trace.records.back().phi;
        SubproblemResult sub;
        try {
            const LinearOperator T = model.linearize(prev);
            if (const auto* cg = std::get_if<CgSolver>(&cfg.subproblem))
                sub = solve_subproblem_quadratic(T, residual, alpha, *p.center(), prev, cg->tol, cg->max_iter);
            else
                sub = solve_subproblem_convex(T, residual, alpha, p, prev, std::get<FistaSolver>(cfg.subproblem));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            failure = "numerical_blowup";
            break;
        }
        if (!sub.converged) {
            failure = "subproblem_failure";
            break;
        }
        try {
            residual = model.apply(sub.phi);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            failure = "numerical_blowup";
            break;
        }
        const double rnorm = codomain_norm(residual, model.scalar_weight());
        if (!std::isfinite(rnorm)) {
            failure = "numerical_blowup";
            break;
        }
        trace.records.push_back({k, alpha, std::move(sub.phi), rnorm, sub.iters, sub.kkt_residual});
    }

    const int last = trace.last_index();
    if (!failure.empty()) {
        trace.stop_reason = failure;
        trace.stop_index = last;
        return trace;
    }
    if (const auto* l = std::get_if<LepskiiStop>(&cfg.stopping)) {
        const double delta = l->delta_proxy.value_or(trace.records.back().residual_norm);
        trace.stop_index = delta > 0 ? lepskii_stop(trace, l->kappa, delta) : last;
        trace.stop_reason = rule;
    } else {
        trace.stop_index = last;
        trace.stop_reason = wanted > cfg.k_max ? "k_max" : rule;
    }
    return trace;
}

void write_trace_csv(std::ostream& os, const IterateTrace& trace)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "k,alpha,residual_norm,subproblem_iters,kkt_residual\n";
    for (const auto& r : trace.records)
        os << r.k << ',' << r.alpha << ',' << r.residual_norm << ',' << r.subproblem_iters << ','
           << r.kkt_residual << '\n';
}

std::string trace_summary_json(const IterateTrace& trace)
{
    nlohmann::json j;
    j["stop_index"] = trace.stop_index;
    j["stop_reason"] = trace.stop_reason;
    j["iterations"] = trace.last_index();
    j["eta_admissible"] = trace.eta_admissible;
    j["selected_alpha"] = trace.records.at(static_cast<std::size_t>(trace.stop_index)).alpha;
    j["selected_residual_norm"] = trace.records.at(static_cast<std::size_t>(trace.stop_index)).residual_norm;
    return j.dump(2);
}

} // namespace irgnm
