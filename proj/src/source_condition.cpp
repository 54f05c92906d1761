#include "irgnm/source_condition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irgnm/error.hpp"

namespace irgnm {

SourceCondition SourceCondition::holder(double mu, double beta)
{
    if (!(mu > 0 && mu <= 0.5)) throw Error(ErrorKind::invalid_input, "Holder exponent must lie in (0, 1/2]");
    if (!(beta > 0)) throw Error(ErrorKind::invalid_input, "source condition multiplier must be positive");
    return SourceCondition(HolderIndex{mu}, beta);
}

SourceCondition SourceCondition::logarithmic(double p, double beta)
{
    if (!(p > 0)) throw Error(ErrorKind::invalid_input, "logarithmic exponent must be positive");
    if (!(beta > 0)) throw Error(ErrorKind::invalid_input, "source condition multiplier must be positive");
    return SourceCondition(LogarithmicIndex{p}, beta);
}

double SourceCondition::t_max() const
{
    if (std::holds_alternative<LogarithmicIndex>(kind_)) return std::exp(-1.0);
    return std::numeric_limits<double>::infinity();
}

double lambda_eval(const SourceCondition& sc, double t)
{
    if (!(t > 0)) throw Error(ErrorKind::invalid_input, "Lambda is evaluated at t > 0 only");
    if (const auto* h = std::get_if<HolderIndex>(&sc.kind())) return std::pow(t, h->mu);
    const auto& l = std::get<LogarithmicIndex>(sc.kind());
    // operators are assumed scaled so that ||T*T|| <= exp(-1)
    if (t > std::exp(-1.0) * (1 + 1e-15))
        throw Error(ErrorKind::invalid_input, "logarithmic Lambda requires t <= exp(-1)");
    return std::pow(-std::log(t), -l.p);
}

double theta_eval(const SourceCondition& sc, double t)
{
    return std::sqrt(t) * lambda_eval(sc, t);
}

double theta_inverse(const SourceCondition& sc, double s)
{
    if (!(s > 0)) throw Error(ErrorKind::invalid_input, "Theta^{-1} needs s > 0");
    if (std::holds_alternative<LogarithmicIndex>(sc.kind()) && s > theta_eval(sc, sc.t_max()))
        throw Error(ErrorKind::invalid_input, "s exceeds the range of Theta on (0, exp(-1)]");

    // bisection in log t keeps relative accuracy over many decades
    double lo = std::log(std::numeric_limits<double>::min());
    double hi = std::isfinite(sc.t_max()) ? std::log(sc.t_max()) : 0.0;
    while (!std::isfinite(sc.t_max()) && theta_eval(sc, std::exp(hi)) < s) hi = 2 * hi + 1;
    if (theta_eval(sc, std::exp(lo)) > s)
        throw Error(ErrorKind::invalid_input, "s is below the representable range of Theta");
    for (int it = 0; it < 400 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (theta_eval(sc, std::exp(mid)) < s) lo = mid; else hi = mid;
    }
    const double tl = std::exp(lo), th = std::exp(hi);
    return std::abs(theta_eval(sc, tl) - s) <= std::abs(theta_eval(sc, th) - s) ? tl : th;
}

double rate_bound(const SourceCondition& sc, double delta, double gamma)
{
    if (!(delta >= 0 && gamma >= 0)) throw Error(ErrorKind::invalid_input, "noise levels must be non-negative");
    if (delta == 0 && gamma == 0) throw Error(ErrorKind::invalid_input, "rate bound degenerates for delta = gamma = 0");
    const double a = delta > 0 ? theta_inverse(sc, delta) : 0.0;
    const double level = std::max(a, gamma * gamma);
    const double lam = lambda_eval(sc, level);
    return lam * lam;
}

bool check_eta_q(double eta, double q)
{
    if (!(eta >= 0 && eta < 1)) throw Error(ErrorKind::invalid_input, "eta must lie in [0, 1)");
    if (!(q > 1)) throw Error(ErrorKind::invalid_input, "q must exceed 1");
    const double lhs = 4 * eta * (1 + eta) / std::pow(1 - eta, 3);
    return lhs < std::pow(q, -1.5);
}

} // namespace irgnm
