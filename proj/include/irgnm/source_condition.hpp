#pragma once

#include <variant>

namespace irgnm {

struct HolderIndex
{
    double mu = 0.5; // in (0, 1/2]
};

struct LogarithmicIndex
{
    double p = 1.0; // > 0
};

/// Index function Lambda of a variational source condition with multiplier beta.
/// beta only enters rate constants, never the solver.
class SourceCondition
{
public:
    using Kind = std::variant<HolderIndex, LogarithmicIndex>;

    static SourceCondition holder(double mu, double beta = 1.0);
    static SourceCondition logarithmic(double p, double beta = 1.0);

    const Kind& kind() const { return kind_; }
    double beta() const { return beta_; }

    /// Largest admissible argument of Lambda.
    double t_max() const;

private:
    SourceCondition(Kind k, double beta) : kind_(k), beta_(beta) {}

    Kind kind_;
    double beta_;
};

/// Lambda(t) = t^mu or (-ln t)^(-p).
double lambda_eval(const SourceCondition& sc, double t);

/// Theta(t) = sqrt(t) * Lambda(t).
double theta_eval(const SourceCondition& sc, double t);

/// Inverse of Theta by bisection on (0, t_max]; |Theta(result) - s| <= 1e-12 s.
double theta_inverse(const SourceCondition& sc, double s);

/// Lambda(max(Theta^{-1}(delta), gamma^2))^2, the order of the Bregman error.
double rate_bound(const SourceCondition& sc, double delta, double gamma);

/// 4 eta (1 + eta) (1 - eta)^{-3} < q^{-3/2}.
bool check_eta_q(double eta, double q);

} // namespace irgnm
