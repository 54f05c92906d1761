#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "irgnm/forward_model.hpp"
#include "irgnm/penalty.hpp"
#include "irgnm/source_condition.hpp"

namespace irgnm {

struct CgSolver
{
    int max_iter = 2000;
    double tol = 1e-8;
};

struct FistaSolver
{
    int max_iter = 5000;
    double tol = 1e-8;
    int power_iters = 20;
    double lipschitz_safety = 1.1;
};

/// Balancing rule over the computed iterates; noise proxy rho_k = kappa * delta / sqrt(alpha_k).
struct LepskiiStop
{
    double kappa = 1.0;
    std::optional<double> delta_proxy; // final residual norm when absent
};

struct APrioriStop
{
    double delta = 0;
    double gamma = 0;
    SourceCondition sc = SourceCondition::holder(0.5);
};

struct FixedStop
{
    int K = 1;
};

struct IrgnmConfig
{
    double alpha0 = 1.0;
    double ratio = 0.9; // alpha_{k+1} = ratio * alpha_k
    int k_max = 100;
    std::variant<CgSolver, FistaSolver> subproblem = CgSolver{};
    std::variant<LepskiiStop, APrioriStop, FixedStop> stopping = LepskiiStop{};
    double eta = 0.0; // tangential cone constant, only reported

    void validate() const;
};

struct IterateRecord
{
    int k = 0;
    double alpha = 0;
    GridFn phi;
    double residual_norm = 0;
    int subproblem_iters = 0;
    double kkt_residual = 0;
};

struct IterateTrace
{
    std::vector<IterateRecord> records;
    int stop_index = 0;
    std::string stop_reason;
    bool eta_admissible = true;

    const GridFn& selected() const { return records.at(static_cast<std::size_t>(stop_index)).phi; }
    int last_index() const { return static_cast<int>(records.size()) - 1; }
};

struct SubproblemResult
{
    GridFn phi;
    int iters = 0;
    double kkt_residual = 0;
    bool converged = false;
};

/// alpha0 * ratio^k.
double alpha_schedule(const IrgnmConfig& cfg, int k);

/// argmin ||T(phi - phi_prev) + b||^2 + alpha ||phi - phi0||^2 by conjugate
/// gradients on the normal equations, warm-started at phi_prev.
SubproblemResult solve_subproblem_quadratic(const LinearOperator& T, const CodomainElem& b, double alpha,
                                            const GridFn& phi0, const GridFn& phi_prev, double tol,
                                            int max_iter);

/// Same objective with alpha * R(phi) for any prox-capable penalty, by FISTA
/// with gradient-based restart.
SubproblemResult solve_subproblem_convex(const LinearOperator& T, const CodomainElem& b, double alpha,
                                         const Penalty& p, const GridFn& phi_prev, const FistaSolver& opts);

/// Largest eigenvalue of T*T by power iteration.
double normal_operator_norm(const LinearOperator& T, int iters);

/// Smallest K >= 0 with alpha_{K+1} <= max(Theta^{-1}(delta), gamma^2).
int a_priori_stop_index(const IrgnmConfig& cfg, const SourceCondition& sc, double delta, double gamma);

/// Smallest k with ||phi_m - phi_k|| <= 4 rho(m) for every later m.
int lepskii_stop(const IterateTrace& trace, const std::function<double(int)>& rho);
int lepskii_stop(const IterateTrace& trace, double kappa, double delta_proxy);

IterateTrace irgnm_run(const ForwardModel& model, const Penalty& p, const GridFn& phi_start,
                       const IrgnmConfig& cfg);

/// `k,alpha,residual_norm,subproblem_iters,kkt_residual`
void write_trace_csv(std::ostream& os, const IterateTrace& trace);
std::string trace_summary_json(const IterateTrace& trace);

} // namespace irgnm
