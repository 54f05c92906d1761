#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "irgnm/config.hpp"

namespace irgnm {

std::shared_ptr<const JointDensityGrid> build_exact_density(const RunConfig& cfg);
std::shared_ptr<const JointDensityGrid> build_kde_density(const RunConfig& cfg, const Sample& s);

/// u-grid with n_u nodes over [y_lo - max phi0, y_hi - min phi0], so that
/// u + phi0(z) sweeps the whole y-window.
Grid1D u_grid_for(const JointDensityGrid& d, const GridFn& phi0, Eigen::Index n_u);

/// The configured initial guess on the density's z-grid. A CSV is
/// interpolated linearly onto the grid.
GridFn resolve_phi0(const PenaltyConfig& p, const JointDensityGrid& d);

Penalty make_penalty(const PenaltyConfig& p, const GridFn& phi0);

struct EstimateResult
{
    IterateTrace trace;
    GridFn phi0;
    GridFn phi_true;
    double initial_error = 0;    // ||phi0 - phi_true||
    double absolute_error = 0;   // ||phi_K - phi_true||
    double normalized_error = 0; // absolute / initial
};

/// The configured phi0, operator and penalty, one IRGNM run; errors
/// against the design's true phi.
EstimateResult estimate(const RunConfig& cfg, std::shared_ptr<const JointDensityGrid> density);

/// trace.csv, phi_hat.csv, summary.json and overlay.svg in `dir`.
void write_estimate_artifacts(const std::string& dir, const RunConfig& cfg, const EstimateResult& r);
std::string estimate_summary_json(const EstimateResult& r);

/// Type-7 quantile of an ascending sequence, p in [0,1].
double quantile_sorted(const std::vector<double>& sorted, double p);

struct ReplicationResult
{
    std::size_t n = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    double error = 0; // normalized
    int stop_index = 0;
    std::string status; // stop reason, or the error message of a failed run
    GridFn phi_hat;
};

struct McRow
{
    std::size_t n = 0;
    double mean = 0;
    double p25 = 0, p50 = 0, p75 = 0, p90 = 0;
    int ok = 0;
    int failures = 0;
    int median_replication = -1; // replication whose error is the lower median
};

struct McReport
{
    std::vector<McRow> rows;
    std::vector<ReplicationResult> replications; // ordered by (n, replication)
    bool too_many_failures = false;              // more than 5% in any row
};

/// Replication r of sample size n uses the seed derived from (master_seed, stream)
/// with stream = n * 2^20 + r, so adding sizes or replications never changes
/// existing draws.
std::uint64_t replication_seed(const MonteCarloConfig& mc, std::size_t n, int r);

ReplicationResult run_replication(const RunConfig& cfg, std::size_t n, int r);
McReport run_montecarlo(const RunConfig& cfg, unsigned workers);

/// `n,mean,p25,p50,p75,p90`
void write_mc_table_csv(std::ostream& os, const McReport& rep);
/// `n,replication,seed,ok,error,stop_index,status`
void write_mc_errors_csv(std::ostream& os, const McReport& rep);
/// Table, per-replication errors, histograms and median reconstructions.
void write_montecarlo_artifacts(const std::string& dir, const RunConfig& cfg, const McReport& rep);

void ensure_directory(const std::string& dir);

} // namespace irgnm
