#include "irgnm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "irgnm/parallel.hpp"
#include "irgnm/svg.hpp"

namespace irgnm {

namespace {

std::vector<double> to_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot write " + path);
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    return os;
}

} // namespace

void ensure_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create directory " + dir + ": " + ec.message());
}

std::shared_ptr<const JointDensityGrid> build_exact_density(const RunConfig& cfg)
{
    return std::make_shared<const JointDensityGrid>(exact_density(
        cfg.design, default_y_grid(cfg.design, cfg.grids.n_y), Grid1D(cfg.grids.n_z, 0.0, 1.0)));
}

std::shared_ptr<const JointDensityGrid> build_kde_density(const RunConfig& cfg, const Sample& s)
{
    KdeConfig k = cfg.kde;
    k.n_y = cfg.grids.n_y;
    k.n_z = cfg.grids.n_z;
    return std::make_shared<const JointDensityGrid>(kde_fit(s, k, kde_y_grid(s, k), Grid1D(k.n_z, 0.0, 1.0)));
}

Grid1D u_grid_for(const JointDensityGrid& d, const GridFn& phi0, Eigen::Index n_u)
{
    const double pmax = phi0.values().maxCoeff(), pmin = phi0.values().minCoeff();
    return Grid1D(n_u, d.y_grid().lo() - pmax, d.y_grid().hi() - pmin);
}

GridFn resolve_phi0(const PenaltyConfig& p, const JointDensityGrid& d)
{
    const Grid1D& zg = d.z_grid();
    if (p.phi0 == "mean") return GridFn::constant(zg, d.EY());
    if (p.phi0.rfind("constant:", 0) == 0) {
        const std::string text = p.phi0.substr(9);
        std::size_t used = 0;
        double c = 0;
        try {
            c = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() || !std::isfinite(c))
            throw Error(ErrorKind::parse, "penalty phi0: cannot read a number from '" + p.phi0 + "'");
        return GridFn::constant(zg, c);
    }
    const GridFn f = read_grid_fn_csv(p.phi0);
    if (f.grid().lo() > zg.lo() + 1e-9 || f.grid().hi() < zg.hi() - 1e-9)
        throw Error(ErrorKind::invalid_input, "penalty phi0: " + p.phi0 + " does not cover [0,1]");
    return GridFn::sample(zg, [&](double z) { return interp_eval(f, z, Extension::hold); });
}

Penalty make_penalty(const PenaltyConfig& p, const GridFn& phi0)
{
    switch (p.kind) {
    case PenaltyKind::quadratic:
        return Penalty::quadratic(phi0);
    case PenaltyKind::entropy:
        return Penalty::entropy(p.entropy_floor);
    case PenaltyKind::box:
        return Penalty::box(phi0, p.lower, p.upper);
    }
    return Penalty::quadratic(phi0);
}

EstimateResult estimate(const RunConfig& cfg, std::shared_ptr<const JointDensityGrid> density)
{
    const Grid1D& zg = density->z_grid();
    EstimateResult r;
    r.phi0 = resolve_phi0(cfg.penalty, *density);
    r.phi_true = GridFn::sample(zg, [&](double z) { return cfg.design.true_phi(z); });
    const Grid1D ug = u_grid_for(*density, r.phi0, cfg.grids.n_u);
    const BinaryIVOperator op(std::move(density), ug, cfg.op.form, cfg.op.scalar_weight);
    r.trace = irgnm_run(op, make_penalty(cfg.penalty, r.phi0), r.phi0, cfg.irgnm);
    r.initial_error = l2_norm(r.phi0 - r.phi_true);
    r.absolute_error = l2_norm(r.trace.selected() - r.phi_true);
    r.normalized_error = r.absolute_error / r.initial_error;
    return r;
}

std::string estimate_summary_json(const EstimateResult& r)
{
    nlohmann::json j = nlohmann::json::parse(trace_summary_json(r.trace));
    j["initial_error"] = r.initial_error;
    j["absolute_error"] = r.absolute_error;
    j["normalized_error"] = r.normalized_error;
    j["phi0"] = r.phi0[0];
    return j.dump(2);
}

void write_estimate_artifacts(const std::string& dir, const RunConfig& cfg, const EstimateResult& r)
{
    ensure_directory(dir);
    {
        auto os = open_out(dir + "/trace.csv");
        write_trace_csv(os, r.trace);
    }
    write_csv(dir + "/phi_hat.csv", r.trace.selected());
    {
        auto os = open_out(dir + "/summary.json");
        os << estimate_summary_json(r) << '\n';
    }
    const std::vector<double> z = to_std(r.phi0.grid().nodes());
    std::vector<double> naive;
    for (double zi : z) naive.push_back(cfg.design.naive_limit(zi));
    const std::vector<svg::Series> series{
        {"true phi", z, to_std(r.phi_true.values()), "#000000", false},
        {"initial guess", z, to_std(r.phi0.values()), "#7f7f7f", true},
        {"estimate", z, to_std(r.trace.selected().values()), "#d62728", false},
        {"naive regression", z, naive, "#2ca02c", true}};
    svg::write_file(dir + "/overlay.svg", svg::line_chart(series, {"Reconstruction", "z", "phi(z)"}));
}

double quantile_sorted(const std::vector<double>& sorted, double p)
{
    if (sorted.empty()) throw Error(ErrorKind::invalid_input, "quantile of an empty sample");
    if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::invalid_input, "quantile level outside [0,1]");
    const double h = p * double(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

std::uint64_t replication_seed(const MonteCarloConfig& mc, std::size_t n, int r)
{
    return derive_seed(mc.master_seed, (static_cast<std::uint64_t>(n) << 20) + static_cast<std::uint64_t>(r));
}

ReplicationResult run_replication(const RunConfig& cfg, std::size_t n, int r)
{
    ReplicationResult out;
    out.n = n;
    out.replication = r;
    out.seed = replication_seed(cfg.montecarlo, n, r);
    try {
        const Sample s = sample(cfg.design, n, out.seed);
        const EstimateResult est = estimate(cfg, build_kde_density(cfg, s));
        out.stop_index = est.trace.stop_index;
        out.status = est.trace.stop_reason;
        out.ok = std::isfinite(est.normalized_error) && est.trace.stop_reason != "numerical_blowup" &&
                 est.trace.stop_reason != "subproblem_failure";
        out.error = est.normalized_error;
        out.phi_hat = est.trace.selected();
    } catch (const Error& e) {
        out.ok = false;
        out.status = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return out;
}

McReport run_montecarlo(const RunConfig& cfg, unsigned workers)
{
    cfg.validate();
    const auto& mc = cfg.montecarlo;
    const std::size_t R = static_cast<std::size_t>(mc.replications);
    McReport rep;
    rep.replications.resize(mc.n_list.size() * R);
    parallel_for(rep.replications.size(), workers, [&](std::size_t i) {
        rep.replications[i] = run_replication(cfg, mc.n_list[i / R], static_cast<int>(i % R));
    });

    for (std::size_t k = 0; k < mc.n_list.size(); ++k) {
        McRow row;
        row.n = mc.n_list[k];
        std::vector<std::pair<double, int>> ok;
        for (std::size_t r = 0; r < R; ++r) {
            const ReplicationResult& x = rep.replications[k * R + r];
            if (x.ok)
                ok.emplace_back(x.error, x.replication);
            else
                ++row.failures;
        }
        row.ok = static_cast<int>(ok.size());
        if (!ok.empty()) {
            std::sort(ok.begin(), ok.end());
            std::vector<double> e;
            for (const auto& [err, id] : ok) e.push_back(err);
            double sum = 0;
            for (double v : e) sum += v;
            row.mean = sum / double(e.size());
            row.p25 = quantile_sorted(e, 0.25);
            row.p50 = quantile_sorted(e, 0.5);
            row.p75 = quantile_sorted(e, 0.75);
            row.p90 = quantile_sorted(e, 0.9);
            row.median_replication = ok[(ok.size() - 1) / 2].second;
        }
        if (row.ok == 0 || double(row.failures) > 0.05 * double(R)) rep.too_many_failures = true;
        rep.rows.push_back(row);
    }
    return rep;
}

void write_mc_table_csv(std::ostream& os, const McReport& rep)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "n,mean,p25,p50,p75,p90\n";
    for (const McRow& r : rep.rows)
        os << r.n << ',' << r.mean << ',' << r.p25 << ',' << r.p50 << ',' << r.p75 << ',' << r.p90 << '\n';
}

void write_mc_errors_csv(std::ostream& os, const McReport& rep)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "n,replication,seed,ok,error,stop_index,status\n";
    for (const ReplicationResult& r : rep.replications) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), '"', '\'');
        os << r.n << ',' << r.replication << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',' << r.error << ','
           << r.stop_index << ",\"" << status << "\"\n";
    }
}

void write_montecarlo_artifacts(const std::string& dir, const RunConfig& cfg, const McReport& rep)
{
    ensure_directory(dir);
    {
        auto os = open_out(dir + "/table.csv");
        write_mc_table_csv(os, rep);
    }
    {
        auto os = open_out(dir + "/errors.csv");
        write_mc_errors_csv(os, rep);
    }
    nlohmann::json summary = nlohmann::json::array();
    const std::size_t R = static_cast<std::size_t>(cfg.montecarlo.replications);
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const McRow& row = rep.rows[k];
        summary.push_back({{"n", row.n},
                           {"mean", row.mean},
                           {"p25", row.p25},
                           {"p50", row.p50},
                           {"p75", row.p75},
                           {"p90", row.p90},
                           {"ok", row.ok},
                           {"failures", row.failures},
                           {"median_replication", row.median_replication}});
        const std::string tag = std::to_string(row.n);
        std::vector<double> errs;
        for (std::size_t r = 0; r < R; ++r)
            if (rep.replications[k * R + r].ok) errs.push_back(rep.replications[k * R + r].error);
        svg::write_file(dir + "/hist_" + tag + ".svg",
                        svg::histogram(errs, 20, {"Normalized error, n = " + tag, "normalized L2 error", "count"}));
        if (row.median_replication < 0) continue;
        const GridFn& med = rep.replications[k * R + static_cast<std::size_t>(row.median_replication)].phi_hat;
        write_csv(dir + "/median_" + tag + ".csv", med);
        const std::vector<double> z = to_std(med.grid().nodes());
        std::vector<double> truth;
        for (double zi : z) truth.push_back(cfg.design.true_phi(zi));
        svg::write_file(dir + "/median_" + tag + ".svg",
                        svg::line_chart({{"true phi", z, truth, "#000000", false},
                                         {"median reconstruction", z, to_std(med.values()), "#d62728", false}},
                                        {"Median reconstruction, n = " + tag, "z", "phi(z)"}));
    }
    auto os = open_out(dir + "/summary.json");
    os << nlohmann::json{{"rows", summary}, {"too_many_failures", rep.too_many_failures}}.dump(2) << '\n';
}

} // namespace irgnm
