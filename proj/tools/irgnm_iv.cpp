// irgnm-iv: command-line driver for the binary-instrument simulation study.
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <json.hpp>

#include "irgnm/config.hpp"
#include "irgnm/diagnostics.hpp"
#include "irgnm/parallel.hpp"
#include "irgnm/pipeline.hpp"
#include "irgnm/svg.hpp"

using namespace irgnm;
using nlohmann::json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

int report_error(ErrorKind kind, const std::string& message)
{
    std::cerr << json{{"kind", std::string(to_string(kind))}, {"message", message}}.dump() << '\n';
    return kind == ErrorKind::numerical ? kExitNumerical : kExitInput;
}

RunConfig resolve_config(const std::string& path, const std::vector<std::string>& extras)
{
    json doc = path.empty() ? json::object() : load_json_file(path);
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& flag = extras[i];
        if (flag.rfind("--", 0) != 0 || flag.size() < 3)
            throw Error(ErrorKind::invalid_input, "unexpected argument '" + flag + "'");
        std::string key = flag.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= extras.size()) throw Error(ErrorKind::invalid_input, "override " + flag + " needs a value");
            value = extras[++i];
        }
        apply_override(doc, key, value);
    }
    return run_config_from_json(doc);
}

std::vector<double> as_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

int cmd_simulate(const RunConfig& cfg, const std::string& out)
{
    const std::string path = out.empty() ? cfg.output_dir + "/sample.csv" : out;
    if (out.empty()) ensure_directory(cfg.output_dir);
    const Sample s = sample(cfg.design, cfg.simulate.n, cfg.simulate.seed);
    write_sample_csv(path, s);
    std::cout << json{{"sample", path}, {"n", s.size()}, {"seed", cfg.simulate.seed}}.dump(2) << '\n';
    return 0;
}

int cmd_kde(const RunConfig& cfg, const std::string& input, const std::string& out)
{
    if (input.empty()) throw Error(ErrorKind::invalid_input, "kde needs --input sample.csv");
    const auto density = build_kde_density(cfg, read_sample_csv(input));
    const std::string stem = out.empty() ? cfg.output_dir + "/density" : out;
    if (out.empty()) ensure_directory(cfg.output_dir);
    write_density_bundle(stem, *density);
    std::cout << json{{"density", stem + ".json"}, {"w0", density->w0()}, {"EY", density->EY()}}.dump(2) << '\n';
    return 0;
}

int cmd_estimate(const RunConfig& cfg, const std::string& input)
{
    const bool exact = input.empty() || input == "exact";
    const auto density = exact ? build_exact_density(cfg) : build_kde_density(cfg, read_sample_csv(input));
    const EstimateResult r = estimate(cfg, density);
    const std::string dir = cfg.output_dir + "/estimate";
    write_estimate_artifacts(dir, cfg, r);
    std::cout << estimate_summary_json(r) << '\n';
    const std::string& reason = r.trace.stop_reason;
    return reason == "numerical_blowup" || reason == "subproblem_failure" ? kExitNumerical : 0;
}

int cmd_montecarlo(const RunConfig& cfg)
{
    const McReport rep = run_montecarlo(cfg, worker_count());
    const std::string dir = cfg.output_dir + "/montecarlo";
    write_montecarlo_artifacts(dir, cfg, rep);
    std::cout << std::setprecision(4);
    std::cout << "n        mean    p25     p50     p75     p90     failures\n";
    for (const McRow& row : rep.rows)
        std::cout << std::left << std::setw(9) << row.n << std::setw(8) << row.mean << std::setw(8) << row.p25
                  << std::setw(8) << row.p50 << std::setw(8) << row.p75 << std::setw(8) << row.p90 << row.failures
                  << '\n';
    if (rep.too_many_failures) {
        std::cerr << json{{"kind", "numerical"}, {"message", "more than 5% of replications failed"}}.dump() << '\n';
        return kExitNumerical;
    }
    return 0;
}

int cmd_svd(const RunConfig& cfg)
{
    const auto density = build_exact_density(cfg);
    const Grid1D& zg = density->z_grid();
    const GridFn phi = GridFn::sample(zg, [&](double z) { return cfg.design.true_phi(z); });
    // same u-grid as the estimation run, which is anchored at the initial guess
    const GridFn phi0 = resolve_phi0(cfg.penalty, *density);
    const BinaryIVOperator op(density, u_grid_for(*density, phi0, cfg.grids.n_u), cfg.op.form, cfg.op.scalar_weight);
    const Vector sigma = singular_values(assemble_jacobian(op, phi));
    const LinearFit fit = log_decay_fit(sigma, 1, std::min<int>(20, static_cast<int>(sigma.size())));

    const std::string dir = cfg.output_dir + "/svd";
    ensure_directory(dir);
    std::ofstream os(dir + "/svd.csv");
    if (!os) throw Error(ErrorKind::io, "cannot write " + dir + "/svd.csv");
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << "j,sigma\n";
    std::vector<double> j;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        os << i + 1 << ',' << sigma[i] << '\n';
        j.push_back(double(i + 1));
    }
    svg::write_file(dir + "/svd.svg", svg::line_chart({{"singular values", j, as_std(sigma), "#1f77b4", false}},
                                                      {"Singular values of F'[phi]", "j", "sigma_j", true}));
    const json summary{{"count", sigma.size()}, {"fit_range", {1, 20}}, {"slope", fit.slope},
                       {"intercept", fit.intercept}, {"r2", fit.r2}};
    std::ofstream(dir + "/svd_fit.json") << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_rates(const RunConfig& cfg)
{
    const std::string dir = cfg.output_dir + "/rates";
    ensure_directory(dir);
    std::ofstream data(dir + "/rates.csv"), fits(dir + "/rates_fit.csv");
    if (!data || !fits) throw Error(ErrorKind::io, "cannot write into " + dir);
    data << std::setprecision(std::numeric_limits<double>::max_digits10) << "mu,delta,error,stop_index\n";
    fits << std::setprecision(std::numeric_limits<double>::max_digits10) << "mu,slope,target,r2\n";
    std::vector<svg::Series> series;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    json out = json::array();
    for (std::size_t m = 0; m < cfg.rates.mu_list.size(); ++m) {
        RateConfig rc;
        rc.sc = SourceCondition::holder(cfg.rates.mu_list[m]);
        rc.decay = PolynomialDecay{cfg.rates.decay_exponent};
        rc.deltas = cfg.rates.deltas;
        rc.n = cfg.rates.n;
        rc.seed = cfg.rates.seed;
        const RateReport r = rate_experiment(rc);
        svg::Series s{"mu = " + std::to_string(cfg.rates.mu_list[m]), {}, {}, colors[m % 5], false};
        for (std::size_t i = 0; i < r.deltas.size(); ++i) {
            data << cfg.rates.mu_list[m] << ',' << r.deltas[i] << ',' << r.errors[i] << ',' << r.stop_indices[i] << '\n';
            s.x.push_back(std::log10(r.deltas[i]));
            s.y.push_back(r.errors[i]);
        }
        series.push_back(std::move(s));
        fits << cfg.rates.mu_list[m] << ',' << r.exponent << ',' << r.target << ',' << r.fit.r2 << '\n';
        out.push_back({{"mu", cfg.rates.mu_list[m]}, {"slope", r.exponent}, {"target", r.target}, {"r2", r.fit.r2}});
    }
    svg::write_file(dir + "/rates.svg",
                    svg::line_chart(series, {"Reconstruction error against noise level", "log10 delta", "error", true}));
    std::cout << out.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regularized Gauss-Newton estimation for nonparametric regression with a binary instrument"};
    app.require_subcommand(1);

    std::string config_path, input, out;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->allow_extras();
        return sub;
    };
    CLI::App* simulate = add("simulate", "draw a sample from the synthetic design");
    CLI::Option* n_opt = simulate->add_option("--n", n, "sample size");
    CLI::Option* seed_opt = simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--out", out, "output CSV path");
    CLI::App* kde = add("kde", "estimate the joint density from a sample");
    kde->add_option("--input", input, "sample CSV");
    kde->add_option("--out", out, "output stem for the density bundle");
    CLI::App* est = add("estimate", "solve with the exact or an estimated density");
    est->add_option("--input", input, "'exact' or a sample CSV")->default_val("exact");
    CLI::App* mc = add("montecarlo", "replicated simulation study");
    CLI::App* svd = add("svd", "singular values of the linearized operator at the true phi");
    CLI::App* rates = add("rates", "convergence-rate experiment on a diagonal model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(ErrorKind::parse, e.what());
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        RunConfig cfg = resolve_config(config_path, chosen->remaining());
        if (chosen == simulate) {
            if (*n_opt) cfg.simulate.n = n;
            if (*seed_opt) cfg.simulate.seed = seed;
            cfg.validate();
            return cmd_simulate(cfg, out);
        }
        if (chosen == kde) return cmd_kde(cfg, input, out);
        if (chosen == est) return cmd_estimate(cfg, input);
        if (chosen == mc) return cmd_montecarlo(cfg);
        if (chosen == svd) return cmd_svd(cfg);
        if (chosen == rates) return cmd_rates(cfg);
    } catch (const Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorKind::numerical, e.what());
    }
    return kExitInput;
}
