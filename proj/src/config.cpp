#include "irgnm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace irgnm {

using nlohmann::json;

namespace {

// Reads members of one JSON object and rejects keys nobody asked for.
class ObjectReader
{
public:
    ObjectReader(const json& obj, std::string path)
        : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) fail("expected an object");
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            fail(std::string("wrong type for '") + key + "'");
        }
    }

    void get(const char* key, double& out)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        if (!it->is_number()) fail(std::string("'") + key + "' must be a number");
        out = it->get<double>();
    }

    template <typename Int>
    void get_int(const char* key, Int& out)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        if (!it->is_number_integer()) fail(std::string("'") + key + "' must be an integer");
        if (it->is_number_unsigned()) {
            out = static_cast<Int>(it->get<std::uint64_t>());
        } else {
            const auto v = it->get<std::int64_t>();
            if constexpr (std::is_unsigned_v<Int>)
                if (v < 0) fail(std::string("'") + key + "' must be non-negative");
            out = static_cast<Int>(v);
        }
    }

    const json* child(const char* key)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) fail("unknown key '" + k + "'");
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorKind::parse, "config" + (path_.empty() ? std::string() : " " + path_) + ": " + what);
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_design(const json& j, SimDesign& d)
{
    ObjectReader r(j, "design");
    r.get("amplitude", d.amplitude);
    r.get("phase", d.phase);
    r.get("offset", d.offset);
    r.get("w0", d.w0);
    r.get("mu0_slope", d.mu0_slope);
    r.get("mu0_intercept", d.mu0_intercept);
    r.get("mu1_slope", d.mu1_slope);
    r.get("mu1_intercept", d.mu1_intercept);
    r.get("sigma_u", d.sigma_u);
    r.get("z_mean", d.z_mean);
    r.get("z_sd", d.z_sd);
    r.get("transform_scale", d.transform_scale);
    r.get("transform_shift", d.transform_shift);
    r.finish();
}

void read_kde(const json& j, KdeConfig& k)
{
    ObjectReader r(j, "kde");
    if (const json* bw = r.child("bandwidth")) {
        if (bw->is_string()) {
            if (bw->get<std::string>() != "silverman") r.fail("bandwidth must be \"silverman\" or {h_y, h_z}");
            k.bandwidth = SilvermanBandwidth{};
        } else {
            FixedBandwidth f;
            ObjectReader b(*bw, "kde.bandwidth");
            b.get("h_y", f.h_y);
            b.get("h_z", f.h_z);
            b.finish();
            k.bandwidth = f;
        }
    }
    r.get("y_window_pad", k.y_window_pad);
    r.finish();
}

SourceCondition read_source(const json& j)
{
    ObjectReader r(j, "irgnm.stopping.source");
    std::string kind = "holder";
    double mu = 0.5, p = 1.0, beta = 1.0;
    r.get("kind", kind);
    r.get("mu", mu);
    r.get("p", p);
    r.get("beta", beta);
    r.finish();
    if (kind == "holder") return SourceCondition::holder(mu, beta);
    if (kind == "logarithmic") return SourceCondition::logarithmic(p, beta);
    r.fail("source kind must be \"holder\" or \"logarithmic\"");
}

void read_irgnm(const json& j, IrgnmConfig& c)
{
    ObjectReader r(j, "irgnm");
    r.get("alpha0", c.alpha0);
    r.get("ratio", c.ratio);
    r.get_int("k_max", c.k_max);
    r.get("eta", c.eta);
    if (const json* s = r.child("subproblem")) {
        ObjectReader sr(*s, "irgnm.subproblem");
        std::string kind = "cg";
        sr.get("kind", kind);
        if (kind == "cg") {
            CgSolver cg;
            sr.get_int("max_iter", cg.max_iter);
            sr.get("tol", cg.tol);
            c.subproblem = cg;
        } else if (kind == "fista") {
            FistaSolver f;
            sr.get_int("max_iter", f.max_iter);
            sr.get("tol", f.tol);
            sr.get_int("power_iters", f.power_iters);
            sr.get("lipschitz_safety", f.lipschitz_safety);
            c.subproblem = f;
        } else {
            sr.fail("subproblem kind must be \"cg\" or \"fista\"");
        }
        sr.finish();
    }
    if (const json* s = r.child("stopping")) {
        ObjectReader sr(*s, "irgnm.stopping");
        std::string kind = "lepskii";
        sr.get("kind", kind);
        if (kind == "lepskii") {
            LepskiiStop l;
            sr.get("kappa", l.kappa);
            if (const json* d = sr.child("delta_proxy"); d && !d->is_null()) {
                if (!d->is_number()) sr.fail("'delta_proxy' must be a number or null");
                l.delta_proxy = d->get<double>();
            }
            c.stopping = l;
        } else if (kind == "a_priori") {
            APrioriStop a;
            sr.get("delta", a.delta);
            sr.get("gamma", a.gamma);
            if (const json* src = sr.child("source")) a.sc = read_source(*src);
            c.stopping = a;
        } else if (kind == "fixed") {
            FixedStop f;
            sr.get_int("K", f.K);
            c.stopping = f;
        } else {
            sr.fail("stopping kind must be \"lepskii\", \"a_priori\" or \"fixed\"");
        }
        sr.finish();
    }
    r.finish();
}

json source_to_json(const SourceCondition& sc)
{
    if (const auto* h = std::get_if<HolderIndex>(&sc.kind()))
        return {{"kind", "holder"}, {"mu", h->mu}, {"beta", sc.beta()}};
    return {{"kind", "logarithmic"}, {"p", std::get<LogarithmicIndex>(sc.kind()).p}, {"beta", sc.beta()}};
}

std::string penalty_name(PenaltyKind k)
{
    switch (k) {
    case PenaltyKind::quadratic:
        return "quadratic";
    case PenaltyKind::entropy:
        return "entropy";
    case PenaltyKind::box:
        return "box";
    }
    return "quadratic";
}

// JSON has no infinity; unbounded box sides are written as null.
json bound_to_json(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

void RunConfig::validate() const
{
    design.validate();
    if (grids.n_y < 2 || grids.n_z < 2 || grids.n_u < 2)
        throw Error(ErrorKind::invalid_input, "grids need at least 2 nodes each");
    if (!(op.scalar_weight > 0)) throw Error(ErrorKind::invalid_input, "operator scalar_weight must be positive");
    if (!(kde.y_window_pad >= 0)) throw Error(ErrorKind::invalid_input, "kde y_window_pad must be non-negative");
    if (penalty.kind == PenaltyKind::box && !(penalty.lower < penalty.upper))
        throw Error(ErrorKind::invalid_input, "box penalty needs lower < upper");
    if (!(penalty.entropy_floor > 0)) throw Error(ErrorKind::invalid_input, "penalty entropy_floor must be positive");
    if (penalty.phi0.empty()) throw Error(ErrorKind::invalid_input, "penalty phi0 is empty");
    irgnm.validate();
    if (montecarlo.replications < 1) throw Error(ErrorKind::invalid_input, "montecarlo replications must be >= 1");
    if (montecarlo.n_list.empty()) throw Error(ErrorKind::invalid_input, "montecarlo n_list is empty");
    for (std::size_t n : montecarlo.n_list)
        if (n < 4) throw Error(ErrorKind::invalid_input, "montecarlo sample sizes must be >= 4");
    if (simulate.n < 1) throw Error(ErrorKind::invalid_input, "simulate n must be >= 1");
    if (rates.mu_list.empty() || rates.deltas.size() < 2)
        throw Error(ErrorKind::invalid_input, "rates needs at least one mu and two deltas");
    for (double mu : rates.mu_list)
        if (!(mu > 0 && mu <= 0.5)) throw Error(ErrorKind::invalid_input, "rates mu must lie in (0, 1/2]");
    if (!(rates.decay_exponent > 0)) throw Error(ErrorKind::invalid_input, "rates decay_exponent must be positive");
    if (output_dir.empty()) throw Error(ErrorKind::invalid_input, "outputs directory is empty");
}

RunConfig run_config_from_json(const json& doc)
{
    RunConfig c;
    ObjectReader r(doc, "");
    if (const json* j = r.child("design")) read_design(*j, c.design);
    if (const json* j = r.child("grids")) {
        ObjectReader g(*j, "grids");
        g.get_int("n_y", c.grids.n_y);
        g.get_int("n_z", c.grids.n_z);
        g.get_int("n_u", c.grids.n_u);
        g.finish();
    }
    if (const json* j = r.child("operator")) {
        ObjectReader o(*j, "operator");
        std::string form = "cdf";
        o.get("form", form);
        if (form == "cdf")
            c.op.form = OperatorForm::cdf_form;
        else if (form == "density")
            c.op.form = OperatorForm::density_form;
        else
            o.fail("form must be \"cdf\" or \"density\"");
        o.get("scalar_weight", c.op.scalar_weight);
        o.finish();
    }
    if (const json* j = r.child("kde")) read_kde(*j, c.kde);
    if (const json* j = r.child("penalty")) {
        ObjectReader p(*j, "penalty");
        std::string kind = "quadratic";
        p.get("kind", kind);
        if (kind == "quadratic")
            c.penalty.kind = PenaltyKind::quadratic;
        else if (kind == "entropy")
            c.penalty.kind = PenaltyKind::entropy;
        else if (kind == "box")
            c.penalty.kind = PenaltyKind::box;
        else
            p.fail("kind must be \"quadratic\", \"entropy\" or \"box\"");
        p.get("phi0", c.penalty.phi0);
        p.get("entropy_floor", c.penalty.entropy_floor);
        for (const char* side : {"lower", "upper"}) {
            const json* b = p.child(side);
            if (!b || b->is_null()) continue;
            if (!b->is_number()) p.fail(std::string("'") + side + "' must be a number or null");
            (std::string(side) == "lower" ? c.penalty.lower : c.penalty.upper) = b->get<double>();
        }
        p.finish();
    }
    if (const json* j = r.child("irgnm")) read_irgnm(*j, c.irgnm);
    if (const json* j = r.child("montecarlo")) {
        ObjectReader m(*j, "montecarlo");
        m.get_int("replications", c.montecarlo.replications);
        m.get("n_list", c.montecarlo.n_list);
        m.get_int("master_seed", c.montecarlo.master_seed);
        m.finish();
    }
    if (const json* j = r.child("simulate")) {
        ObjectReader s(*j, "simulate");
        s.get_int("n", c.simulate.n);
        s.get_int("seed", c.simulate.seed);
        s.finish();
    }
    if (const json* j = r.child("rates")) {
        ObjectReader s(*j, "rates");
        s.get("mu_list", c.rates.mu_list);
        s.get("decay_exponent", c.rates.decay_exponent);
        s.get_int("n", c.rates.n);
        s.get("deltas", c.rates.deltas);
        s.get_int("seed", c.rates.seed);
        s.finish();
    }
    if (const json* j = r.child("outputs")) {
        ObjectReader o(*j, "outputs");
        o.get("directory", c.output_dir);
        o.finish();
    }
    r.finish();
    c.kde.n_y = c.grids.n_y;
    c.kde.n_z = c.grids.n_z;
    c.validate();
    return c;
}

json to_json(const RunConfig& c)
{
    const SimDesign& d = c.design;
    json j;
    j["design"] = {{"amplitude", d.amplitude},
                   {"phase", d.phase},
                   {"offset", d.offset},
                   {"w0", d.w0},
                   {"mu0_slope", d.mu0_slope},
                   {"mu0_intercept", d.mu0_intercept},
                   {"mu1_slope", d.mu1_slope},
                   {"mu1_intercept", d.mu1_intercept},
                   {"sigma_u", d.sigma_u},
                   {"z_mean", d.z_mean},
                   {"z_sd", d.z_sd},
                   {"transform_scale", d.transform_scale},
                   {"transform_shift", d.transform_shift}};
    j["grids"] = {{"n_y", c.grids.n_y}, {"n_z", c.grids.n_z}, {"n_u", c.grids.n_u}};
    j["operator"] = {{"form", c.op.form == OperatorForm::cdf_form ? "cdf" : "density"},
                     {"scalar_weight", c.op.scalar_weight}};
    json bw = "silverman";
    if (const auto* f = std::get_if<FixedBandwidth>(&c.kde.bandwidth)) bw = {{"h_y", f->h_y}, {"h_z", f->h_z}};
    j["kde"] = {{"bandwidth", bw}, {"y_window_pad", c.kde.y_window_pad}};
    j["penalty"] = {{"kind", penalty_name(c.penalty.kind)},
                    {"phi0", c.penalty.phi0},
                    {"lower", bound_to_json(c.penalty.lower)},
                    {"upper", bound_to_json(c.penalty.upper)},
                    {"entropy_floor", c.penalty.entropy_floor}};

    json sub;
    if (const auto* cg = std::get_if<CgSolver>(&c.irgnm.subproblem))
        sub = {{"kind", "cg"}, {"max_iter", cg->max_iter}, {"tol", cg->tol}};
    else {
        const auto& f = std::get<FistaSolver>(c.irgnm.subproblem);
        sub = {{"kind", "fista"},
               {"max_iter", f.max_iter},
               {"tol", f.tol},
               {"power_iters", f.power_iters},
               {"lipschitz_safety", f.lipschitz_safety}};
    }
    json stop;
    if (const auto* l = std::get_if<LepskiiStop>(&c.irgnm.stopping))
        stop = {{"kind", "lepskii"},
                {"kappa", l->kappa},
                {"delta_proxy", l->delta_proxy ? json(*l->delta_proxy) : json(nullptr)}};
    else if (const auto* a = std::get_if<APrioriStop>(&c.irgnm.stopping))
        stop = {{"kind", "a_priori"}, {"delta", a->delta}, {"gamma", a->gamma}, {"source", source_to_json(a->sc)}};
    else
        stop = {{"kind", "fixed"}, {"K", std::get<FixedStop>(c.irgnm.stopping).K}};
    j["irgnm"] = {{"alpha0", c.irgnm.alpha0},
                  {"ratio", c.irgnm.ratio},
                  {"k_max", c.irgnm.k_max},
                  {"eta", c.irgnm.eta},
                  {"subproblem", sub},
                  {"stopping", stop}};
    j["montecarlo"] = {{"replications", c.montecarlo.replications},
                       {"n_list", c.montecarlo.n_list},
                       {"master_seed", c.montecarlo.master_seed}};
    j["simulate"] = {{"n", c.simulate.n}, {"seed", c.simulate.seed}};
    j["rates"] = {{"mu_list", c.rates.mu_list},
                  {"decay_exponent", c.rates.decay_exponent},
                  {"n", c.rates.n},
                  {"deltas", c.rates.deltas},
                  {"seed", c.rates.seed}};
    j["outputs"] = {{"directory", c.output_dir}};
    return j;
}

json load_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, path + ": " + e.what());
    }
}

RunConfig load_run_config(const std::string& path)
{
    return run_config_from_json(load_json_file(path));
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value)
{
    if (dotted_key.empty()) throw Error(ErrorKind::invalid_input, "empty override key");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw Error(ErrorKind::invalid_input, "malformed override key '" + dotted_key + "'");
        if (!node->is_object()) {
            if (!node->is_null())
                throw Error(ErrorKind::invalid_input, "override '" + dotted_key + "' descends into a non-object");
            *node = json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json parsed = json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? json(value) : std::move(parsed);
}

} // namespace irgnm
