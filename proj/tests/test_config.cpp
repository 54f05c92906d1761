#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "irgnm/config.hpp"
#include "irgnm/pipeline.hpp"

using namespace irgnm;
using namespace irgnm::test;
using nlohmann::json;

namespace {

ErrorKind kind_of(const json& doc)
{
    try {
        run_config_from_json(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::numerical;
}

// Every key of `doc` appears under "properties" of the matching schema node.
void check_covered(const json& doc, const json& schema, const std::string& path)
{
    if (!doc.is_object()) return;
    REQUIRE_MESSAGE(schema.contains("properties"), path);
    for (const auto& [k, v] : doc.items()) {
        INFO(path << "." << k);
        REQUIRE(schema["properties"].contains(k));
        const json& sub = schema["properties"][k];
        if (v.is_object() && sub.contains("properties")) check_covered(v, sub, path + "." + k);
    }
}

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("defaults")
    {
        const RunConfig c = run_config_from_json(json::object());
        CHECK(c.grids.n_y == 256);
        CHECK(c.grids.n_z == 256);
        CHECK(c.op.form == OperatorForm::cdf_form);
        CHECK(c.penalty.kind == PenaltyKind::quadratic);
        CHECK(c.penalty.phi0 == "mean");
        CHECK(c.montecarlo.replications == 100);
        CHECK(c.montecarlo.master_seed == 20100713u);
        CHECK(c.output_dir == "out");
        CHECK(std::holds_alternative<LepskiiStop>(c.irgnm.stopping));
        CHECK(std::holds_alternative<CgSolver>(c.irgnm.subproblem));
    }

    TEST_CASE("round trip through json")
    {
        json doc = to_json(RunConfig{});
        doc["grids"]["n_y"] = 64;
        doc["penalty"] = {{"kind", "box"}, {"phi0", "constant:0.2"}, {"lower", -1.0}, {"upper", 2.0},
                          {"entropy_floor", 1e-9}};
        doc["irgnm"]["subproblem"] = {{"kind", "fista"}, {"max_iter", 300}, {"tol", 1e-7}, {"power_iters", 30},
                                      {"lipschitz_safety", 1.2}};
        doc["irgnm"]["stopping"] = {{"kind", "a_priori"},
                                    {"delta", 1e-3},
                                    {"gamma", 0.0},
                                    {"source", {{"kind", "logarithmic"}, {"p", 1.0}, {"beta", 1.0}}}};
        doc["kde"]["bandwidth"] = {{"h_y", 0.1}, {"h_z", 0.05}};
        doc["operator"]["form"] = "density";
        const RunConfig c = run_config_from_json(doc);
        CHECK(c.grids.n_y == 64);
        CHECK(c.kde.n_y == 64);
        CHECK(c.penalty.kind == PenaltyKind::box);
        CHECK(c.penalty.upper == 2.0);
        CHECK(std::get<FistaSolver>(c.irgnm.subproblem).max_iter == 300);
        CHECK(std::get<APrioriStop>(c.irgnm.stopping).delta == 1e-3);
        CHECK(to_json(c) == doc);

        json lep = to_json(RunConfig{});
        lep["irgnm"]["stopping"]["delta_proxy"] = 0.01;
        CHECK(to_json(run_config_from_json(lep)) == lep);
        lep["irgnm"]["stopping"] = {{"kind", "fixed"}, {"K", 7}};
        CHECK(to_json(run_config_from_json(lep)) == lep);
    }

    TEST_CASE("strict parsing")
    {
        CHECK(kind_of({{"grids", {{"n_q", 3}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"colour", 3}}) == ErrorKind::parse);
        CHECK(kind_of({{"grids", {{"n_y", "many"}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"grids", {{"n_y", 2.5}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"simulate", {{"n", -4}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"irgnm", {{"alpha0", "big"}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"operator", {{"form", "pdf"}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"penalty", {{"kind", "l1"}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"irgnm", {{"stopping", {{"kind", "discrepancy"}}}}}}) == ErrorKind::parse);
        CHECK(kind_of({{"kde", {{"bandwidth", "scott"}}}}) == ErrorKind::parse);
        CHECK(kind_of(json::array()) == ErrorKind::parse);
    }

    TEST_CASE("validation")
    {
        CHECK(kind_of({{"grids", {{"n_z", 1}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"penalty", {{"kind", "box"}, {"lower", 1.0}, {"upper", 0.0}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"penalty", {{"entropy_floor", 0.0}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"penalty", {{"phi0", ""}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"montecarlo", {{"replications", 0}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"montecarlo", {{"n_list", json::array()}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"rates", {{"mu_list", {0.75}}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"irgnm", {{"ratio", 1.5}}}}) == ErrorKind::invalid_input);
        CHECK(kind_of({{"outputs", {{"directory", ""}}}}) == ErrorKind::invalid_input);
    }

    TEST_CASE("overrides")
    {
        json doc = json::object();
        apply_override(doc, "irgnm.k_max", "12");
        apply_override(doc, "outputs.directory", "somewhere");
        apply_override(doc, "montecarlo.n_list", "[100, 200]");
        CHECK(doc["irgnm"]["k_max"] == 12);
        CHECK(doc["outputs"]["directory"] == "somewhere");
        const RunConfig c = run_config_from_json(doc);
        CHECK(c.irgnm.k_max == 12);
        CHECK(c.montecarlo.n_list == std::vector<std::size_t>{100, 200});
        CHECK_THROWS_AS(apply_override(doc, "", "1"), Error);
        CHECK_THROWS_AS(apply_override(doc, "irgnm..k_max", "1"), Error);
        CHECK_THROWS_AS(apply_override(doc, "irgnm.k_max.x", "1"), Error);
    }

    TEST_CASE("shipped default configuration")
    {
        const std::string dir = std::string(IRGNM_SOURCE_DIR) + "/config/";
        const json doc = load_json_file(dir + "default.json");
        const RunConfig c = run_config_from_json(doc);
        CHECK(to_json(c) == doc);
        check_covered(doc, load_json_file(dir + "schema.json"), "");
        CHECK_THROWS_AS(load_json_file(dir + "missing.json"), Error);
    }

    TEST_CASE("initial guess resolution")
    {
        const auto d = exact_density_shared(64);
        PenaltyConfig p;
        const GridFn mean = resolve_phi0(p, *d);
        CHECK(mean.values().maxCoeff() == d->EY());
        CHECK(mean.values().minCoeff() == d->EY());

        p.phi0 = "constant:0.25";
        CHECK(resolve_phi0(p, *d).values().cwiseEqual(0.25).all());
        p.phi0 = "constant:abc";
        CHECK_THROWS_AS(resolve_phi0(p, *d), Error);

        const std::string path = "phi0_resolve_test.csv";
        {
            std::ofstream os(path);
            os << "x,value\n0,0\n0.5,1\n1,0\n";
        }
        p.phi0 = path;
        const GridFn tent = resolve_phi0(p, *d);
        for (Eigen::Index i = 0; i < tent.size(); ++i) {
            const double z = d->z_grid().node(i);
            CHECK(tent[i] == doctest::Approx(1 - std::abs(2 * z - 1)).epsilon(1e-12));
        }
        {
            std::ofstream os(path);
            os << "x,value\n0.2,0\n1,0\n";
        }
        CHECK_THROWS_AS(resolve_phi0(p, *d), Error);
        std::remove(path.c_str());
        p.phi0 = "no_such_file.csv";
        CHECK_THROWS_AS(resolve_phi0(p, *d), Error);
    }
}
