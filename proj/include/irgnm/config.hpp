#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "irgnm/irgnm.hpp"
#include "irgnm/iv_models.hpp"
#include "irgnm/kde.hpp"
#include "irgnm/sim_binary.hpp"

namespace irgnm {

struct GridConfig
{
    Eigen::Index n_y = 256;
    Eigen::Index n_z = 256;
    Eigen::Index n_u = 256;
};

struct OperatorConfig
{
    OperatorForm form = OperatorForm::cdf_form;
    double scalar_weight = 1.0;
};

enum class PenaltyKind
{
    quadratic,
    entropy,
    box
};

/// phi0 is both the initial guess and the centre of the quadratic part:
/// "mean" for the constant E[Y], "constant:<value>", or a path to an
/// `x,value` CSV on [0,1].
struct PenaltyConfig
{
    PenaltyKind kind = PenaltyKind::quadratic;
    std::string phi0 = "mean";
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double entropy_floor = 1e-12;
};

struct MonteCarloConfig
{
    int replications = 100;
    std::vector<std::size_t> n_list{1000, 10000};
    std::uint64_t master_seed = 20100713;
};

struct SimulateConfig
{
    std::size_t n = 1000;
    std::uint64_t seed = 7;
};

struct RatesConfig
{
    std::vector<double> mu_list{0.25, 0.5};
    double decay_exponent = 2.0;
    Eigen::Index n = 1000;
    std::vector<double> deltas{1e-2, 3.16227766016838e-3, 1e-3, 3.16227766016838e-4, 1e-4,
                               3.16227766016838e-5, 1e-5, 3.16227766016838e-6, 1e-6};
    std::uint64_t seed = 1;
};

struct RunConfig
{
    SimDesign design;
    GridConfig grids;
    OperatorConfig op;
    KdeConfig kde;
    PenaltyConfig penalty;
    IrgnmConfig irgnm;
    MonteCarloConfig montecarlo;
    SimulateConfig simulate;
    RatesConfig rates;
    std::string output_dir = "out";

    void validate() const;
};

/// Strict reader: unknown keys and wrong types are parse errors, missing keys
/// keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);
nlohmann::json load_json_file(const std::string& path);

/// Sets the value at a dotted key path ("irgnm.k_max"). The value is read as
/// JSON when it parses, otherwise taken as a string. Intermediate objects are
/// created as needed.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

} // namespace irgnm
