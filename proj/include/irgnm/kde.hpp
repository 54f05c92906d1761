#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "irgnm/density.hpp"

namespace irgnm {

/// Observations (y, z, w) with z in [0,1] and binary w.
struct Sample
{
    std::vector<double> y;
    std::vector<double> z;
    std::vector<int> w;
    std::uint64_t seed = 0; // informational, not used by the estimators

    std::size_t size() const { return y.size(); }
    void push_back(double yi, double zi, int wi)
    {
        y.push_back(yi);
        z.push_back(zi);
        w.push_back(wi);
    }
};

/// `y,z,w` with a header row, 17 significant digits.
void write_sample_csv(const std::string& path, const Sample& s);
Sample read_sample_csv(const std::string& path);

/// Normal-reference rule for a 2-D product Gaussian kernel: h = sd * n^(-1/6).
struct SilvermanBandwidth
{};

struct FixedBandwidth
{
    double h_y = 0;
    double h_z = 0;
};

struct KdeConfig
{
    std::variant<SilvermanBandwidth, FixedBandwidth> bandwidth = SilvermanBandwidth{};
    double y_window_pad = 4.0; // in bandwidths
    Eigen::Index n_y = 256;
    Eigen::Index n_z = 256;
};

struct Bandwidths
{
    double h_y = 0;
    double h_z = 0;
};

/// Per-level bandwidths. Rejects levels with fewer than 2 points and
/// zero-variance coordinates under the Silverman rule.
std::array<Bandwidths, 2> select_bandwidths(const Sample& s, const KdeConfig& cfg);

/// y-grid spanning the data padded by `y_window_pad` of the larger y-bandwidth.
Grid1D kde_y_grid(const Sample& s, const KdeConfig& cfg);

/// Product Gaussian kernel estimate per level of W, reflected at z = 0 and 1.
JointDensityGrid kde_fit(const Sample& s, const KdeConfig& cfg, const Grid1D& y_grid, const Grid1D& z_grid);

} // namespace irgnm
