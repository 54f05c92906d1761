#include "irgnm/sim_binary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "irgnm/iv_models.hpp"

namespace irgnm {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double normal_pdf(double x, double mean, double sd)
{
    const double t = (x - mean) / sd;
    return std::exp(-0.5 * t * t) / (sd * std::sqrt(kTwoPi));
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Tabulated inverse CDF of Z | W = 0 on [0,1].
class TruncatedNormalSampler
{
public:
    TruncatedNormalSampler(const SimDesign& d, Eigen::Index nodes)
        : grid_(nodes, 0.0, 1.0)
    {
        const Vector pdf = GridFn::sample(grid_, [&](double z) { return d.f_zw(z, 0); }).values();
        cdf_ = cumtrapz_values(grid_, pdf);
        cdf_ /= cdf_[cdf_.size() - 1];
    }

    double operator()(double u) const
    {
        const double* first = cdf_.data();
        const double* last = first + cdf_.size();
        const double* it = std::upper_bound(first, last, u);
        if (it == first) return 0.0;
        if (it == last) return 1.0;
        const Eigen::Index i = (it - first) - 1;
        const double c0 = cdf_[i], c1 = cdf_[i + 1];
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        return grid_.node(i) + t * grid_.spacing();
    }

private:
    Grid1D grid_;
    Vector cdf_;
};

} // namespace

void SimDesign::validate() const
{
    if (!(w0 > 0 && w0 < 1)) throw Error(ErrorKind::invalid_input, "design: w0 must lie in (0, 1)");
    if (!(sigma_u > 0)) throw Error(ErrorKind::invalid_input, "design: sigma_u must be positive");
    if (!(z_sd > 0)) throw Error(ErrorKind::invalid_input, "design: z_sd must be positive");
    if (!(transform_scale > 0)) throw Error(ErrorKind::invalid_input, "design: transform scale must be positive");
}

double SimDesign::true_phi(double z) const
{
    return amplitude * std::sin(kTwoPi * (z + phase)) + offset;
}

double SimDesign::mu(int w, double z) const
{
    return w == 0 ? mu0_slope * z + mu0_intercept : mu1_slope * z + mu1_intercept;
}

double SimDesign::normalization() const
{
    const double mass = z_sd * std::sqrt(kTwoPi) * (normal_cdf((1 - z_mean) / z_sd) - normal_cdf(-z_mean / z_sd));
    return w0 / mass;
}

double SimDesign::transform_factor() const
{
    return transform_scale * (1 - w0) / w0;
}

double SimDesign::f_zw(double z, int w) const
{
    if (w == 1) return transform_factor() * f_zw(transform_scale * z - transform_shift, 0);
    if (z < 0 || z > 1) return 0.0;
    const double t = (z - z_mean) / z_sd;
    return normalization() * std::exp(-0.5 * t * t);
}

double SimDesign::f_yzw(double y, double z, int w) const
{
    return f_zw(z, w) * normal_pdf(y, true_phi(z) + mu(w, z), sigma_u);
}

double SimDesign::naive_limit(double z) const
{
    return w0 * mu(0, z) + (1 - w0) * mu(1, z) + true_phi(z);
}

double true_phi(double z)
{
    return SimDesign{}.true_phi(z);
}

double naive_limit(double z)
{
    return SimDesign{}.naive_limit(z);
}

std::pair<double, double> support_window(const SimDesign& design, double sigmas)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const Grid1D fine(4001, 0.0, 1.0);
    for (Eigen::Index i = 0; i < fine.size(); ++i)
        for (int w = 0; w < 2; ++w) {
            const double m = design.true_phi(fine.node(i)) + design.mu(w, fine.node(i));
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    return {lo - sigmas * design.sigma_u, hi + sigmas * design.sigma_u};
}

Grid1D default_y_grid(const SimDesign& design, Eigen::Index n)
{
    const auto [lo, hi] = support_window(design, 6.0);
    return Grid1D(n, lo, hi);
}

JointDensityGrid exact_density(const SimDesign& design, const Grid1D& y_grid, const Grid1D& z_grid)
{
    design.validate();
    const auto [need_lo, need_hi] = support_window(design, 5.0);
    if (y_grid.lo() > need_lo || y_grid.hi() < need_hi)
        throw Error(ErrorKind::invalid_input, "y-window does not cover the support within 5 standard deviations");
    if (z_grid.lo() != 0.0 || z_grid.hi() != 1.0) throw Error(ErrorKind::invalid_input, "z-grid must span [0,1]");

    std::array<Matrix, 2> f;
    for (int w = 0; w < 2; ++w) {
        Matrix m(y_grid.size(), z_grid.size());
        for (Eigen::Index j = 0; j < z_grid.size(); ++j)
            for (Eigen::Index i = 0; i < y_grid.size(); ++i) m(i, j) = design.f_yzw(y_grid.node(i), z_grid.node(j), w);
        f[static_cast<std::size_t>(w)] = std::move(m);
    }
    const GridFn fZ = GridFn::sample(z_grid, [&](double z) { return design.f_zw(z, 0) + design.f_zw(z, 1); });
    // E[Y] = int phi fZ + sum_w int f_ZW(., w) mu_w, on the same z-quadrature as the scalar row
    const GridFn phi = GridFn::sample(z_grid, [&](double z) { return design.true_phi(z); });
    const double ey = inner_product(phi, fZ) + mean_u(design, z_grid);
    return JointDensityGrid(y_grid, z_grid, std::move(f[0]), std::move(f[1]), design.w0, ey, fZ);
}

double independence_residual(const SimDesign& design, const Grid1D& y_grid, const Grid1D& z_grid,
                             const Grid1D& u_grid)
{
    auto density = std::make_shared<const JointDensityGrid>(exact_density(design, y_grid, z_grid));
    const BinaryIVOperator op(density, u_grid, OperatorForm::density_form);
    const GridFn phi = GridFn::sample(z_grid, [&](double z) { return design.true_phi(z); });
    return op.apply(phi).ufun.values().cwiseAbs().maxCoeff();
}

double mean_u(const SimDesign& design, const Grid1D& z_grid)
{
    const GridFn integrand = GridFn::sample(
        z_grid, [&](double z) { return design.f_zw(z, 0) * design.mu(0, z) + design.f_zw(z, 1) * design.mu(1, z); });
    return integrate(integrand);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream)
{
    // splitmix64 over the pair
    std::uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Sample sample(const SimDesign& design, std::size_t n, std::uint64_t seed)
{
    design.validate();
    if (n < 1) throw Error(ErrorKind::invalid_input, "sample size must be at least 1");
    const TruncatedNormalSampler z0_sampler(design, 10000);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Sample s;
    s.seed = seed;
    s.y.reserve(n);
    s.z.reserve(n);
    s.w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int w = unif(gen) < design.w0 ? 0 : 1;
        double z = z0_sampler(unif(gen));
        if (w == 1) z = (z + design.transform_shift) / design.transform_scale;
        const double u = design.mu(w, z) + design.sigma_u * normal(gen);
        s.push_back(design.true_phi(z) + u, z, w);
    }
    return s;
}

} // namespace irgnm
