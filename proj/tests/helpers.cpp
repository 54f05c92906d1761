#include "helpers.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace irgnm::test {

Vector Gen::normal_vector(Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
}

GridFn Gen::unit_mass_fn(const Grid1D& g)
{
    Vector v(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = uniform(0.05, 2.0);
    const GridFn f(g, v);
    return (1.0 / inner_product(f, GridFn::constant(g, 1.0))) * f;
}

GridFn Gen::smooth_fn(const Grid1D& g, double scale)
{
    const double a0 = normal(), a1 = normal(), a2 = normal(), a3 = normal();
    return GridFn::sample(g, [&](double x) {
        const double t = (x - g.lo()) / (g.hi() - g.lo());
        return scale * (a0 + a1 * std::cos(std::numbers::pi * t) + a2 * std::cos(2 * std::numbers::pi * t) +
                        a3 * std::sin(3 * std::numbers::pi * t) / 2);
    });
}

std::shared_ptr<const JointDensityGrid> exact_density_shared(Eigen::Index n)
{
    static std::mutex m;
    static std::map<Eigen::Index, std::shared_ptr<const JointDensityGrid>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[n];
    if (!slot) {
        const SimDesign d;
        slot = std::make_shared<const JointDensityGrid>(exact_density(d, default_y_grid(d, n), Grid1D(n, 0.0, 1.0)));
    }
    return slot;
}

LinearOperator matrix_operator(const Matrix& M, const Vector& c, const Grid1D& domain, const Grid1D& codomain,
                               double scalar_weight)
{
    LinearOperator T;
    T.domain = domain;
    T.codomain = codomain;
    T.scalar_weight = scalar_weight;
    const Vector wd = domain.weights(), wc = codomain.weights();
    T.apply = [=](const GridFn& h) {
        return CodomainElem{GridFn(codomain, M * h.values()), weighted_dot(domain, c, h.values())};
    };
    T.adjoint = [=](const CodomainElem& y) {
        const Vector v = (M.transpose() * wc.cwiseProduct(y.ufun.values())).cwiseQuotient(wd);
        return GridFn(domain, v + scalar_weight * y.scalar * c);
    };
    return T;
}

MatrixModel::MatrixModel(Matrix M, Vector c, Grid1D domain, Grid1D codomain, Vector g, double s, double a)
    : M_(std::move(M)), c_(std::move(c)), domain_(std::move(domain)), codomain_(std::move(codomain)),
      g_(std::move(g)), s_(s), a_(a)
{}

CodomainElem MatrixModel::apply(const GridFn& phi) const
{
    const Vector v = M_ * phi.values() + a_ * phi.values().array().cube().matrix() - g_;
    return {GridFn(codomain_, v), weighted_dot(domain_, c_, phi.values()) - s_};
}

CodomainElem MatrixModel::deriv_apply(const GridFn& phi, const GridFn& h) const
{
    const Vector d = 3 * a_ * phi.values().array().square();
    Matrix J = M_;
    J.diagonal() += d.head(std::min(J.rows(), J.cols()));
    return matrix_operator(J, c_, domain_, codomain_).apply(h);
}

GridFn MatrixModel::deriv_adjoint(const GridFn& phi, const CodomainElem& y) const
{
    const Vector d = 3 * a_ * phi.values().array().square();
    Matrix J = M_;
    J.diagonal() += d.head(std::min(J.rows(), J.cols()));
    return matrix_operator(J, c_, domain_, codomain_).adjoint(y);
}

Matrix well_conditioned(Gen& gen, Eigen::Index n, double spread)
{
    Matrix M = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) += spread * gen.normal() / std::sqrt(double(n));
    return M;
}

bool close_rel(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace irgnm::test
