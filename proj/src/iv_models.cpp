#include "irgnm/iv_models.hpp"

#include <cmath>

namespace irgnm {

namespace {

// Cubic Hermite interpolation in y of column j of `value`, with node slopes
// taken from `slope`. `derivative` returns d/dy of the same interpolant, so a
// derivative kernel built from it is the exact Jacobian of the discrete apply.
// Outside the window the interpolant is 0 (zero extension) or the end value
// (hold), and flat in both cases.
struct HermiteTable
{
    const Matrix& value;
    const Matrix& slope;
    double lo;
    double h;
    Eigen::Index n;
    Extension ext;

    HermiteTable(const Matrix& v, const Matrix& s, const Grid1D& g, Extension e)
        : value(v), slope(s), lo(g.lo()), h(g.spacing()), n(g.size()), ext(e)
    {}

    double eval(Eigen::Index j, double y, bool derivative) const
    {
        const double s = (y - lo) / h;
        if (!(s >= 0) || !(s <= double(n - 1))) {
            if (derivative || ext == Extension::zero) return 0.0;
            return s < 0 ? value(0, j) : value(n - 1, j);
        }
        Eigen::Index i = static_cast<Eigen::Index>(s);
        if (i >= n - 1) i = n - 2;
        const double t = s - double(i), t2 = t * t, t3 = t2 * t;
        const double p0 = value(i, j), p1 = value(i + 1, j);
        const double m0 = h * slope(i, j), m1 = h * slope(i + 1, j);
        if (derivative)
            return ((6 * t2 - 6 * t) * (p0 - p1) + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1) / h;
        return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
    }
};

} // namespace

BinaryIVOperator::BinaryIVOperator(std::shared_ptr<const JointDensityGrid> density, Grid1D u_grid,
                                   OperatorForm form, double scalar_weight)
    : density_(std::move(density)), u_grid_(std::move(u_grid)), form_(form), scalar_weight_(scalar_weight)
{
    if (!density_) throw Error(ErrorKind::invalid_input, "BinaryIVOperator needs a density");
    if (!(scalar_weight_ > 0)) throw Error(ErrorKind::invalid_input, "scalar row weight must be positive");
}

void BinaryIVOperator::check_domain(const GridFn& phi) const
{
    if (!(phi.grid() == density_->z_grid()))
        throw Error(ErrorKind::invalid_input, "phi must live on the density's z-grid");
}

Matrix BinaryIVOperator::kernel(bool derivative, const GridFn& phi) const
{
    const JointDensityGrid& d = *density_;
    const bool cdf = form_ == OperatorForm::cdf_form;
    const Extension ext = cdf ? Extension::hold : Extension::zero;
    const HermiteTable a0(cdf ? d.cdf(0) : d.f(0), cdf ? d.f(0) : d.dfy(0), d.y_grid(), ext);
    const HermiteTable a1(cdf ? d.cdf(1) : d.f(1), cdf ? d.f(1) : d.dfy(1), d.y_grid(), ext);
    const double w0 = d.w0(), w1 = d.w1();

    const Eigen::Index nu = u_grid_.size(), nz = phi.size();
    Matrix K(nu, nz);
    for (Eigen::Index j = 0; j < nz; ++j) {
        for (Eigen::Index i = 0; i < nu; ++i) {
            const double y = u_grid_.node(i) + phi[j];
            K(i, j) = w1 * a0.eval(j, y, derivative) - w0 * a1.eval(j, y, derivative);
        }
    }
    return K;
}

Matrix BinaryIVOperator::derivative_kernel(const GridFn& phi) const
{
    check_domain(phi);
    return kernel(true, phi);
}

CodomainElem BinaryIVOperator::apply(const GridFn& phi) const
{
    check_domain(phi);
    const Vector wz = density_->z_grid().weights();
    const Matrix K = kernel(false, phi);
    CodomainElem out{GridFn(u_grid_, K * wz), 0.0};
    out.scalar = inner_product(phi, density_->fZ()) - density_->EY();
    return out;
}

CodomainElem BinaryIVOperator::deriv_apply(const GridFn& phi, const GridFn& h) const
{
    check_domain(h);
    const Vector wh = density_->z_grid().weights().cwiseProduct(h.values());
    return {GridFn(u_grid_, derivative_kernel(phi) * wh), inner_product(h, density_->fZ())};
}

GridFn BinaryIVOperator::deriv_adjoint(const GridFn& phi, const CodomainElem& y) const
{
    if (!(y.ufun.grid() == u_grid_)) throw Error(ErrorKind::invalid_input, "adjoint argument must live on the u-grid");
    const Vector wy = u_grid_.weights().cwiseProduct(y.ufun.values());
    Vector g = derivative_kernel(phi).transpose() * wy;
    g += scalar_weight_ * y.scalar * density_->fZ().values();
    return GridFn(density_->z_grid(), std::move(g));
}

LinearOperator BinaryIVOperator::linearize(const GridFn& phi) const
{
    // one kernel evaluation per Newton step; the closures share it
    auto K = std::make_shared<const Matrix>(derivative_kernel(phi));
    auto density = density_;
    const Grid1D u_grid = u_grid_;
    const double s = scalar_weight_;
    const Vector wz = density_->z_grid().weights();
    const Vector wu = u_grid_.weights();

    LinearOperator op;
    op.domain = density_->z_grid();
    op.codomain = u_grid_;
    op.scalar_weight = s;
    op.apply = [K, density, u_grid, wz](const GridFn& h) {
        const Vector wh = wz.cwiseProduct(h.values());
        return CodomainElem{GridFn(u_grid, (*K) * wh), inner_product(h, density->fZ())};
    };
    op.adjoint = [K, density, wu, s](const CodomainElem& y) {
        Vector g = K->transpose() * wu.cwiseProduct(y.ufun.values());
        g += s * y.scalar * density->fZ().values();
        return GridFn(density->z_grid(), std::move(g));
    };
    return op;
}

QuantileIVOperator::QuantileIVOperator(std::shared_ptr<const JointDensityGrid> density, double q)
    : density_(std::move(density)), w_grid_(2, 0.0, 1.0), q_(q)
{
    if (!density_) throw Error(ErrorKind::invalid_input, "QuantileIVOperator needs a density");
    if (!(q > 0 && q < 1)) throw Error(ErrorKind::invalid_input, "quantile level must lie in (0, 1)");
}

CodomainElem QuantileIVOperator::apply(const GridFn& phi) const
{
    const JointDensityGrid& d = *density_;
    if (!(phi.grid() == d.z_grid())) throw Error(ErrorKind::invalid_input, "phi must live on the z-grid");
    const Vector wz = d.z_grid().weights();
    Vector out(2);
    for (int w = 0; w < 2; ++w) {
        const HermiteTable G(d.cdf(w), d.f(w), d.y_grid(), Extension::hold);
        double acc = 0;
        for (Eigen::Index j = 0; j < phi.size(); ++j) acc += wz[j] * G.eval(j, phi[j], false);
        const double fw = w == 0 ? d.w0() : d.w1();
        out[w] = acc - q_ * fw;
    }
    return {GridFn(w_grid_, out), 0.0};
}

CodomainElem QuantileIVOperator::deriv_apply(const GridFn& phi, const GridFn& h) const
{
    const JointDensityGrid& d = *density_;
    const Vector wz = d.z_grid().weights();
    Vector out(2);
    for (int w = 0; w < 2; ++w) {
        const HermiteTable G(d.cdf(w), d.f(w), d.y_grid(), Extension::hold);
        double acc = 0;
        for (Eigen::Index j = 0; j < phi.size(); ++j) acc += wz[j] * h[j] * G.eval(j, phi[j], true);
        out[w] = acc;
    }
    return {GridFn(w_grid_, out), 0.0};
}

GridFn QuantileIVOperator::deriv_adjoint(const GridFn& phi, const CodomainElem& y) const
{
    const JointDensityGrid& d = *density_;
    const Vector ww = w_grid_.weights();
    Vector g = Vector::Zero(phi.size());
    for (int w = 0; w < 2; ++w) {
        const HermiteTable G(d.cdf(w), d.f(w), d.y_grid(), Extension::hold);
        for (Eigen::Index j = 0; j < phi.size(); ++j) g[j] += ww[w] * y.ufun[w] * G.eval(j, phi[j], true);
    }
    return GridFn(d.z_grid(), std::move(g));
}

} // namespace irgnm
