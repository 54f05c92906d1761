#include "irgnm/diagnostics.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "irgnm/parallel.hpp"

namespace irgnm {

Matrix JacobianMatrix::weighted() const
{
    return row_weights.cwiseSqrt().asDiagonal() * raw * col_weights.cwiseSqrt().cwiseInverse().asDiagonal();
}

JacobianMatrix assemble_jacobian(const ForwardModel& model, const GridFn& phi)
{
    const Grid1D& zg = model.domain_grid();
    const Grid1D& ug = model.codomain_grid();
    const Eigen::Index nz = zg.size(), nu = ug.size();
    if (nz > kMaxJacobianColumns)
        throw Error(ErrorKind::invalid_input,
                    "dense Jacobian limited to " + std::to_string(kMaxJacobianColumns) + " columns");

    JacobianMatrix J;
    J.raw.resize(nu + 1, nz);
    J.row_weights.resize(nu + 1);
    J.row_weights.head(nu) = ug.weights();
    J.row_weights[nu] = model.scalar_weight();
    J.col_weights = zg.weights();

    // the response to a unit node value already carries that node's quadrature
    // weight, so raw * h reproduces F'[phi]h
    for (Eigen::Index j = 0; j < nz; ++j) {
        Vector e = Vector::Zero(nz);
        e[j] = 1.0;
        const CodomainElem c = model.deriv_apply(phi, GridFn(zg, e));
        J.raw.col(j).head(nu) = c.ufun.values();
        J.raw(nu, j) = c.scalar;
    }
    return J;
}

Vector singular_values(const JacobianMatrix& J)
{
    return Eigen::BDCSVD<Matrix>(J.weighted()).singularValues();
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::numerical, "linear fit needs at least 2 points");
    const auto n = static_cast<Eigen::Index>(x.size());
    const Vector xv = Eigen::Map<const Vector>(x.data(), n);
    const Vector yv = Eigen::Map<const Vector>(y.data(), n);
    if (!xv.allFinite() || !yv.allFinite()) throw Error(ErrorKind::numerical, "linear fit on non-finite data");
    const double mx = xv.mean(), my = yv.mean();
    const double sxx = (xv.array() - mx).square().sum();
    if (!(sxx > 0)) throw Error(ErrorKind::numerical, "linear fit with constant abscissa");
    const double sxy = ((xv.array() - mx) * (yv.array() - my)).sum();
    const double syy = (yv.array() - my).square().sum();
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

LinearFit log_decay_fit(const Vector& sigma, int first, int last)
{
    if (first < 1 || last > sigma.size() || last <= first)
        throw Error(ErrorKind::invalid_input, "decay fit range outside the spectrum");
    std::vector<double> j, ls;
    for (int i = first; i <= last; ++i) {
        const double s = sigma[i - 1];
        if (!(s > 0)) throw Error(ErrorKind::numerical, "zero singular value inside the decay fit range");
        j.push_back(i);
        ls.push_back(std::log(s));
    }
    return linear_fit(j, ls);
}

double gamma_bound(const JacobianMatrix& J_true, const JacobianMatrix& J_est)
{
    if (J_true.raw.rows() != J_est.raw.rows() || J_true.raw.cols() != J_est.raw.cols())
        throw Error(ErrorKind::invalid_input, "Jacobian shapes differ");
    const Matrix A = J_true.weighted();
    const Matrix B = J_est.weighted();
    const Matrix D = A.transpose() * A - B.transpose() * B;

    // power iteration on D^2; swapping the arguments flips the sign of D, which
    // leaves every product below bit-identical
    Vector v = Vector::Ones(D.cols()) / std::sqrt(double(D.cols()));
    double lambda = 0;
    for (int it = 0; it < 10000; ++it) {
        const Vector w = D * (D * v);
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0) return 0.0;
        v = w / norm;
        if (std::abs(next - lambda) <= 1e-8 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // lambda estimates ||D||^2
    return std::sqrt(std::sqrt(std::max(lambda, 0.0)));
}

DiagonalModel::DiagonalModel(Vector sigma, Vector data)
    : grid_(sigma.size(), 1.0, double(sigma.size())), sigma_(std::move(sigma)), data_(std::move(data))
{
    if (data_.size() != sigma_.size()) throw Error(ErrorKind::invalid_input, "data and spectrum lengths differ");
}

CodomainElem DiagonalModel::apply(const GridFn& phi) const
{
    return {GridFn(grid_, sigma_.cwiseProduct(phi.values()) - data_), 0.0};
}

CodomainElem DiagonalModel::deriv_apply(const GridFn&, const GridFn& h) const
{
    return {GridFn(grid_, sigma_.cwiseProduct(h.values())), 0.0};
}

GridFn DiagonalModel::deriv_adjoint(const GridFn&, const CodomainElem& y) const
{
    return GridFn(grid_, sigma_.cwiseProduct(y.ufun.values()));
}

Vector decay_spectrum(const SpectralDecay& decay, Eigen::Index n)
{
    if (n < 2) throw Error(ErrorKind::invalid_input, "spectrum needs at least 2 entries");
    Vector s(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double jj = double(j + 1);
        if (const auto* p = std::get_if<PolynomialDecay>(&decay)) {
            if (!(p->a > 0)) throw Error(ErrorKind::invalid_input, "polynomial decay exponent must be positive");
            s[j] = std::pow(jj, -p->a);
        } else {
            const double c = std::get<ExponentialDecay>(decay).c;
            if (!(c > 0)) throw Error(ErrorKind::invalid_input, "exponential decay rate must be positive");
            s[j] = std::exp(-c * jj);
        }
    }
    return s;
}

RateReport rate_experiment(const RateConfig& cfg)
{
    if (cfg.deltas.size() < 2) throw Error(ErrorKind::invalid_input, "rate experiment needs at least 2 noise levels");
    for (double d : cfg.deltas)
        if (!(d > 0)) throw Error(ErrorKind::invalid_input, "noise levels must be positive");
    const bool holder = std::holds_alternative<HolderIndex>(cfg.sc.kind());

    const Vector sigma = decay_spectrum(cfg.decay, cfg.n);
    const Grid1D grid(cfg.n, 1.0, double(cfg.n));
    Vector coef(cfg.n);
    for (Eigen::Index j = 0; j < cfg.n; ++j) {
        const double t = sigma[j] * sigma[j];
        if (t > cfg.sc.t_max())
            throw Error(ErrorKind::invalid_input, "spectrum exceeds the domain of the index function");
        coef[j] = lambda_eval(cfg.sc, t) * std::pow(double(j + 1), -0.51);
    }
    const GridFn phi_true(grid, coef / l2_norm(GridFn(grid, coef)));

    std::mt19937_64 gen(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector xi(cfg.n);
    for (auto& x : xi) x = normal(gen);
    xi /= l2_norm(GridFn(grid, xi));

    RateReport rep;
    rep.deltas = cfg.deltas;
    rep.errors.assign(cfg.deltas.size(), 0.0);
    rep.stop_indices.assign(cfg.deltas.size(), 0);
    const GridFn phi0 = GridFn::constant(grid, 0.0);
    parallel_for(cfg.deltas.size(), worker_count(), [&](std::size_t i) {
        const double delta = cfg.deltas[i];
        const DiagonalModel model(sigma, sigma.cwiseProduct(phi_true.values()) + delta * xi);
        IrgnmConfig ic;
        ic.k_max = cfg.k_max;
        ic.subproblem = cfg.cg;
        ic.stopping = APrioriStop{delta, 0.0, cfg.sc};
        const IterateTrace tr = irgnm_run(model, Penalty::quadratic(phi0), phi0, ic);
        if (tr.stop_reason != "a_priori")
            throw Error(ErrorKind::numerical, "rate run at delta " + std::to_string(delta) + " stopped by " + tr.stop_reason);
        rep.errors[i] = l2_norm(tr.selected() - phi_true);
        rep.stop_indices[i] = tr.stop_index;
    });

    std::vector<double> x, y;
    for (std::size_t i = 0; i < rep.deltas.size(); ++i) {
        if (!(rep.errors[i] > 0)) throw Error(ErrorKind::numerical, "zero reconstruction error; fit is degenerate");
        x.push_back(holder ? std::log(rep.deltas[i]) : std::log(-std::log(rep.deltas[i])));
        y.push_back(std::log(rep.errors[i]));
    }
    rep.fit = linear_fit(x, y);
    if (holder) {
        const double mu = std::get<HolderIndex>(cfg.sc.kind()).mu;
        rep.exponent = rep.fit.slope;
        rep.target = 2 * mu / (2 * mu + 1);
    } else {
        rep.exponent = -rep.fit.slope;
        rep.target = std::get<LogarithmicIndex>(cfg.sc.kind()).p;
    }
    return rep;
}

} // namespace irgnm
