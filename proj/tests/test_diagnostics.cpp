#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "irgnm/diagnostics.hpp"
#include "irgnm/pipeline.hpp"

using namespace irgnm;
using namespace irgnm::test;

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

TEST_SUITE("diagnostics")
{
    TEST_CASE("identity model has unit singular values")
    {
        const DiagonalModel model(Vector::Ones(20), Vector::Zero(20));
        const JacobianMatrix J = assemble_jacobian(model, GridFn(model.domain_grid()));
        const Vector s = singular_values(J);
        CHECK(s.size() == 20);
        CHECK((s.array() - 1).abs().maxCoeff() <= 1e-12);
    }

    TEST_CASE("singular values of diagonal and rank-one operators")
    {
        Vector sigma(3);
        sigma << 1, 3, 2;
        const DiagonalModel diag(sigma, Vector::Zero(3));
        const Vector s = singular_values(assemble_jacobian(diag, GridFn(diag.domain_grid())));
        CHECK(s[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(s[1] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-12));

        Gen gen(51);
        const Grid1D g(15, 0.0, 1.0);
        const Vector u = gen.normal_vector(15), v = gen.normal_vector(15);
        const MatrixModel rank1(u * v.transpose(), Vector::Zero(15), g, g, Vector::Zero(15), 0.0);
        const Vector r = singular_values(assemble_jacobian(rank1, GridFn(g)));
        CHECK(r[0] > 1.0);
        CHECK(r[1] <= 1e-12 * r[0]);
    }

    TEST_CASE("jacobian agrees with deriv_apply")
    {
        Gen gen(52);
        const auto d = exact_density_shared(64);
        const Grid1D& z = d->z_grid();
        for (OperatorForm form : {OperatorForm::density_form, OperatorForm::cdf_form}) {
            const BinaryIVOperator op(d, u_grid_for(*d, GridFn::constant(z, d->EY()), 64), form);
            const GridFn phi = GridFn::sample(z, [](double t) { return true_phi(t); });
            const JacobianMatrix J = assemble_jacobian(op, phi);
            CHECK(J.raw.rows() == 65);
            CHECK(J.raw.cols() == 64);
            for (int trial = 0; trial < 100; ++trial) {
                const GridFn h = gen.normal_fn(z);
                const CodomainElem ref = op.deriv_apply(phi, h);
                const Vector got = J.multiply(h.values());
                const double scale = ref.ufun.values().cwiseAbs().maxCoeff() + std::abs(ref.scalar);
                CHECK((got.head(64) - ref.ufun.values()).cwiseAbs().maxCoeff() <= 1e-9 * scale);
                CHECK(std::abs(got[64] - ref.scalar) <= 1e-9 * scale);
            }
        }
    }

    TEST_CASE("uninformative instrument leaves rank one")
    {
        const auto d = exact_density_shared(48);
        const auto flat = std::make_shared<const JointDensityGrid>(d->y_grid(), d->z_grid(), d->f(0),
                                                                   (d->w1() / d->w0()) * d->f(0), d->w0(), d->EY());
        const BinaryIVOperator op(flat, d->y_grid(), OperatorForm::cdf_form);
        const JacobianMatrix J = assemble_jacobian(op, GridFn::constant(d->z_grid(), 0.4));
        CHECK(J.raw.topRows(48).cwiseAbs().maxCoeff() <= 1e-12);
        const Vector s = singular_values(J);
        CHECK(s[0] > 0.1);
        CHECK(s[1] <= 1e-10);
    }

    TEST_CASE("largest singular value is the operator norm")
    {
        const auto d = exact_density_shared(64);
        const Grid1D& z = d->z_grid();
        const BinaryIVOperator op(d, u_grid_for(*d, GridFn::constant(z, d->EY()), 64), OperatorForm::cdf_form);
        const GridFn phi = GridFn::sample(z, [](double t) { return true_phi(t); });
        const Vector s = singular_values(assemble_jacobian(op, phi));
        for (Eigen::Index i = 1; i < s.size(); ++i) CHECK(s[i] <= s[i - 1]);
        CHECK(s[s.size() - 1] >= 0);
        const double lam = normal_operator_norm(op.linearize(phi), 500);
        CHECK(std::sqrt(lam) == doctest::Approx(s[0]).epsilon(1e-6));
    }

    TEST_CASE("dense assembly is capped")
    {
        const DiagonalModel big(Vector::Ones(kMaxJacobianColumns + 1), Vector::Zero(kMaxJacobianColumns + 1));
        CHECK_THROWS_AS(assemble_jacobian(big, GridFn(big.domain_grid())), Error);
    }

    TEST_CASE("linear fits")
    {
        const LinearFit f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
        CHECK(f.slope == doctest::Approx(2.0));
        CHECK(f.intercept == doctest::Approx(1.0));
        CHECK(f.r2 == doctest::Approx(1.0));
        CHECK_THROWS_AS(linear_fit({1}, {1}), Error);
        CHECK_THROWS_AS(linear_fit({2, 2, 2}, {1, 2, 3}), Error);

        Vector sigma(5);
        for (int j = 0; j < 5; ++j) sigma[j] = 3 * std::exp(-0.7 * (j + 1));
        const LinearFit d = log_decay_fit(sigma, 1, 5);
        CHECK(d.slope == doctest::Approx(-0.7).epsilon(1e-12));
        CHECK(d.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("spectra")
    {
        const Vector p = decay_spectrum(PolynomialDecay{2.0}, 4);
        CHECK(p[3] == doctest::Approx(1.0 / 16));
        const Vector e = decay_spectrum(ExponentialDecay{0.5}, 3);
        CHECK(e[2] == doctest::Approx(std::exp(-1.5)));
    }

    TEST_CASE("gamma bound examples")
    {
        const DiagonalModel a(Vector::Ones(2), Vector::Zero(2)), b(2 * Vector::Ones(2), Vector::Zero(2));
        const GridFn zero(a.domain_grid());
        const JacobianMatrix Ja = assemble_jacobian(a, zero), Jb = assemble_jacobian(b, zero);
        CHECK(gamma_bound(Ja, Ja) == 0.0);
        CHECK(gamma_bound(Ja, Jb) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));

        Gen gen(53);
        for (int trial = 0; trial < 20; ++trial) {
            const Grid1D g(10, 0.0, 1.0), c(12, 0.0, 2.0);
            const MatrixModel m1(Eigen::MatrixXd::NullaryExpr(12, 10, [&] { return gen.normal(); }),
                                 gen.normal_vector(10), g, c, Vector::Zero(12), 0.0);
            const MatrixModel m2(Eigen::MatrixXd::NullaryExpr(12, 10, [&] { return gen.normal(); }),
                                 gen.normal_vector(10), g, c, Vector::Zero(12), 0.0);
            const JacobianMatrix J1 = assemble_jacobian(m1, GridFn(g)), J2 = assemble_jacobian(m2, GridFn(g));
            CHECK(gamma_bound(J1, J2) == gamma_bound(J2, J1));
            // against a dense eigen-decomposition of the Gram difference
            const Matrix A = J1.weighted(), B = J2.weighted();
            const Matrix D = A.transpose() * A - B.transpose() * B;
            const double norm = Eigen::SelfAdjointEigenSolver<Matrix>(D).eigenvalues().cwiseAbs().maxCoeff();
            CHECK(gamma_bound(J1, J2) == doctest::Approx(std::sqrt(norm)).epsilon(1e-6));
        }
        const DiagonalModel c(Vector::Ones(3), Vector::Zero(3));
        CHECK_THROWS_AS(gamma_bound(Ja, assemble_jacobian(c, GridFn(c.domain_grid()))), Error);
    }

    TEST_CASE("estimated operators approach the exact one")
    {
        const SimDesign design;
        const auto exact = exact_density_shared(48);
        const Grid1D& z = exact->z_grid();
        const Grid1D u = u_grid_for(*exact, GridFn::constant(z, exact->EY()), 48);
        const GridFn phi = GridFn::sample(z, [](double t) { return true_phi(t); });
        const JacobianMatrix J = assemble_jacobian(BinaryIVOperator(exact, u, OperatorForm::cdf_form), phi);
        KdeConfig k;
        k.n_y = 48;
        k.n_z = 48;
        std::vector<double> med;
        for (std::size_t n : {1000u, 10000u, 100000u}) {
            std::vector<double> g;
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const Sample s = sample(design, n, derive_seed(777, seed));
                const auto est = std::make_shared<const JointDensityGrid>(kde_fit(s, k, kde_y_grid(s, k), z));
                g.push_back(gamma_bound(J, assemble_jacobian(BinaryIVOperator(est, u, OperatorForm::cdf_form), phi)));
            }
            med.push_back(median(g));
        }
        MESSAGE("median gamma: " << med[0] << ", " << med[1] << ", " << med[2]);
        CHECK(med[1] < med[0]);
        CHECK(med[2] < med[1]);
    }

    TEST_CASE("logarithmic rate experiment")
    {
        RateConfig rc;
        rc.sc = SourceCondition::logarithmic(1.0);
        rc.decay = ExponentialDecay{0.5};
        rc.n = 300;
        for (int e = 2; e <= 12; ++e) rc.deltas.push_back(std::pow(10.0, -0.5 * e));
        const RateReport r = rate_experiment(rc);
        CHECK(r.target == 1.0);
        CHECK(r.exponent >= 0.7);
        CHECK(r.exponent <= 1.3);
        for (std::size_t i = 1; i < r.errors.size(); ++i) CHECK(r.errors[i] < r.errors[i - 1]);
    }

    TEST_CASE("rate experiment rejects bad input")
    {
        RateConfig rc;
        rc.deltas = {1e-2};
        CHECK_THROWS_AS(rate_experiment(rc), Error);
        rc.deltas = {1e-2, -1.0};
        CHECK_THROWS_AS(rate_experiment(rc), Error);
        rc.deltas = {1e-2, 1e-3};
        rc.sc = SourceCondition::logarithmic(1.0);
        rc.decay = PolynomialDecay{1.0}; // sigma_1^2 = 1 is outside (0, exp(-1)]
        CHECK_THROWS_AS(rate_experiment(rc), Error);
    }
}
