#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "irgnm/source_condition.hpp"

using namespace irgnm;
using irgnm::test::Gen;

namespace {

// Theta^{-1} computed independently: closed form for Hoelder, plain bisection
// in t for the logarithmic case.
double theta_inverse_oracle(const SourceCondition& sc, double s)
{
    if (const auto* h = std::get_if<HolderIndex>(&sc.kind())) return std::pow(s, 1.0 / (h->mu + 0.5));
    const double p = std::get<LogarithmicIndex>(sc.kind()).p;
    double lo = 1e-300, hi = std::exp(-1.0);
    for (int i = 0; i < 4000; ++i) {
        const double mid = std::sqrt(lo * hi);
        (std::sqrt(mid) * std::pow(-std::log(mid), -p) < s ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace

TEST_SUITE("source_condition")
{
    TEST_CASE("lambda_eval examples")
    {
        CHECK(lambda_eval(SourceCondition::holder(0.5), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(lambda_eval(SourceCondition::logarithmic(1.0), std::exp(-2.0)) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK_THROWS_AS(lambda_eval(SourceCondition::holder(0.5), 0.0), Error);
        CHECK_THROWS_AS(lambda_eval(SourceCondition::logarithmic(1.0), 0.5), Error);
    }

    TEST_CASE("parameter ranges are enforced")
    {
        CHECK_THROWS_AS(SourceCondition::holder(0.0), Error);
        CHECK_THROWS_AS(SourceCondition::holder(0.6), Error);
        CHECK_THROWS_AS(SourceCondition::logarithmic(0.0), Error);
        CHECK_THROWS_AS(SourceCondition::holder(0.5, 0.0), Error);
        CHECK(SourceCondition::holder(0.5, 2.5).beta() == 2.5);
    }

    TEST_CASE("index functions are concave with sqrt(t)/Lambda(t) non-decreasing")
    {
        for (const SourceCondition& sc :
             {SourceCondition::holder(0.1), SourceCondition::holder(0.25), SourceCondition::holder(0.5),
              SourceCondition::logarithmic(0.5), SourceCondition::logarithmic(1.0), SourceCondition::logarithmic(3.0)}) {
            // (-ln t)^-p is concave only for t <= exp(-(p+1)), and sqrt(t)/Lambda
            // increases only for t <= exp(-2p)
            double top = -1.0;
            if (const auto* l = std::get_if<LogarithmicIndex>(&sc.kind())) top = -std::max(2 * l->p, l->p + 1);
            std::vector<double> t;
            for (int i = 0; i <= 200; ++i) t.push_back(std::exp(-30.0 + (30.0 + top) * i / 200.0));
            for (std::size_t i = 1; i < t.size(); ++i)
                CHECK(std::sqrt(t[i]) / lambda_eval(sc, t[i]) >=
                      std::sqrt(t[i - 1]) / lambda_eval(sc, t[i - 1]) * (1 - 1e-14));
            // midpoint concavity on the same sample
            for (std::size_t i = 1; i < t.size(); ++i) {
                const double a = t[i - 1], b = t[i], m = 0.5 * (a + b);
                CHECK(lambda_eval(sc, m) >= 0.5 * (lambda_eval(sc, a) + lambda_eval(sc, b)) * (1 - 1e-14));
            }
        }
    }

    TEST_CASE("logarithmic index loses concavity near the end of its domain")
    {
        const SourceCondition sc = SourceCondition::logarithmic(1.0);
        const double a = std::exp(-1.6), b = std::exp(-1.0), m = 0.5 * (a + b);
        CHECK(lambda_eval(sc, m) < 0.5 * (lambda_eval(sc, a) + lambda_eval(sc, b)));
        CHECK(std::sqrt(b) / lambda_eval(sc, b) < std::sqrt(a) / lambda_eval(sc, a));
    }

    TEST_CASE("theta and its inverse")
    {
        const SourceCondition h = SourceCondition::holder(0.5);
        CHECK(theta_eval(h, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(theta_inverse(h, 0.25) == doctest::Approx(0.25).epsilon(1e-12));

        const SourceCondition l = SourceCondition::logarithmic(1.0);
        const double s = theta_eval(l, std::exp(-2.0));
        CHECK(std::abs(theta_eval(l, theta_inverse(l, s)) - s) <= 1e-12 * s);

        CHECK(theta_inverse(SourceCondition::holder(0.25), 0.1) == doctest::Approx(std::pow(0.1, 4.0 / 3.0)).epsilon(1e-11));
        CHECK(theta_inverse(SourceCondition::holder(0.25), 0.1) == doctest::Approx(0.046416).epsilon(1e-5));

        CHECK_THROWS_AS(theta_inverse(h, 0.0), Error);
        CHECK_THROWS_AS(theta_inverse(l, 1.0), Error);
    }

    TEST_CASE("theta round trip on random arguments")
    {
        Gen gen(21);
        for (int trial = 0; trial < 200; ++trial) {
            const SourceCondition sc = trial % 2 ? SourceCondition::holder(gen.uniform(0.01, 0.5))
                                                 : SourceCondition::logarithmic(gen.uniform(0.1, 4));
            const double t = std::exp(gen.uniform(-40, -1.0));
            const double s = theta_eval(sc, t);
            const double back = theta_inverse(sc, s);
            CHECK(std::abs(theta_eval(sc, back) - s) <= 1e-12 * s);
            CHECK(std::abs(back - theta_inverse_oracle(sc, s)) <= 1e-9 * back);
        }
    }

    TEST_CASE("rate_bound examples")
    {
        const SourceCondition h = SourceCondition::holder(0.5);
        CHECK(rate_bound(h, 0.01, 0.0) == doctest::Approx(0.01).epsilon(1e-10));
        CHECK(rate_bound(h, 0.0, 0.1) == doctest::Approx(std::pow(0.1, 2.0)).epsilon(1e-12));
        CHECK_THROWS_AS(rate_bound(h, 0.0, 0.0), Error);

        const SourceCondition l = SourceCondition::logarithmic(1.0);
        const double d = std::exp(-10.0);
        const double level = std::max(theta_inverse_oracle(l, d), d * d);
        CHECK(rate_bound(l, d, d) == doctest::Approx(std::pow(-std::log(level), -2.0)).epsilon(1e-8));
        // same order as (-ln delta)^{-2} = 0.01
        CHECK(rate_bound(l, d, d) > 0.001);
        CHECK(rate_bound(l, d, d) < 0.01);
    }

    TEST_CASE("check_eta_q truth table")
    {
        CHECK(check_eta_q(0.0, 1.0001));
        CHECK(check_eta_q(0.0, 50.0));
        CHECK(check_eta_q(0.05, 1 / 0.9));
        CHECK_FALSE(check_eta_q(0.3, 1 / 0.9));
        // left side values quoted alongside the examples
        CHECK(4 * 0.05 * 1.05 / std::pow(0.95, 3) == doctest::Approx(0.2449).epsilon(1e-3));
        CHECK(std::pow(1 / 0.9, -1.5) == doctest::Approx(0.8538).epsilon(1e-3));
        CHECK_THROWS_AS(check_eta_q(1.0, 2.0), Error);
        CHECK_THROWS_AS(check_eta_q(0.1, 1.0), Error);
    }
}
