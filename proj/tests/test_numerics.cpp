#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmcluster/numerics.hpp"

using namespace gmcluster;

TEST_CASE("tridiagonal solve against dense multiply")
{
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    const std::size_t n = 40;
    std::vector<double> sub(n), diag(n), sup(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        sub[i] = -dist(rng);
        sup[i] = -dist(rng);
        diag[i] = 4.0 + dist(rng);
        x[i] = dist(rng) - 1.0;
    }
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = diag[i] * x[i];
        if (i > 0) rhs[i] += sub[i] * x[i - 1];
        if (i + 1 < n) rhs[i] += sup[i] * x[i + 1];
    }
    auto got = solve_tridiag(sub, diag, sup, rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("simpson on smooth integrands")
{
    const int n = 2001;
    const double h = 1.0 / (n - 1);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::exp(-double(i) * h);
    CHECK(simpson_uniform(f, h) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

    // odd interval count goes through the 3/8 closure
    std::vector<double> g(f.begin(), f.begin() + 2000);
    double exact = 1.0 - std::exp(-(1999.0 * h));
    CHECK(simpson_uniform(g, h) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("QL eigenvalues of the discrete 1-D Laplacian")
{
    // -u'' on n points, Dirichlet: eigenvalues 4 sin^2(k pi / (2(n+1))) / h^2
    const std::size_t n = 50;
    const double h = 1.0 / double(n + 1);
    std::vector<double> d(n, 2.0 / (h * h)), e(n - 1, -1.0 / (h * h));
    auto ev = tridiag_eigenvalues(d, e);
    for (std::size_t k = 1; k <= n; ++k) {
        double s = std::sin(0.5 * double(k) * M_PI * h);
        double exact = 4.0 * s * s / (h * h);
        CHECK(ev[k - 1] == doctest::Approx(exact).epsilon(1e-11));
    }
}

TEST_CASE("tridiagonal inverse iteration recovers an eigenvector")
{
    const std::size_t n = 30;
    std::vector<double> d(n, 2.0), e(n - 1, -1.0);
    auto ev = tridiag_eigenvalues(d, e);
    auto v = tridiag_eigenvector(d, e, ev[0]);
    // residual || (A - lambda) v ||
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double av = d[i] * v[i] - ev[0] * v[i];
        if (i > 0) av += e[i - 1] * v[i - 1];
        if (i + 1 < n) av += e[i] * v[i + 1];
        res = std::max(res, std::fabs(av));
    }
    CHECK(res < 1e-10);
}

TEST_CASE("upper incomplete gamma against integration by parts")
{
    // Gamma(1, x) = e^-x, Gamma(2, x) = (x+1) e^-x
    for (double x : {30.0, 50.0, 80.0}) {
        CHECK(upper_gamma_asymptotic(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
        CHECK(upper_gamma_asymptotic(2.0, x) ==
              doctest::Approx((x + 1.0) * std::exp(-x)).epsilon(1e-12));
    }
}

TEST_CASE("periodic spectral derivative of a trigonometric polynomial")
{
    const std::size_t n = 64;
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = 2.0 * M_PI * double(j) / double(n);
        f[j] = std::sin(3.0 * t) + 0.5 * std::cos(5.0 * t);
    }
    auto d1 = periodic_spectral_derivative(f, 1);
    auto d2 = periodic_spectral_derivative(f, 2);
    for (std::size_t j = 0; j < n; ++j) {
        double t = 2.0 * M_PI * double(j) / double(n);
        CHECK(d1[j] == doctest::Approx(3.0 * std::cos(3.0 * t) - 2.5 * std::sin(5.0 * t)).epsilon(1e-9));
        CHECK(d2[j] ==
              doctest::Approx(-9.0 * std::sin(3.0 * t) - 12.5 * std::cos(5.0 * t)).epsilon(1e-9));
    }
}

TEST_CASE("bisection")
{
    double root = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
    CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0, 1e-12),
                    numeric_error);
}
