#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmcluster/geometry.hpp"
#include "oracles.hpp"

using namespace gmcluster;

static double ellipse_kappa(double a, double b, double t)
{
    double g = a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t);
    return a * b / std::pow(g, 1.5);
}

TEST_CASE("curvature of circle and ellipse")
{
    auto circle = BoundaryCurve::make_circle(2.0);
    for (double t : {0.0, 1.0, 3.0, 6.0}) CHECK(circle.curvature(t) == doctest::Approx(0.5).epsilon(1e-12));

    auto ell = BoundaryCurve::make_ellipse(2.0, 1.0);
    CHECK(ell.curvature(0.0) == doctest::Approx(2.0).epsilon(1e-12));          // a / b^2
    CHECK(ell.curvature(M_PI_2) == doctest::Approx(0.25).epsilon(1e-12));      // b / a^2

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
    for (int i = 0; i < 100; ++i) {
        double t = dist(rng);
        CHECK(std::fabs(ell.curvature(t) - ellipse_kappa(2.0, 1.0, t)) < 1e-8);
    }
}

TEST_CASE("curve closure and arc length additivity")
{
    auto ell = BoundaryCurve::make_ellipse(2.0, 1.0);
    CHECK(ell.is_closed(1e-10));
    double total = ell.total_arc_length();
    CHECK(total > 0.0);
    double s1 = ell.arc_length(1.0);
    double s2 = ell.arc_length(2.0);
    CHECK(s1 > 0.0);
    CHECK(s2 > s1);
    // Ramanujan's approximation to the ellipse perimeter as a sanity anchor
    double hh = std::pow((2.0 - 1.0) / (2.0 + 1.0), 2);
    double ram = M_PI * 3.0 * (1.0 + 3.0 * hh / (10.0 + std::sqrt(4.0 - 3.0 * hh)));
    CHECK(total == doctest::Approx(ram).epsilon(1e-6));
    // inverse map
    for (double s : {0.3, 2.0, 5.5}) {
        double t = ell.param_of_arc_length(s);
        CHECK(ell.arc_length(t) == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("Gauss-Bonnet: closed convex curves integrate curvature to 2 pi")
{
    for (auto curve : {BoundaryCurve::make_circle(1.7), BoundaryCurve::make_ellipse(2.0, 1.0),
                       BoundaryCurve::make_radial_fourier(1.0, {0.0, 0.05}, {0.02})}) {
        const int n = 20001;
        std::vector<double> f(n);
        double step = 2.0 * M_PI / double(n - 1);
        for (int i = 0; i < n; ++i) {
            double t = step * double(i);
            f[i] = curve.curvature(t) * curve.d1(t).norm();
        }
        CHECK(simpson_uniform(f, step) == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
    }
}

TEST_CASE("arc length frames")
{
    auto circle = BoundaryCurve::make_circle(1.0);
    auto f0 = circle.arc_length_frame(0.0);
    CHECK(f0.position.x == doctest::Approx(1.0));
    CHECK(f0.position.y == doctest::Approx(0.0));
    CHECK(f0.tangent.x == doctest::Approx(0.0));
    CHECK(f0.tangent.y == doctest::Approx(1.0));
    CHECK(f0.inward_normal.x == doctest::Approx(-1.0));
    CHECK(f0.inward_normal.y == doctest::Approx(0.0).epsilon(1e-14));

    auto f1 = circle.arc_length_frame(M_PI_2);
    CHECK(f1.position.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f1.position.y == doctest::Approx(1.0));
    CHECK(f1.tangent.x == doctest::Approx(-1.0));
    CHECK(f1.inward_normal.y == doctest::Approx(-1.0));

    auto ell = BoundaryCurve::make_ellipse(2.0, 1.0);
    auto f2 = ell.arc_length_frame(0.0);
    CHECK(f2.position.x == doctest::Approx(2.0));
    CHECK(f2.tangent.y == doctest::Approx(1.0));
    CHECK(f2.inward_normal.x == doctest::Approx(-1.0));

    // orthonormality at random parameters
    for (double t : {0.3, 1.1, 2.9, 4.2}) {
        auto fr = ell.arc_length_frame(t);
        CHECK(fr.tangent.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fr.inward_normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(fr.tangent.dot(fr.inward_normal)) < 1e-14);
    }
}

TEST_CASE("curvature maxima: circle is degenerate, ellipse has two")
{
    auto rep_circ = find_curvature_maxima(BoundaryCurve::make_circle(1.0));
    CHECK(rep_circ.maxima.empty());
    CHECK(rep_circ.constant_curvature);
    CHECK(rep_circ.diagnostic.find("constant curvature") != std::string::npos);

    auto ell = BoundaryCurve::make_ellipse(2.0, 1.0);
    auto rep = find_curvature_maxima(ell);
    REQUIRE(rep.maxima.size() == 2);
    CHECK(std::fabs(rep.maxima[0].t - 0.0) < 1e-10);
    CHECK(std::fabs(rep.maxima[1].t - M_PI) < 1e-10);
    CHECK(rep.maxima[0].h == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(rep.maxima[1].h == doctest::Approx(2.0).epsilon(1e-10));
    // closed form: h''_ss(0) = -3 a (a^2 - b^2) / b^6 = -18
    CHECK(rep.maxima[0].h_ss == doctest::Approx(-18.0).epsilon(1e-8));
    for (const auto& m : rep.maxima) {
        CHECK(m.h_ss < 0.0);
        CHECK(std::fabs(ell.curvature_ds(m.t)) < 1e-8);
    }
}

TEST_CASE("perturbed circle: two maxima with h'' < 0, against an FD oracle")
{
    auto c = BoundaryCurve::make_radial_fourier(1.0, {0.0, 1e-3}, {});
    auto rep = find_curvature_maxima(c);
    REQUIRE(rep.maxima.size() == 2);
    for (const auto& m : rep.maxima) CHECK(m.h_ss < 0.0);

    // numerical differentiation oracle for kappa(t) -> d kappa/ds at the root
    auto kappa_s = [&](double t) {
        double dk = oracle::fd_derivative([&](double x) { return c.curvature(x); }, t, 1e-5);
        return dk / c.d1(t).norm();
    };
    for (const auto& m : rep.maxima) CHECK(std::fabs(kappa_s(m.t)) < 1e-7);
    // FD second derivative matches the analytic h''
    for (const auto& m : rep.maxima) {
        double d2 = oracle::fd_derivative(kappa_s, m.t, 1e-4) / c.d1(m.t).norm();
        CHECK(d2 == doctest::Approx(m.h_ss).epsilon(1e-4));
    }
}

TEST_CASE("maxima are invariant under parameter shifts")
{
    auto base = find_curvature_maxima(BoundaryCurve::make_ellipse(2.0, 1.0));
    auto shifted_curve = BoundaryCurve::make_ellipse(2.0, 1.0);
    shifted_curve.set_phase(0.7);
    auto shifted = find_curvature_maxima(shifted_curve);
    REQUIRE(base.maxima.size() == shifted.maxima.size());
    // compare physical positions irrespective of parameter labels
    for (const auto& m : base.maxima) {
        double best = 1e300;
        for (const auto& s : shifted.maxima) best = std::min(best, (m.position - s.position).norm());
        CHECK(best < 1e-8);
    }
}

TEST_CASE("radial fourier validation")
{
    CHECK_THROWS_AS(BoundaryCurve::make_radial_fourier(0.5, {0.6}, {}), geometry_error);
    CHECK_THROWS_AS(BoundaryCurve::make_circle(-1.0), geometry_error);
}
