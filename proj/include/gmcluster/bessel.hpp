#pragma once
// Modified Bessel functions I0, I1, K0, K1 for real positive arguments,
// built from scratch so no platform special-function library is involved.
//
// K0/K1 use the classical ascending series below the crossover x = 2
// (Abramowitz & Stegun 9.6.10-9.6.11, with digamma constants written out),
// and above it the exponentially scaled integral representation
//   K_nu(x) = e^{-x} * Int_0^inf e^{-x(cosh t - 1)} cosh(nu t) dt,
// evaluated by the trapezoidal rule. The integrand is even and analytic in
// a strip, so the trapezoid converges geometrically; a step of 0.2 already
// puts the discretization error below double roundoff.

#include <cmath>
#include <stdexcept>

namespace gmcluster {

inline double bessel_i0(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

inline double bessel_i1(double x)
{
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k + 1));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

namespace detail {

constexpr double euler_gamma = 0.57721566490153286060651209008;

// trapezoidal evaluation of e^{x} K_nu(x) for nu = 0, 1 (x > 0)
inline double knu_scaled_integral(int nu, double x)
{
    // truncate where the integrand drops below ~1e-19
    const double tmax = std::acosh(1.0 + 44.0 / x);
    const int n = std::max(24, int(tmax / 0.2) + 1);
    const double h = tmax / double(n);
    double sum = 0.5;  // t = 0 endpoint, integrand value 1 (cosh(0) = 1)
    for (int j = 1; j <= n; ++j) {
        double t = h * double(j);
        double weight = (nu == 0) ? 1.0 : std::cosh(t);
        sum += std::exp(-x * (std::cosh(t) - 1.0)) * weight;
    }
    return sum * h;
}

inline double k0_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0, hk = 0.0, sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (double(k) * double(k));
        hk += 1.0 / double(k);
        double add = term * hk;
        sum += add;
        if (add < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return -(std::log(0.5 * x) + euler_gamma) * bessel_i0(x) + sum;
}

inline double k1_series(double x)
{
    // K1(x) = 1/x + log(x/2) I1(x) - (x/4) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    const double q = 0.25 * x * x;
    double fact = 1.0;               // q^k / (k! (k+1)!)
    double psi_sum = -2.0 * euler_gamma + 1.0;  // psi(1)+psi(2)
    double sum = fact * psi_sum;
    for (int k = 1; k < 60; ++k) {
        fact *= q / (double(k) * double(k + 1));
        psi_sum += 1.0 / double(k) + 1.0 / double(k + 1);
        double add = fact * psi_sum;
        sum += add;
        if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return 1.0 / x + std::log(0.5 * x) * bessel_i1(x) - 0.25 * x * sum;
}

}  // namespace detail

inline double bessel_k0(double x)
{
    if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be positive");
    if (x <= 2.0) return detail::k0_series(x);
    return std::exp(-x) * detail::knu_scaled_integral(0, x);
}

inline double bessel_k1(double x)
{
    if (!(x > 0.0)) throw std::domain_error("bessel_k1: argument must be positive");
    if (x <= 2.0) return detail::k1_series(x);
    return std::exp(-x) * detail::knu_scaled_integral(1, x);
}

// e^{x} K_nu(x); avoids underflow for large arguments (ratio diagnostics).
inline double bessel_k0_scaled(double x)
{
    if (!(x > 0.0)) throw std::domain_error("bessel_k0_scaled: argument must be positive");
    if (x <= 2.0) return std::exp(x) * detail::k0_series(x);
    return detail::knu_scaled_integral(0, x);
}

inline double bessel_k1_scaled(double x)
{
    if (!(x > 0.0)) throw std::domain_error("bessel_k1_scaled: argument must be positive");
    if (x <= 2.0) return std::exp(x) * detail::k1_series(x);
    return detail::knu_scaled_integral(1, x);
}

}  // namespace gmcluster
