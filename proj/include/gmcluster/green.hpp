#pragma once
// Half-plane Neumann Green's function of -Laplace + 1. By even reflection
// across the boundary it equals twice the free-space kernel, i.e.
//   G0(r) = K0(r) / pi,  G0'(r) = -K1(r) / pi,
// together with its small-r expansion coefficients and the neighbour
// interaction order-of-magnitude estimate used by the reduced system.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gmcluster/bessel.hpp"
#include "gmcluster/numerics.hpp"

namespace gmcluster {

struct expansion_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double g0(double r)
{
    if (!(r > 0.0)) throw std::domain_error("g0: r must be positive");
    return bessel_k0(r) / M_PI;
}

inline double g0_prime(double r)
{
    if (!(r > 0.0)) throw std::domain_error("g0_prime: r must be positive");
    return -bessel_k1(r) / M_PI;
}

// Second radial derivative from the Bessel recurrence K0'' = K0 + K1/r.
inline double g0_second(double r)
{
    if (!(r > 0.0)) throw std::domain_error("g0_second: r must be positive");
    return (bessel_k0(r) + bessel_k1(r) / r) / M_PI;
}

struct GreenExpansion {
    double c1;            // constant term
    double c2;            // r^2 log r coefficient
    double c3;            // r^2 coefficient (head of the smooth remainder)
    double fit_residual;  // max abs residual over the sample set
};

// Coefficients of G0(r) = -(1/pi) log r + c1 + c2 r^2 log r + psi(r),
// recovered by fitting g0 samples at small radii against {1, r^2 log r, r^2}.
inline GreenExpansion expansion_coefficients()
{
    std::vector<double> radii;
    for (double r = 1e-5; r <= 1.05e-2; r *= std::sqrt(10.0)) radii.push_back(r);
    const std::size_t n = radii.size();
    std::vector<double> y(n);
    std::vector<std::vector<double>> basis(3, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double r = radii[i];
        y[i] = g0(r) + std::log(r) / M_PI;
        basis[0][i] = 1.0;
        basis[1][i] = r * r * std::log(r);
        basis[2][i] = r * r;
    }
    std::vector<double> coef = least_squares_fit(basis, y);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = coef[0] * basis[0][i] + coef[1] * basis[1][i] + coef[2] * basis[2][i];
        res = std::max(res, std::fabs(fit - y[i]));
    }
    if (res > 1e-8)
        throw expansion_mismatch_error("expansion_coefficients: fit residual above 1e-8");
    return {coef[0], coef[1], coef[2], res};
}

// Predicted order of magnitude of the |i-j| = hops neighbour interaction,
// (q |log q|)^hops with q the small parameter eps*D/xi_sigma. Equilibrium
// spacing satisfies sigma*d = |log q| - (3/2) log|log q| + O(1), so |log q|
// is recovered from the spacing by the fixed point L = sigma*d + (3/2)log L.
inline double interaction_order(double spacing, double sigma, int hops)
{
    if (!(spacing > 0.0)) throw std::domain_error("interaction_order: spacing must be positive");
    if (!(sigma > 0.0)) throw std::domain_error("interaction_order: sigma must be positive");
    if (hops < 1) throw std::domain_error("interaction_order: hops must be >= 1");
    const double s = sigma * spacing;
    double L = std::max(s, 2.0);
    for (int i = 0; i < 50; ++i) L = s + 1.5 * std::log(std::max(L, 2.0));
    return std::pow(std::exp(-L) * L, double(hops));
}

}  // namespace gmcluster
