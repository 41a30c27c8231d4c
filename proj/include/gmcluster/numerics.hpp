#pragma once
// Small shared numerical kernels: tridiagonal solves, quadrature,
// the symmetric-tridiagonal QL eigenvalue iteration, periodic spectral
// differentiation, and a few scalar special-purpose routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcluster {

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tridiagonal systems (Thomas algorithm). sub[0] and sup[n-1] are unused.
// ---------------------------------------------------------------------------
template <typename T>
std::vector<T> solve_tridiag(const std::vector<T>& sub, const std::vector<T>& diag,
                             const std::vector<T>& sup, const std::vector<T>& rhs)
{
    const std::size_t n = diag.size();
    if (n == 0) return {};
    std::vector<T> c(n), d(n);
    T beta = diag[0];
    if (std::abs(beta) == 0.0) throw numeric_error("solve_tridiag: zero pivot");
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = diag[i] - sub[i] * c[i - 1];
        if (std::abs(beta) == 0.0) throw numeric_error("solve_tridiag: zero pivot");
        c[i] = (i + 1 < n) ? sup[i] / beta : T(0);
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return d;
}

// ---------------------------------------------------------------------------
// Composite Simpson on a uniform grid; a 3/8 closure handles odd interval
// counts. values.size() >= 2.
// ---------------------------------------------------------------------------
inline double simpson_uniform(const std::vector<double>& values, double h)
{
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    std::size_t m = n - 1;  // interval count
    double total = 0.0;
    std::size_t start = 0;
    if (m % 2 == 1) {
        if (m < 3) return 0.5 * h * (values[0] + values[1]);
        total += 3.0 * h / 8.0 *
                 (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]);
        start = 3;
    }
    double s = values[start] + values[n - 1];
    for (std::size_t i = start + 1; i < n - 1; ++i)
        s += values[i] * ((i - start) % 2 == 1 ? 4.0 : 2.0);
    total += s * h / 3.0;
    return total;
}

// ---------------------------------------------------------------------------
// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
// iteration (EISPACK tql1 lineage). diag/offdiag are consumed as workspace;
// offdiag[i] couples rows i and i+1, so offdiag.size() == diag.size()-1.
// Returns eigenvalues sorted ascending.
// ---------------------------------------------------------------------------
inline std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e)
{
    const std::size_t n = d.size();
    if (n == 0) return {};
    if (e.size() + 1 != n) throw numeric_error("tridiag_eigenvalues: size mismatch");
    e.push_back(0.0);

    auto hyp = [](double a, double b) {
        double aa = std::fabs(a), ab = std::fabs(b);
        if (aa > ab) { double t = ab / aa; return aa * std::sqrt(1.0 + t * t); }
        if (ab == 0.0) return 0.0;
        double t = aa / ab;
        return ab * std::sqrt(1.0 + t * t);
    };

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw numeric_error("tridiag_eigenvalues: QL did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hyp(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hyp(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) { d[i + 1] -= p; e[m] = 0.0; break; }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Inverse iteration for one eigenvector of a symmetric tridiagonal matrix,
// given an eigenvalue estimate. Returns a unit vector.
inline std::vector<double> tridiag_eigenvector(const std::vector<double>& diag,
                                               const std::vector<double>& off,
                                               double lambda)
{
    const std::size_t n = diag.size();
    std::vector<double> sub(n, 0.0), mid(n), sup(n, 0.0), x(n, 1.0);
    const double shift = lambda + 1e-12 * (1.0 + std::fabs(lambda));
    for (std::size_t i = 0; i < n; ++i) {
        mid[i] = diag[i] - shift;
        if (i > 0) sub[i] = off[i - 1];
        if (i + 1 < n) sup[i] = off[i];
    }
    for (int it = 0; it < 4; ++it) {
        x = solve_tridiag(sub, mid, sup, x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Spectral derivatives of a uniformly sampled 2*pi-periodic function.
// Direct O(n^2) Fourier sums; n stays small (<= a few thousand) here.
// order = 1 or 2.
// ---------------------------------------------------------------------------
inline std::vector<double> periodic_spectral_derivative(const std::vector<double>& f, int order)
{
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 4) return out;
    const double two_pi = 2.0 * M_PI;
    const std::size_t kmax = n / 2;
    std::vector<double> ck(kmax + 1, 0.0), sk(kmax + 1, 0.0);
    for (std::size_t k = 1; k <= kmax; ++k) {
        double c = 0.0, s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double ang = two_pi * double(k) * double(j) / double(n);
            c += f[j] * std::cos(ang);
            s += f[j] * std::sin(ang);
        }
        ck[k] = 2.0 * c / double(n);
        sk[k] = 2.0 * s / double(n);
    }
    if (n % 2 == 0) { ck[kmax] *= 0.5; sk[kmax] = 0.0; }
    for (std::size_t j = 0; j < n; ++j) {
        double t = two_pi * double(j) / double(n);
        double acc = 0.0;
        for (std::size_t k = 1; k <= kmax; ++k) {
            double kk = double(k);
            if (order == 1)
                acc += kk * (-ck[k] * std::sin(kk * t) + sk[k] * std::cos(kk * t));
            else
                acc += -kk * kk * (ck[k] * std::cos(kk * t) + sk[k] * std::sin(kk * t));
        }
        out[j] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Upper incomplete gamma for large arguments via the asymptotic series
//   Gamma(s,x) = x^(s-1) e^(-x) (1 + (s-1)/x + (s-1)(s-2)/x^2 + ...),
// adequate for the exponential-tail moment corrections (x >> |s|).
// ---------------------------------------------------------------------------
inline double upper_gamma_asymptotic(double s, double x)
{
    if (x <= 4.0 * std::fabs(s) + 8.0)
        throw numeric_error("upper_gamma_asymptotic: argument too small");
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term *= (s - double(k)) / x;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        sum += term;
    }
    return std::pow(x, s - 1.0) * std::exp(-x) * sum;
}

// Least squares fit of y against a small set of basis columns (normal
// equations with Cholesky; m basis functions, m <= 4 in practice).
inline std::vector<double> least_squares_fit(const std::vector<std::vector<double>>& basis,
                                             const std::vector<double>& y)
{
    const std::size_t m = basis.size();
    const std::size_t n = y.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += basis[i][k] * basis[j][k];
            a[i][j] = a[j][i] = s;
        }
        for (std::size_t k = 0; k < n; ++k) b[i] += basis[i][k] * y[k];
    }
    // Gaussian elimination with partial pivoting on the small normal system
    std::vector<double> x = b;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(x[col], x[piv]);
        if (std::fabs(a[col][col]) < 1e-300) throw numeric_error("least_squares_fit: singular");
        for (std::size_t r = col + 1; r < m; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
            x[r] -= f * x[col];
        }
    }
    for (std::size_t col = m; col-- > 0;) {
        for (std::size_t c = col + 1; c < m; ++c) x[col] -= a[col][c] * x[c];
        x[col] /= a[col][col];
    }
    return x;
}

// Bisection for a bracketed scalar root.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200)
{
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw numeric_error("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gmcluster
