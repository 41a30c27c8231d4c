#pragma once
// Nonlocal eigenvalue problem for the large eigenvalues, decomposed by
// angular Fourier mode after even reflection to the whole plane:
//
//   phi'' + phi'/r - m^2/r^2 phi - phi + 2 w phi
//       - gamma/(1 + tau lambda) * (int w phi / int w^2) w^2  =  lambda phi.
//
// The nonlocal term acts only on the radial subspace m = 0 (the angular
// average of w phi vanishes for m >= 1). For tau = 0 the m = 0 operator is
// a tridiagonal local part plus a rank-one update, handled by a dense
// eigensolver; m >= 1 spectra come from the QL iteration after a diagonal
// similarity makes the local part symmetric. For tau > 0 the dominant
// branches are continued in tau by under-relaxed fixed-point iteration on
// the coefficient gamma/(1 + tau lambda), with inverse iteration through a
// Sherman-Morrison tridiagonal solve tracking each eigenvalue.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmcluster/ground_state.hpp"
#include "gmcluster/numerics.hpp"

namespace gmcluster {

using complexd = std::complex<double>;

struct NlepDiscretization {
    int mode = 0;          // angular mode m
    double gamma = 2.0;    // nonlocal coupling (0 switches the term off)
    double tau = 0.0;
    double r_max = 20.0;
    int n = 2000;          // radial intervals; interior unknowns depend on mode
    std::vector<double> r;     // node radii
    std::vector<double> w;     // ground state samples
    std::vector<double> sub, diag, sup;  // local operator rows
    std::vector<double> u_nl;  // rank-one column factor w^2
    std::vector<double> v_nl;  // rank-one row factor (quadrature of w . r)
    std::vector<std::string> warnings;

    std::size_t size() const { return diag.size(); }

    // action of the full operator (local + nonlocal) on a vector
    std::vector<double> apply(const std::vector<double>& phi) const
    {
        const std::size_t N = size();
        std::vector<double> out(N, 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            double s = diag[i] * phi[i];
            if (i > 0) s += sub[i] * phi[i - 1];
            if (i + 1 < N) s += sup[i] * phi[i + 1];
            out[i] = s;
        }
        if (gamma != 0.0 && mode == 0) {
            double proj = 0.0;
            for (std::size_t i = 0; i < N; ++i) proj += v_nl[i] * phi[i];
            for (std::size_t i = 0; i < N; ++i) out[i] -= gamma * proj * u_nl[i];
        }
        return out;
    }
};

// local radial operator for angular mode m on a uniform grid with the
// regularity condition phi ~ r^m at the origin and Dirichlet truncation
inline NlepDiscretization assemble_local(int mode, const GroundState& gs, int n = 2000,
                                         double r_max = 20.0, double gamma = 0.0,
                                         double tau = 0.0)
{
    if (mode < 0) throw std::invalid_argument("assemble_local: mode must be >= 0");
    if (n < 16) throw std::invalid_argument("assemble_local: grid too small");
    NlepDiscretization d;
    d.mode = mode;
    d.gamma = gamma;
    d.tau = tau;
    d.r_max = r_max;
    d.n = n;
    if (n < 500) d.warnings.push_back("grid coarser than 500 points: accuracy degraded");

    const double h = r_max / double(n);
    const double h2 = h * h;
    if (mode == 0) {
        // nodes r_0 = 0 (regularized Laplacian 4(phi_1 - phi_0)/h^2), r_j = j h
        const std::size_t N = std::size_t(n);
        d.r.resize(N);
        d.sub.assign(N, 0.0);
        d.diag.assign(N, 0.0);
        d.sup.assign(N, 0.0);
        for (std::size_t j = 0; j < N; ++j) d.r[j] = h * double(j);
        d.w.resize(N);
        for (std::size_t j = 0; j < N; ++j) d.w[j] = gs.value(d.r[j]);
        d.diag[0] = -4.0 / h2 - 1.0 + 2.0 * d.w[0];
        d.sup[0] = 4.0 / h2;
        for (std::size_t j = 1; j < N; ++j) {
            double rj = d.r[j];
            d.sub[j] = 1.0 / h2 - 1.0 / (2.0 * h * rj);
            d.diag[j] = -2.0 / h2 - 1.0 + 2.0 * d.w[j];
            d.sup[j] = (j + 1 < N) ? 1.0 / h2 + 1.0 / (2.0 * h * rj) : 0.0;
        }
        // trapezoid weights against r dr for the nonlocal ratio
        std::vector<double> q(N, h);
        q[0] = 0.5 * h;
        double denom = 0.0;
        for (std::size_t j = 0; j < N; ++j) denom += q[j] * d.w[j] * d.w[j] * d.r[j];
        d.u_nl.resize(N);
        d.v_nl.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            d.u_nl[j] = d.w[j] * d.w[j];
            d.v_nl[j] = q[j] * d.w[j] * d.r[j] / denom;
        }
    } else {
        // nodes r_j = j h, j = 1..n-1; phi(0) = 0 and phi(r_max) = 0
        const std::size_t N = std::size_t(n - 1);
        d.r.resize(N);
        d.sub.assign(N, 0.0);
        d.diag.assign(N, 0.0);
        d.sup.assign(N, 0.0);
        d.w.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            double rj = h * double(j + 1);
            d.r[j] = rj;
            d.w[j] = gs.value(rj);
            d.sub[j] = 1.0 / h2 - 1.0 / (2.0 * h * rj);
            d.diag[j] = -2.0 / h2 - double(mode) * double(mode) / (rj * rj) - 1.0 +
                        2.0 * d.w[j];
            d.sup[j] = 1.0 / h2 + 1.0 / (2.0 * h * rj);
        }
        d.sub[0] = 0.0;
        d.sup[N - 1] = 0.0;
    }
    return d;
}

// eigenvalues of the local (tridiagonal) part via diagonal similarity to a
// symmetric tridiagonal matrix; valid because sup[i] * sub[i+1] > 0
inline std::vector<double> local_eigenvalues(const NlepDiscretization& d)
{
    const std::size_t N = d.size();
    std::vector<double> diag = d.diag, off(N > 1 ? N - 1 : 0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        double p = d.sup[i] * d.sub[i + 1];
        if (p <= 0.0) throw numeric_error("local_eigenvalues: similarity breaks down");
        off[i] = std::sqrt(p);
    }
    return tridiag_eigenvalues(diag, off);
}

// full spectrum at tau = 0 (dense solve when the rank-one term is active)
inline std::vector<complexd> nlep_spectrum_tau0(const NlepDiscretization& d)
{
    std::vector<complexd> out;
    if (d.gamma == 0.0 || d.mode != 0) {
        for (double ev : local_eigenvalues(d)) out.emplace_back(ev, 0.0);
    } else {
        const int N = int(d.size());
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
        for (int i = 0; i < N; ++i) {
            B(i, i) = d.diag[i];
            if (i > 0) B(i, i - 1) = d.sub[i];
            if (i + 1 < N) B(i, i + 1) = d.sup[i];
        }
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) B(i, j) -= d.gamma * d.u_nl[i] * d.v_nl[j];
        Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
        for (int i = 0; i < N; ++i) out.emplace_back(es.eigenvalues()[i]);
    }
    std::sort(out.begin(), out.end(), [](complexd a, complexd b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

namespace detail {

// g(lambda) = v^T (T - lambda I)^{-1} u and its derivative; eigenvalues of
// T - c u v^T with coupled eigenvector are the roots of 1 - c g(lambda)
struct SecularEval {
    complexd g, gprime;
};

inline SecularEval secular_g(const NlepDiscretization& d, complexd lambda)
{
    const std::size_t N = d.size();
    std::vector<complexd> sub(N), diag(N), sup(N), rhs(N);
    for (std::size_t i = 0; i < N; ++i) {
        sub[i] = d.sub[i];
        diag[i] = complexd(d.diag[i]) - lambda;
        sup[i] = d.sup[i];
        rhs[i] = d.u_nl[i];
    }
    std::vector<complexd> y = solve_tridiag(sub, diag, sup, rhs);
    std::vector<complexd> z = solve_tridiag(sub, diag, sup, y);  // (T-l)^{-2} u
    SecularEval out{0.0, 0.0};
    for (std::size_t i = 0; i < N; ++i) {
        out.g += complexd(d.v_nl[i]) * y[i];
        out.gprime += complexd(d.v_nl[i]) * z[i];
    }
    return out;
}

// Newton for 1 - c g(lambda) = 0 at frozen coefficient c, from a seed
inline bool newton_fixed_coefficient(const NlepDiscretization& d, complexd c,
                                     complexd& lambda)
{
    complexd lam = lambda;
    for (int it = 0; it < 60; ++it) {
        SecularEval se;
        try {
            se = secular_g(d, lam);
        } catch (const numeric_error&) {
            lam += complexd(1e-9, 1e-10);
            continue;
        }
        complexd P = complexd(1.0) - c * se.g;
        complexd Pp = -c * se.gprime;
        if (std::abs(Pp) < 1e-300) return false;
        complexd step = P / Pp;
        lam -= step;
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(lam))) {
            // reject pseudo-convergence away from a root
            complexd check = complexd(1.0) - c * secular_g(d, lam).g;
            if (std::abs(check) > 1e-8) return false;
            lambda = lam;
            return true;
        }
    }
    return false;
}

}  // namespace detail

struct NlepBranch {
    complexd lambda;       // continued eigenvalue
    bool alive = true;     // false after a continuation failure
    double tau_reached = 0.0;
};

// full nonlinear secular residual 1 - gamma/(1+tau lambda) g(lambda)
inline complexd nlep_secular_residual(const NlepDiscretization& d, double tau,
                                      complexd lambda)
{
    complexd coeff = d.gamma / (complexd(1.0) + tau * lambda);
    return complexd(1.0) - coeff * detail::secular_g(d, lambda).g;
}

// continue branches to the requested tau via under-relaxed fixed-point
// iteration on the coefficient gamma/(1 + tau lambda); the inner eigenvalue
// update is Newton on the frozen-coefficient secular equation
inline std::vector<NlepBranch> continue_branches(const NlepDiscretization& d0,
                                                 std::vector<NlepBranch> branches,
                                                 double tau)
{
    for (auto& br : branches) {
        if (!br.alive) continue;
        complexd lambda = br.lambda;
        complexd c = d0.gamma / (complexd(1.0) + tau * lambda);
        bool ok = false;
        for (int fp = 0; fp < 80; ++fp) {
            complexd one_p = complexd(1.0) + tau * lambda;
            if (std::abs(one_p) < 1e-8) break;  // coefficient pole
            complexd target = d0.gamma / one_p;
            c = c + 0.5 * (target - c);  // under-relaxation 0.5
            complexd mu = lambda;
            if (!detail::newton_fixed_coefficient(d0, c, mu)) break;
            bool settled = std::abs(mu - lambda) < 1e-11 * (1.0 + std::abs(mu)) &&
                           std::abs(target - c) < 1e-11 * (1.0 + std::abs(c));
            lambda = mu;
            if (settled) {
                ok = std::abs(nlep_secular_residual(d0, tau, lambda)) < 1e-8;
                break;
            }
        }
        if (ok) {
            br.lambda = lambda;
            br.tau_reached = tau;
        } else {
            br.alive = false;  // report last stable lambda / tau
        }
    }
    return branches;
}

// exhaustive real-axis roots of the nonlinear secular equation inside a
// window: the poles of g are the local-operator eigenvalues, so roots are
// bracketed between consecutive poles (plus the coefficient pole -1/tau)
inline std::vector<double> nlep_real_roots(const NlepDiscretization& d, double tau,
                                           double lo, double hi)
{
    std::vector<double> cuts{lo, hi};
    for (double p : local_eigenvalues(d))
        if (p > lo && p < hi) cuts.push_back(p);
    if (tau > 0.0) {
        double cpole = -1.0 / tau;
        if (cpole > lo && cpole < hi) cuts.push_back(cpole);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> roots;
    auto S = [&](double x) {
        return nlep_secular_residual(d, tau, complexd(x, 0.0)).real();
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        double pad = 1e-7 * (1.0 + std::fabs(a) + std::fabs(b));
        a += pad;
        b -= pad;
        if (!(b > a)) continue;
        const int samples = 12;
        double prev_x = a, prev_f = S(a);
        for (int s = 1; s <= samples; ++s) {
            double x = a + (b - a) * double(s) / double(samples);
            double f = S(x);
            if (std::isfinite(prev_f) && std::isfinite(f) && (prev_f > 0) != (f > 0)) {
                double r = bisect(S, prev_x, x, 1e-13 * (1.0 + std::fabs(x)));
                if (std::fabs(S(r)) < 1e-6) roots.push_back(r);
            }
            prev_x = x;
            prev_f = f;
        }
    }
    return roots;
}

// eigenvalues sorted by descending real part; tau > 0 continues the
// leading branches of the tau = 0 spectrum and merges any real roots the
// interpole scan finds near the top of the window
inline std::vector<complexd> solve_nlep(double tau, const NlepDiscretization& d)
{
    if (tau < 0.0) throw std::invalid_argument("solve_nlep: tau must be >= 0");
    auto base = nlep_spectrum_tau0(d);
    if (tau == 0.0 || d.gamma == 0.0 || d.mode != 0) return base;

    std::vector<NlepBranch> branches;
    for (std::size_t i = 0; i < base.size() && branches.size() < 6; ++i) {
        NlepBranch br;
        br.lambda = base[i];
        branches.push_back(br);
    }
    branches = continue_branches(d, std::move(branches), tau);
    std::vector<complexd> out;
    for (auto& br : branches)
        if (br.alive) out.push_back(br.lambda);
    for (double r : nlep_real_roots(d, tau, -4.0, 2.0)) {
        bool dup = false;
        for (auto& l : out)
            if (std::abs(l - complexd(r, 0.0)) < 1e-6 * (1.0 + std::fabs(r))) dup = true;
        if (!dup) out.emplace_back(r, 0.0);
    }
    std::sort(out.begin(), out.end(),
              [](complexd a, complexd b) { return a.real() > b.real(); });
    return out;
}

struct TauSweepRow {
    double tau = 0.0;
    double max_re = 0.0;
    complexd dominant;
};

struct TauSweepResult {
    std::vector<TauSweepRow> rows;
    bool crossed = false;
    double tau_crossing = 0.0;  // first tau with max Re lambda >= 0
    std::vector<std::string> notes;
};

inline TauSweepResult tau_sweep(double tau_max, int steps, const NlepDiscretization& d)
{
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_sweep: tau_max must be positive");
    if (steps < 1) throw std::invalid_argument("tau_sweep: steps must be >= 1");
    TauSweepResult res;
    auto base = nlep_spectrum_tau0(d);
    std::vector<NlepBranch> branches;
    for (std::size_t i = 0; i < base.size() && branches.size() < 6; ++i) {
        NlepBranch br;
        br.lambda = base[i];
        branches.push_back(br);
    }
    for (int j = 0; j <= steps; ++j) {
        double tau = tau_max * double(j) / double(steps);
        if (j > 0) branches = continue_branches(d, std::move(branches), tau);
        TauSweepRow row;
        row.tau = tau;
        row.max_re = -1e300;
        int alive = 0;
        for (auto& br : branches) {
            if (!br.alive) continue;
            ++alive;
            if (br.lambda.real() > row.max_re) {
                row.max_re = br.lambda.real();
                row.dominant = br.lambda;
            }
        }
        if (alive == 0) {
            res.notes.push_back("continuation lost all branches at tau = " +
                                std::to_string(tau));
            break;
        }
        // pick up real roots the continuation set does not cover (branches
        // can enter through the coefficient pole as tau grows)
        if (j > 0) {
            for (double r : nlep_real_roots(d, tau, row.max_re - 0.5, 2.0)) {
                bool dup = false;
                for (auto& br : branches)
                    if (br.alive &&
                        std::abs(br.lambda - complexd(r, 0.0)) < 1e-6 * (1.0 + std::fabs(r)))
                        dup = true;
                if (!dup) {
                    NlepBranch nb;
                    nb.lambda = complexd(r, 0.0);
                    nb.tau_reached = tau;
                    branches.push_back(nb);
                    if (r > row.max_re) {
                        row.max_re = r;
                        row.dominant = nb.lambda;
                    }
                }
            }
        }
        res.rows.push_back(row);
        if (!res.crossed && row.max_re >= 0.0) {
            res.crossed = true;
            res.tau_crossing = tau;
        }
    }
    return res;
}

}  // namespace gmcluster
