#pragma once
// Small-eigenvalue machinery for the k-spike boundary cluster: the integer
// tridiagonal matrix A with spectrum {n(n+1)}, the interaction matrix M
// assembled from second tangential derivatives of the half-plane kernel at
// the solved gaps, and the two families of small-eigenvalue estimates. The
// n >= 1 modes scale like eps^3 log(xi/(eps D)); the synchronous mode is
// driven purely by boundary curvature and sits one log factor below.

#include <cmath>
#include <string>
#include <vector>

#include "gmcluster/green.hpp"
#include "gmcluster/numerics.hpp"
#include "gmcluster/reduced.hpp"

namespace gmcluster {

struct StabilityMatrixA {
    int k = 0;
    std::vector<double> diag;  // (s-1)(k-s+1) + s(k-s), s = 1..k
    std::vector<double> off;   // -s(k-s), s = 1..k-1

    std::vector<std::vector<double>> dense() const
    {
        std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
        for (int i = 0; i < k; ++i) {
            m[i][i] = diag[i];
            if (i + 1 < k) m[i][i + 1] = m[i + 1][i] = off[i];
        }
        return m;
    }
};

inline StabilityMatrixA build_matrix_A(int k)
{
    if (k < 1) throw std::invalid_argument("build_matrix_A: k must be >= 1");
    StabilityMatrixA A;
    A.k = k;
    A.diag.resize(k);
    A.off.resize(k > 1 ? k - 1 : 0);
    for (int s = 1; s <= k; ++s)
        A.diag[s - 1] = double((s - 1) * (k - s + 1) + s * (k - s));
    for (int s = 1; s < k; ++s) A.off[s - 1] = double(-s * (k - s));
    return A;
}

inline std::vector<double> eigenvalues_A(int k)
{
    StabilityMatrixA A = build_matrix_A(k);
    if (k == 1) return {0.0};
    return tridiag_eigenvalues(A.diag, A.off);
}

// symmetric tridiagonal M(p0): diagonal sums of sigma^2 G0'' over the
// present neighbours, off-diagonal the negated neighbour weight; rows
// telescope to zero so (1,...,1)^T spans the kernel
struct InteractionMatrixM {
    int k = 0;
    std::vector<double> diag, off;

    std::vector<std::vector<double>> dense() const
    {
        std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
        for (int i = 0; i < k; ++i) {
            m[i][i] = diag[i];
            if (i + 1 < k) m[i][i + 1] = m[i + 1][i] = off[i];
        }
        return m;
    }
};

inline InteractionMatrixM build_matrix_M(const SpikeConfiguration& config,
                                         const ClusterParams& params)
{
    if (!config.ordered())
        throw std::invalid_argument("build_matrix_M: configuration must be solved and ordered");
    const int k = int(config.offsets.size());
    InteractionMatrixM M;
    M.k = k;
    M.diag.assign(k, 0.0);
    M.off.assign(k > 1 ? k - 1 : 0, 0.0);
    const double s2 = params.sigma * params.sigma;
    for (int i = 0; i + 1 < k; ++i) {
        double gap = config.offsets[i + 1] - config.offsets[i];
        double wgt = s2 * g0_second(params.sigma * gap);
        M.diag[i] += wgt;
        M.diag[i + 1] += wgt;
        M.off[i] = -wgt;
    }
    return M;
}

struct SmallSpectrumReport {
    std::vector<double> eigenvalues_A;
    std::vector<double> eigenvalues_M;       // ascending, first ~ 0
    std::vector<double> lambda_matrix;       // modes n = 1..k-1, from M
    std::vector<double> lambda_closed_form;  // same modes, leading-order formula
    double lambda_synchronous = 0.0;         // n = 0 curvature mode, order eps^3
    std::vector<std::string> mode_flags;     // index 0 = synchronous
    std::vector<std::string> warnings;
};

inline SmallSpectrumReport small_eigenvalue_estimates(const ClusterParams& params,
                                                      const SpikeConfiguration& config)
{
    const int k = params.k;
    SmallSpectrumReport rep;
    rep.warnings = params.warnings;
    rep.eigenvalues_A = eigenvalues_A(k);

    InteractionMatrixM M = build_matrix_M(config, params);
    rep.eigenvalues_M = (k == 1) ? std::vector<double>{0.0}
                                 : tridiag_eigenvalues(M.diag, M.off);

    const double L = params.log_ratio();
    const double eps3 = params.eps * params.eps * params.eps;

    rep.lambda_synchronous = 1.5 * params.nu1 * eps3 * params.h_pp / params.J1;
    rep.mode_flags.push_back(rep.lambda_synchronous < 0.0
                                 ? "stable (curvature order eps^3)"
                                 : "unstable (curvature maximum degenerate?)");

    for (int n = 1; n < k; ++n) {
        double mu = rep.eigenvalues_M[n];
        double lam = -params.nu2 * params.xi_sigma * mu / params.J1;
        double lam_cf = params.nu1 * params.h_pp / (2.0 * params.J1) * eps3 * L *
                        double(n * (n + 1));
        rep.lambda_matrix.push_back(lam);
        rep.lambda_closed_form.push_back(lam_cf);
        rep.mode_flags.push_back(lam < 0.0 ? "stable (order eps^3 log)"
                                           : "unstable");
    }
    return rep;
}

}  // namespace gmcluster
