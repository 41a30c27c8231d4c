// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable. Criteria that
// compare asymptotic formulas against desk-scale computations are trend or
// direction checks; the true asymptotic regime is not reachable at desk
// scale and quantitative reproduction of the limiting constants is out of
// reach by design.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gmcluster/geometry.hpp"
#include "gmcluster/green.hpp"
#include "gmcluster/ground_state.hpp"
#include "gmcluster/nlep.hpp"
#include "gmcluster/reduced.hpp"
#include "gmcluster/sim.hpp"
#include "gmcluster/stability.hpp"
#include "oracles.hpp"

using namespace gmcluster;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const std::string& what, bool pass, const std::string& detail)
{
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    if (!pass) ++failures;
}

const GroundState& gs()
{
    static GroundState g = solve_ground_state(25.0, 4000, 1e-12);
    return g;
}

const GroundStateMoments& moments()
{
    static GroundStateMoments m = compute_moments(gs());
    return m;
}

const double kDeskSets[3][2] = {{1e-3, 4e-4}, {5e-4, 2.5e-4}, {1.5e-4, 1e-4}};
const double kEllipseHpp = -18.0;  // h''_ss at the curvature maximum of the 2 x 1 ellipse

void criterion_1_matrix_spectrum()
{
    Timer t;
    double worst = 0.0;
    for (int k = 1; k <= 12; ++k) {
        auto ev = eigenvalues_A(k);
        for (int n = 0; n < k; ++n)
            worst = std::max(worst, std::fabs(ev[n] - double(n * (n + 1))));
    }
    bool pass = worst < 1e-9 && t.seconds() < 1.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max |lambda_n - n(n+1)| = %.3e, %.2fs", worst,
                  t.seconds());
    report(1, "matrix A spectrum is n(n+1) for k = 1..12", pass, buf);
}

void criterion_2_ground_identities()
{
    Timer t;
    const auto& m = moments();
    double e1 = std::fabs(m.I3 - 1.5 * m.I2) / m.I3;
    double e2 = std::fabs(m.Igrad - 0.5 * m.I2) / m.Igrad;
    double e3 = std::fabs(m.Igrad + m.I2 - m.I3) / m.I3;
    double e4 = std::fabs(2.0 * m.m1 + m.I2) / m.I2;
    double worst = std::max({e1, e2, e3, e4});
    bool pass = worst < 1e-4 && t.seconds() < 10.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst relative defect = %.3e, %.2fs", worst,
                  t.seconds());
    report(2, "ground state integral identities", pass, buf);
}

void criterion_3_ground_decay()
{
    double ratio = gs().value(10.0) / gs().value(5.0);
    double predicted = std::sqrt(0.5) * std::exp(-5.0);
    bool p1 = std::fabs(ratio - predicted) < 0.05 * predicted;
    std::size_t j20 = std::size_t(20.0 / gs().h);
    double rr = gs().wp[j20] / gs().w[j20];
    bool p2 = rr > -1.03 && rr < -0.97;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "w(10)/w(5) = %.4e vs %.4e, w'/w(20) = %.4f", ratio,
                  predicted, rr);
    report(3, "ground state decay law and tail slope", p1 && p2, buf);
}

void criterion_4_green_kernel()
{
    Timer t;
    oracle::HelmholtzDisk disk(12.0, 24000, 0.05);
    double worst = 0.0;
    for (double r = 0.5; r <= 5.0 + 1e-12; r += 0.125)
        worst = std::max(worst, std::fabs(2.0 * disk.at(r) - g0(r)) / g0(r));
    auto ex = expansion_coefficients();
    double c1_exact = (std::log(2.0) - 0.57721566490153286) / M_PI;
    double c2_exact = -1.0 / (4.0 * M_PI);
    bool pass = worst < 1e-3 && std::fabs(ex.c1 - c1_exact) < 1e-5 &&
                std::fabs(ex.c2 - c2_exact) < 1e-5 && t.seconds() < 30.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "disk-solve mismatch = %.3e, dc1 = %.2e, dc2 = %.2e, %.2fs", worst,
                  std::fabs(ex.c1 - c1_exact), std::fabs(ex.c2 - c2_exact), t.seconds());
    report(4, "half-plane kernel vs brute-force solve and expansion", pass, buf);
}

void criterion_5_reduced_system()
{
    Timer t;
    bool pass = true;
    double worst_res = 0.0, worst_sym = 0.0;
    for (auto& cs : kDeskSets) {
        for (int k : {1, 2, 3, 5}) {
            auto p = ClusterParams::make(cs[0], cs[1], k, kEllipseHpp, moments());
            auto c = solve_positions(p);
            double scale = p.nu2 * p.xi_sigma * p.sigma;
            worst_res = std::max(worst_res, c.residual_norm / scale);
            pass = pass && c.residual_norm < 1e-12 * scale;
            double extent = std::max(1.0, c.offsets.back() - c.offsets.front());
            for (int i = 0; i < k; ++i)
                worst_sym = std::max(
                    worst_sym, std::fabs(c.offsets[i] + c.offsets[k - 1 - i]) / extent);
        }
    }
    pass = pass && worst_sym < 1e-10;

    // k = 2 against the independent scalar bisection oracle
    double worst_gap = 0.0;
    for (auto& cs : kDeskSets) {
        auto p = ClusterParams::make(cs[0], cs[1], 2, kEllipseHpp, moments());
        auto c = solve_positions(p);
        double d_newton = c.offsets[1] - c.offsets[0];
        double d_oracle = bisect(
            [&](double d) {
                return p.nu2 * p.xi_sigma * p.sigma * (-g0_prime(p.sigma * d)) -
                       p.nu1 * std::pow(p.eps, 3) * (-p.h_pp) * d / 2.0;
            },
            1.0, 3.0 * p.log_ratio() / p.sigma, 1e-11 / p.sigma * 1e-2);
        worst_gap = std::max(worst_gap, std::fabs(d_newton - d_oracle) / d_newton);
    }
    pass = pass && worst_gap < 1e-10;

    // deviation from the asymptotic spacing decreases with sigma
    double prev = 1e300;
    bool trend = true;
    double devs[3];
    int i = 0;
    for (auto& cs : kDeskSets) {
        auto p = ClusterParams::make(cs[0], cs[1], 2, kEllipseHpp, moments());
        auto c = solve_positions(p);
        double dn = c.offsets[1] - c.offsets[0];
        double dev = std::fabs(dn - asymptotic_spacing(2, p)) / dn;
        devs[i++] = dev;
        trend = trend && dev < prev;
        prev = dev;
    }
    pass = pass && trend && t.seconds() < 5.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "residual = %.2e, oracle gap mismatch = %.2e, antisym = %.2e, "
                  "trend %.4f > %.4f > %.4f, %.2fs",
                  worst_res, worst_gap, worst_sym, devs[0], devs[1], devs[2], t.seconds());
    report(5, "reduced spike-position system", pass, buf);
}

void criterion_6_stability_estimates()
{
    Timer t;
    bool pass = true;
    double ratios[3];
    int i = 0;
    for (auto& cs : kDeskSets) {
        auto p = ClusterParams::make(cs[0], cs[1], 3, kEllipseHpp, moments());
        auto rep = small_eigenvalue_estimates(p, solve_positions(p));
        pass = pass && rep.lambda_synchronous < 0.0;
        for (double l : rep.lambda_matrix) pass = pass && l < 0.0;
        double L = p.log_ratio();
        double ratio = std::fabs(rep.lambda_synchronous) / std::fabs(rep.lambda_matrix[0]);
        ratios[i++] = ratio * L / 1.5;
        pass = pass && ratio * L / 1.5 > 0.5 && ratio * L / 1.5 < 2.0;
    }
    pass = pass && t.seconds() < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "ratio * L / 1.5 = %.3f, %.3f, %.3f (two-order separation), %.2fs",
                  ratios[0], ratios[1], ratios[2], t.seconds());
    report(6, "small-eigenvalue signs and two-order separation", pass, buf);
}

void criterion_7_nlep()
{
    Timer t;
    auto d1 = assemble_local(1, gs(), 2000, 20.0);
    double m1_top = local_eigenvalues(d1).back();
    bool p1 = std::fabs(m1_top) < 1e-3;

    auto d0 = assemble_local(0, gs(), 800, 20.0, 2.0);
    auto ev = solve_nlep(0.0, d0);
    auto d0r = assemble_local(0, gs(), 1600, 20.0, 2.0);  // refined-grid oracle
    auto evr = solve_nlep(0.0, d0r);
    bool p2 = ev.front().real() < -0.9 &&
              std::fabs(ev.front().real() - evr.front().real()) < 1e-3;

    auto dplain = assemble_local(0, gs(), 800, 20.0, 0.0);
    bool p3 = solve_nlep(0.0, dplain).front().real() > 0.0;

    auto dsweep = assemble_local(0, gs(), 500, 20.0, 2.0);
    auto sweep = tau_sweep(2.0, 20, dsweep);
    bool p4 = true;
    for (const auto& row : sweep.rows)
        if (row.tau <= 0.2 + 1e-12) p4 = p4 && row.max_re < 0.0;

    bool pass = p1 && p2 && p3 && p4 && t.seconds() < 60.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "|m=1 top| = %.2e, nlep top = %.5f (refined %.5f), contrast top = %.3f, "
                  "sweep first 10%% stable = %d, %.1fs",
                  std::fabs(m1_top), ev.front().real(), evr.front().real(),
                  solve_nlep(0.0, dplain).front().real(), int(p4), t.seconds());
    report(7, "nonlocal eigenvalue problem", pass, buf);
}

// --- criterion 8: simulator battery -----------------------------------

bool sim_constant_state()
{
    SimGrid g(BoundaryCurve::make_circle(1.0), 64, 128);
    Stepper st(g, 0.05, 0.1, 0.0, 0.02);
    SimState s;
    s.u.assign(g.size(), 1.0);
    s.v.assign(g.size(), 1.0);
    for (int k = 0; k < 1000; ++k) st.step(s);
    double drift = 0.0;
    for (double x : s.u) drift = std::max(drift, std::fabs(x - 1.0));
    for (double x : s.v) drift = std::max(drift, std::fabs(x - 1.0));
    std::printf("    constant state drift over 1e3 steps: %.3e (per-step bound 1e-10)\n",
                drift);
    return drift < 1000 * 1e-10;
}

bool sim_persistence()
{
    SimGrid g(BoundaryCurve::make_circle(1.0), 96, 256);
    Stepper st(g, 0.05, 0.1, 0.0, 0.02);
    double sigma = 0.05 / std::sqrt(0.1);
    double xi = 1.0 / (std::log(1.0 / sigma) * moments().I2 / M_PI);
    SimState s = seed_spikes(g, st, gs(), xi, {0.0});
    for (int k = 0; k < 1000; ++k) st.step(s);  // settle the leading-order seed
    double h0 = detect_spikes(g, s, 0.25, 0.05).spikes.at(0).height;
    for (int k = 0; k < 10000; ++k) st.step(s);
    auto det = detect_spikes(g, s, 0.25, 0.05);
    double h1 = det.spikes.empty() ? 0.0 : det.spikes.at(0).height;
    double drift = std::fabs(h1 - h0) / h0;
    std::printf("    single spike amplitude drift over 1e4 steps: %.4f%%\n", 100.0 * drift);
    return det.spikes.size() == 1 && drift < 0.05;
}

struct DriftOutcome {
    double observed = 0.0;
    double predicted = 0.0;
    bool agree = false;
};

DriftOutcome sim_pair_drift(double seed_gap, double t_end)
{
    auto curve = BoundaryCurve::make_ellipse(2.0, 1.0);
    SimGrid g(curve, 96, 512);
    const double eps = 0.05, D = 0.1;
    Stepper st(g, eps, D, 0.0, 0.025);
    double sigma = eps / std::sqrt(D);
    double xi = 1.0 / (std::log(1.0 / sigma) * moments().I2 / M_PI);
    double total = curve.total_arc_length();
    // symmetric about the curvature maximum at arc 0
    SimState s = seed_spikes(g, st, gs(), xi,
                             {total - 0.5 * seed_gap, 0.5 * seed_gap});

    // reduced-force prediction at the seeded configuration: drift ~ -F
    auto p = ClusterParams::make(eps, D, 2, kEllipseHpp, moments());
    SpikeConfiguration seeded;
    seeded.offsets = {-0.5 * seed_gap / eps, 0.5 * seed_gap / eps};
    auto F = reduced_force(seeded, p);
    DriftOutcome out;
    out.predicted = (F[1] - F[0]) > 0 ? -1.0 : 1.0;  // gap drift sign = -sign(F2 - F1)

    auto gap_of = [&](const SimState& state) {
        auto det = detect_spikes(g, state, 0.3, eps);
        std::vector<double> arcs;
        for (const auto& sp : det.spikes)
            if (sp.on_boundary) arcs.push_back(sp.arc_coordinate);
        if (arcs.size() != 2) return -1.0;
        double d = std::fabs(arcs[1] - arcs[0]);
        return std::min(d, total - d);
    };

    int settle = 200, steps = int(t_end / 0.025);
    for (int k = 0; k < settle; ++k) st.step(s);
    double g0v = gap_of(s);
    for (int k = settle; k < steps; ++k) st.step(s);
    double g1v = gap_of(s);
    if (g0v < 0 || g1v < 0) return out;  // detection failed: disagree
    out.observed = (g1v > g0v) ? 1.0 : -1.0;
    out.agree = out.observed == out.predicted;
    std::printf("    seed gap %.3f: gap %.4f -> %.4f, drift %+0.e, predicted %+0.e %s\n",
                seed_gap, g0v, g1v, out.observed, out.predicted,
                out.agree ? "(agree)" : "(DISAGREE)");
    return out;
}

bool sim_drift_signs()
{
    auto p = ClusterParams::make(0.05, 0.1, 2, kEllipseHpp, moments());
    auto eq = solve_positions(p);
    double d_red = (eq.offsets[1] - eq.offsets[0]) * 0.05;  // physical reduced gap
    std::printf("    reduced-system equilibrium gap (physical): %.4f\n", d_red);

    int agree = 0;
    // under-spread: inside both the reduced and the observed balance point;
    // repulsion dominates and the reduced force predicts gap growth. The
    // multipliers keep sigma * gap above ~1 where the kernel interaction is
    // meaningful; even closer seeds leave the model's separation regime and
    // the two bumps coalesce into one spike.
    for (double mult : {0.5, 0.6, 0.7})
        agree += sim_pair_drift(mult * d_red, 40.0).agree ? 1 : 0;
    // over-spread: beyond the desk-scale balance point (the leading-order
    // reduced equilibrium underestimates it; seeds are chosen past both so
    // the sign comparison is meaningful), attraction dominates
    int agree_over = 0;
    for (double gap : {3.4, 3.8, 4.2})
        agree_over += sim_pair_drift(gap, 60.0).agree ? 1 : 0;
    std::printf("    under-spread agreements: %d/3, over-spread agreements: %d/3\n", agree,
                agree_over);
    return agree == 3 && agree_over == 3;
}

bool sim_single_drift_to_maximum()
{
    auto curve = BoundaryCurve::make_ellipse(2.0, 1.0);
    SimGrid g(curve, 96, 384);
    const double eps = 0.05, D = 0.1;
    Stepper st(g, eps, D, 0.0, 0.025);
    double sigma = eps / std::sqrt(D);
    double xi = 1.0 / (std::log(1.0 / sigma) * moments().I2 / M_PI);
    SimState s = seed_spikes(g, st, gs(), xi, {1.2});

    std::vector<double> arcs;
    for (int k = 0; k <= 2400; ++k) {
        if (k % 300 == 0) {
            auto det = detect_spikes(g, s, 0.3, eps);
            if (det.spikes.size() != 1 || !det.spikes[0].on_boundary) return false;
            arcs.push_back(det.spikes[0].arc_coordinate);
        }
        if (k < 2400) st.step(s);
    }
    std::printf("    off-maximum spike arc trace:");
    for (double a : arcs) std::printf(" %.4f", a);
    std::printf("\n");
    // monotone drift toward the curvature maximum at arc 0 (skip the
    // seeding transient in the first window)
    for (std::size_t i = 2; i < arcs.size(); ++i)
        if (!(arcs[i] < arcs[i - 1])) return false;
    return true;
}

void criterion_8_simulator()
{
    Timer t;
    bool p1 = sim_constant_state();
    bool p2 = sim_persistence();
    bool p3 = sim_drift_signs();
    bool p4 = sim_single_drift_to_maximum();
    bool pass = p1 && p2 && p3 && p4 && t.seconds() < 900.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "constant = %d, persistence = %d, drift signs = %d, curvature drift = %d, "
                  "%.0fs",
                  int(p1), int(p2), int(p3), int(p4), t.seconds());
    report(8, "direct simulation battery", pass, buf);
}

void criterion_9_determinism()
{
#ifndef GMCLUSTER_CLI_PATH
    report(9, "verify-all determinism", false, "CLI path not configured");
#else
    Timer t;
    std::string cli = GMCLUSTER_CLI_PATH;
    auto run = [&](const std::string& dir) {
        std::string cmd = cli + " verify-all --out-dir " + dir + " > " + dir + "_log.txt 2>&1";
        return std::system(cmd.c_str());
    };
    int rc_clean = std::system("rm -rf /tmp/gmc_det_a /tmp/gmc_det_b");
    (void)rc_clean;
    int rc1 = run("/tmp/gmc_det_a");
    int rc2 = run("/tmp/gmc_det_b");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string a = slurp("/tmp/gmc_det_a/verify_results.json");
    std::string b = slurp("/tmp/gmc_det_b/verify_results.json");
    bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "exit codes %d/%d, %zu bytes, identical = %d, %.1fs",
                  rc1, rc2, a.size(), int(a == b), t.seconds());
    report(9, "verify-all determinism (byte-identical results)", pass, buf);
#endif
}

}  // namespace

int main()
{
    criterion_1_matrix_spectrum();
    criterion_2_ground_identities();
    criterion_3_ground_decay();
    criterion_4_green_kernel();
    criterion_5_reduced_system();
    criterion_6_stability_estimates();
    criterion_7_nlep();
    criterion_8_simulator();
    criterion_9_determinism();
    if (failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
