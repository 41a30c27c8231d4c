// Command-line front end: one subcommand per computation, a shared flat
// key = value config file, and reproducible flat-file outputs. Every flag
// doubles a config key and overrides it; the fully resolved configuration
// is echoed next to the results, with wall-clock metadata kept in its own
// file so result files stay byte-identical across reruns.
//
// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "gmcluster/geometry.hpp"
#include "gmcluster/green.hpp"
#include "gmcluster/ground_state.hpp"
#include "gmcluster/io.hpp"
#include "gmcluster/nlep.hpp"
#include "gmcluster/reduced.hpp"
#include "gmcluster/sim.hpp"
#include "gmcluster/stability.hpp"

using namespace gmcluster;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
};

std::string default_out_root()
{
    const char* env = std::getenv("GMCLUSTER_OUT");
    return env ? env : "out";
}

FlatConfig load_config(const CommonArgs& common)
{
    if (!common.config_path.empty()) return FlatConfig::from_file(common.config_path);
    return {};
}

void write_metadata(const std::string& dir)
{
    std::ofstream out(dir + "/run_metadata.txt");
    auto now = std::chrono::system_clock::now().time_since_epoch();
    out << "wallclock_unix_ms = "
        << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << "\n";
}

BoundaryCurve curve_from(const FlatConfig& cfg, std::map<std::string, std::string>& resolved)
{
    std::string kind = cfg.get_string("curve.kind", "ellipse");
    resolved["curve.kind"] = kind;
    if (kind == "circle") {
        double r = cfg.get_double("curve.radius", 1.0);
        resolved["curve.radius"] = fmt_double(r);
        return BoundaryCurve::make_circle(r);
    }
    if (kind == "ellipse") {
        double a = cfg.get_double("curve.a", 2.0);
        double b = cfg.get_double("curve.b", 1.0);
        resolved["curve.a"] = fmt_double(a);
        resolved["curve.b"] = fmt_double(b);
        return BoundaryCurve::make_ellipse(a, b);
    }
    if (kind == "radial-fourier") {
        double r0 = cfg.get_double("curve.r0", 1.0);
        auto ac = cfg.get_list("curve.cos");
        auto bs = cfg.get_list("curve.sin");
        resolved["curve.r0"] = fmt_double(r0);
        return BoundaryCurve::make_radial_fourier(r0, ac, bs);
    }
    throw config_error("unknown curve.kind: " + kind +
                       " (expected circle, ellipse, radial-fourier)");
}

const GroundState& shared_ground_state()
{
    static GroundState gs = solve_ground_state(25.0, 4000, 1e-12);
    return gs;
}

const GroundStateMoments& shared_moments()
{
    static GroundStateMoments m = compute_moments(shared_ground_state());
    return m;
}

// curvature maximum the cluster parameters refer to (first maximum by
// parameter; the ellipse default puts it at the point (a, 0))
CurvatureMax reference_maximum(const BoundaryCurve& curve)
{
    auto rep = find_curvature_maxima(curve);
    if (rep.constant_curvature)
        throw regime_error("curve has constant curvature: no nondegenerate maximum");
    if (rep.maxima.empty())
        throw regime_error("curve has no nondegenerate curvature maximum");
    return rep.maxima.front();
}

int cmd_ground_state(const CommonArgs& common, const FlatConfig& file_cfg,
                     std::optional<double> r_max, std::optional<int> grid_n,
                     std::optional<double> tol)
{
    std::map<std::string, std::string> resolved;
    double rm = r_max ? *r_max : file_cfg.get_double("ground.r_max", 25.0);
    int gn = grid_n ? *grid_n : file_cfg.get_int("ground.grid_n", 4000);
    double tl = tol ? *tol : file_cfg.get_double("ground.tol", 1e-12);
    resolved["ground.r_max"] = fmt_double(rm);
    resolved["ground.grid_n"] = std::to_string(gn);
    resolved["ground.tol"] = fmt_double(tl);

    GroundState gs = solve_ground_state(rm, gn, tl);
    GroundStateMoments m = compute_moments(gs);

    ensure_directory(common.out_dir);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < gs.r.size(); ++j)
        rows.push_back({gs.r[j], gs.w[j], gs.wp[j]});
    write_csv(common.out_dir + "/profile.csv", {"r", "w", "w_prime"}, rows);

    json jm = {{"I2", m.I2},   {"I3", m.I3},   {"Igrad", m.Igrad}, {"J1", m.J1},
               {"nu1", m.nu1}, {"nu2", m.nu2}, {"m1", m.m1},       {"w0", gs.w0},
               {"tail_coeff", gs.tail_coeff},  {"tail_radius", gs.tail_radius}};
    write_json(common.out_dir + "/moments.json", jm);
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);
    std::cout << "w(0) = " << fmt_double(gs.w0) << "\n"
              << "I2 = " << fmt_double(m.I2) << ", nu1 = " << fmt_double(m.nu1)
              << ", nu2 = " << fmt_double(m.nu2) << "\n";
    return 0;
}

int cmd_green(const CommonArgs& common, const FlatConfig& file_cfg,
              std::optional<double> r_lo, std::optional<double> r_hi,
              std::optional<int> samples)
{
    std::map<std::string, std::string> resolved;
    double lo = r_lo ? *r_lo : file_cfg.get_double("green.r_lo", 0.1);
    double hi = r_hi ? *r_hi : file_cfg.get_double("green.r_hi", 10.0);
    int n = samples ? *samples : file_cfg.get_int("green.samples", 100);
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("green: need 0 < r_lo < r_hi and samples >= 2");
    resolved["green.r_lo"] = fmt_double(lo);
    resolved["green.r_hi"] = fmt_double(hi);
    resolved["green.samples"] = std::to_string(n);

    ensure_directory(common.out_dir);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
        double r = lo + (hi - lo) * double(i) / double(n - 1);
        rows.push_back({r, g0(r), g0_prime(r)});
    }
    write_csv(common.out_dir + "/green_table.csv", {"r", "g0", "g0_prime"}, rows);

    auto ex = expansion_coefficients();
    write_json(common.out_dir + "/expansion.json",
               json{{"c1", ex.c1}, {"c2", ex.c2}, {"c3", ex.c3},
                    {"fit_residual", ex.fit_residual}});
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);
    std::cout << "c1 = " << fmt_double(ex.c1) << ", c2 = " << fmt_double(ex.c2) << "\n";
    return 0;
}

ClusterParams cluster_params_from(const FlatConfig& cfg,
                                  std::map<std::string, std::string>& resolved,
                                  std::optional<int> k, std::optional<double> eps,
                                  std::optional<double> D, std::optional<double> tau)
{
    BoundaryCurve curve = curve_from(cfg, resolved);
    CurvatureMax cm = reference_maximum(curve);
    int kk = k ? *k : cfg.get_int("cluster.k", 3);
    double ee = eps ? *eps : cfg.get_double("cluster.eps", 1e-3);
    double dd = D ? *D : cfg.get_double("cluster.d", 4e-4);
    double tt = tau ? *tau : cfg.get_double("cluster.tau", 0.0);
    resolved["cluster.k"] = std::to_string(kk);
    resolved["cluster.eps"] = fmt_double(ee);
    resolved["cluster.d"] = fmt_double(dd);
    resolved["cluster.tau"] = fmt_double(tt);
    resolved["cluster.h_pp"] = fmt_double(cm.h_ss);
    return ClusterParams::make(ee, dd, kk, cm.h_ss, shared_moments(), tt);
}

int cmd_reduce(const CommonArgs& common, const FlatConfig& file_cfg, std::optional<int> k,
               std::optional<double> eps, std::optional<double> D,
               std::optional<double> eta)
{
    std::map<std::string, std::string> resolved;
    ClusterParams params = cluster_params_from(file_cfg, resolved, k, eps, D, {});
    double et = eta ? *eta : file_cfg.get_double("cluster.eta", 0.5);
    resolved["cluster.eta"] = fmt_double(et);

    SpikeConfiguration cfg = solve_positions(params);
    AdmissibilityReport rep = validate_admissibility(cfg, params, et);

    ensure_directory(common.out_dir);
    json jpos;
    jpos["offsets"] = cfg.offsets;
    jpos["heights"] = cfg.heights;
    jpos["residual_norm"] = cfg.residual_norm;
    jpos["residual_scale"] = params.nu2 * params.xi_sigma * params.sigma;
    jpos["sigma"] = params.sigma;
    jpos["xi_sigma"] = params.xi_sigma;
    jpos["log_ratio"] = params.log_ratio();
    jpos["h_pp"] = params.h_pp;
    jpos["warnings"] = params.warnings;
    json jchecks = json::array();
    for (const auto& c : rep.checks)
        jchecks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
    jpos["admissibility"] = {{"all_pass", rep.all_pass}, {"checks", jchecks}};
    write_json(common.out_dir + "/positions.json", jpos);

    std::vector<std::vector<double>> rows;
    for (int i = 2; i <= params.k; ++i)
        rows.push_back({double(i), cfg.offsets[i - 1] - cfg.offsets[i - 2],
                        asymptotic_spacing(i, params)});
    write_csv(common.out_dir + "/gaps.csv", {"i", "gap", "asymptotic_gap"}, rows);
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);

    std::cout << "offsets:";
    for (double s : cfg.offsets) std::cout << " " << fmt_double(s);
    std::cout << "\nresidual = " << fmt_double(cfg.residual_norm)
              << " (scale " << fmt_double(params.nu2 * params.xi_sigma * params.sigma)
              << ")\n";
    for (const auto& w : params.warnings) std::cout << "warning: " << w << "\n";
    return 0;
}

int cmd_stability(const CommonArgs& common, const FlatConfig& file_cfg, std::optional<int> k,
                  std::optional<double> eps, std::optional<double> D)
{
    std::map<std::string, std::string> resolved;
    ClusterParams params = cluster_params_from(file_cfg, resolved, k, eps, D, {});
    SpikeConfiguration cfg = solve_positions(params);
    SmallSpectrumReport rep = small_eigenvalue_estimates(params, cfg);

    ensure_directory(common.out_dir);
    json jr;
    jr["eigenvalues_A"] = rep.eigenvalues_A;
    jr["eigenvalues_M"] = rep.eigenvalues_M;
    jr["lambda_matrix"] = rep.lambda_matrix;
    jr["lambda_closed_form"] = rep.lambda_closed_form;
    jr["lambda_synchronous"] = rep.lambda_synchronous;
    jr["mode_flags"] = rep.mode_flags;
    jr["warnings"] = rep.warnings;
    jr["note"] = "leading-order asymptotic estimates";
    write_json(common.out_dir + "/stability.json", jr);

    auto A = build_matrix_A(params.k).dense();
    std::vector<std::vector<double>> rows;
    for (const auto& r : A) rows.push_back(r);
    write_csv(common.out_dir + "/matrix_A.csv", {}, rows);
    auto M = build_matrix_M(cfg, params).dense();
    rows.clear();
    for (const auto& r : M) rows.push_back(r);
    write_csv(common.out_dir + "/matrix_M.csv", {}, rows);
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);

    std::cout << "eigenvalues of A: {";
    for (std::size_t i = 0; i < rep.eigenvalues_A.size(); ++i) {
        // integers up to roundoff; keep the console line readable
        double rounded = std::round(rep.eigenvalues_A[i] * 1e9) / 1e9;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", rounded);
        std::cout << (i ? ", " : "") << buf;
    }
    std::cout << "}\n";
    std::cout << "synchronous mode estimate: " << fmt_double(rep.lambda_synchronous) << "\n";
    for (std::size_t n = 0; n < rep.lambda_matrix.size(); ++n)
        std::cout << "mode " << n + 1 << ": " << fmt_double(rep.lambda_matrix[n])
                  << " (closed form " << fmt_double(rep.lambda_closed_form[n]) << ")\n";
    return 0;
}

int cmd_nlep(const CommonArgs& common, const FlatConfig& file_cfg, std::optional<int> mode,
             std::optional<int> grid_n, std::optional<double> gamma,
             std::optional<double> tau, std::optional<double> tau_max,
             std::optional<int> tau_steps)
{
    std::map<std::string, std::string> resolved;
    int m = mode ? *mode : file_cfg.get_int("nlep.mode", 0);
    int n = grid_n ? *grid_n : file_cfg.get_int("nlep.grid_n", 800);
    double rm = file_cfg.get_double("nlep.r_max", 20.0);
    double gm = gamma ? *gamma : file_cfg.get_double("nlep.gamma", 2.0);
    double tt = tau ? *tau : file_cfg.get_double("nlep.tau", 0.0);
    double tmax = tau_max ? *tau_max : file_cfg.get_double("nlep.tau_max", 0.0);
    int tsteps = tau_steps ? *tau_steps : file_cfg.get_int("nlep.tau_steps", 20);
    resolved["nlep.mode"] = std::to_string(m);
    resolved["nlep.grid_n"] = std::to_string(n);
    resolved["nlep.r_max"] = fmt_double(rm);
    resolved["nlep.gamma"] = fmt_double(gm);
    resolved["nlep.tau"] = fmt_double(tt);
    resolved["nlep.tau_max"] = fmt_double(tmax);
    resolved["nlep.tau_steps"] = std::to_string(tsteps);

    auto d = assemble_local(m, shared_ground_state(), n, rm, gm, tt);
    auto spectrum = solve_nlep(tt, d);

    ensure_directory(common.out_dir);
    std::vector<std::vector<double>> rows;
    for (const auto& ev : spectrum)
        rows.push_back({double(m), ev.real(), ev.imag()});
    write_csv(common.out_dir + "/spectrum.csv", {"mode", "re_lambda", "im_lambda"}, rows);
    for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";

    if (tmax > 0.0) {
        auto sweep = tau_sweep(tmax, tsteps, d);
        rows.clear();
        for (const auto& r : sweep.rows) rows.push_back({r.tau, r.max_re});
        write_csv(common.out_dir + "/sweep.csv", {"tau", "max_re_lambda"}, rows);
        if (sweep.crossed)
            std::cout << "dominant eigenvalue crosses zero at tau = "
                      << fmt_double(sweep.tau_crossing) << "\n";
        else
            std::cout << "dominant eigenvalue stays negative up to tau = "
                      << fmt_double(tmax) << "\n";
    }
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);
    std::cout << "dominant eigenvalue (mode " << m << ", tau " << fmt_double(tt)
              << "): " << fmt_double(spectrum.front().real());
    if (spectrum.front().imag() != 0.0)
        std::cout << " + " << fmt_double(spectrum.front().imag()) << " i";
    std::cout << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& common, const FlatConfig& file_cfg,
                 std::optional<double> eps, std::optional<double> D,
                 std::optional<double> tau, std::optional<double> t_end,
                 std::optional<std::string> seed_arcs_flag)
{
    std::map<std::string, std::string> resolved;
    BoundaryCurve curve = curve_from(file_cfg, resolved);

    SimRunConfig cfg;
    cfg.eps = eps ? *eps : file_cfg.get_double("sim.eps", 0.05);
    cfg.D = D ? *D : file_cfg.get_double("sim.d", 0.1);
    cfg.tau = tau ? *tau : file_cfg.get_double("sim.tau", 0.0);
    cfg.n_rho = file_cfg.get_int("sim.n_rho", 96);
    cfg.n_theta = file_cfg.get_int("sim.n_theta", 256);
    cfg.dt = file_cfg.get_double("sim.dt", 0.02);
    cfg.t_end = t_end ? *t_end : file_cfg.get_double("sim.t_end", 10.0);
    cfg.snapshot_every = file_cfg.get_int("sim.snapshot_every", 50);
    cfg.detect_threshold = file_cfg.get_double("sim.threshold", 0.25);
    int fields_every = file_cfg.get_int("sim.fields_every", 0);

    if (seed_arcs_flag) {
        FlatConfig tmp;
        tmp.set("sim.seed_arcs", *seed_arcs_flag);
        cfg.seed_arcs = tmp.get_list("sim.seed_arcs");
    } else {
        cfg.seed_arcs = file_cfg.get_list("sim.seed_arcs");
    }
    if (cfg.seed_arcs.empty()) {
        // default: one spike a quarter turn away from the curvature maximum
        CurvatureMax cm = reference_maximum(curve);
        double s0 = curve.arc_length(cm.t);
        cfg.seed_arcs = {s0 + 0.25 * curve.total_arc_length()};
    }

    resolved["sim.eps"] = fmt_double(cfg.eps);
    resolved["sim.d"] = fmt_double(cfg.D);
    resolved["sim.tau"] = fmt_double(cfg.tau);
    resolved["sim.n_rho"] = std::to_string(cfg.n_rho);
    resolved["sim.n_theta"] = std::to_string(cfg.n_theta);
    resolved["sim.dt"] = fmt_double(cfg.dt);
    resolved["sim.t_end"] = fmt_double(cfg.t_end);
    resolved["sim.snapshot_every"] = std::to_string(cfg.snapshot_every);
    resolved["sim.threshold"] = fmt_double(cfg.detect_threshold);
    resolved["sim.fields_every"] = std::to_string(fields_every);
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.seed_arcs.size(); ++i)
            s += (i ? "," : std::string()) + fmt_double(cfg.seed_arcs[i]);
        resolved["sim.seed_arcs"] = s;
    }

    ensure_directory(common.out_dir);
    SimGrid grid(curve, cfg.n_rho, cfg.n_theta);
    if (fields_every > 0) {
        cfg.on_snapshot = [&](const SimState& st, int index) {
            if (index % fields_every != 0) return;
            char name[64];
            std::snprintf(name, sizeof(name), "/field_u_%05d.bin", index);
            write_field_binary(common.out_dir + name, st.u, cfg.n_rho, cfg.n_theta, st.t);
            std::snprintf(name, sizeof(name), "/field_v_%05d.bin", index);
            write_field_binary(common.out_dir + name, st.v, cfg.n_rho, cfg.n_theta, st.t);
        };
    }
    auto res = run_simulation(grid, shared_ground_state(), cfg);

    std::vector<std::vector<double>> rows;
    for (const auto& snap : res.snapshots) {
        int index = 0;
        for (const auto& sp : snap.detection.spikes) {
            if (!sp.on_boundary) continue;
            rows.push_back({snap.t, double(index++), sp.arc_coordinate, sp.height});
        }
    }
    write_csv(common.out_dir + "/tracks.csv",
              {"t", "spike_index", "arc_coordinate", "height"}, rows);

    write_field_binary(common.out_dir + "/field_u_final.bin", res.final_state.u, cfg.n_rho,
                       cfg.n_theta, res.final_state.t);
    write_field_binary(common.out_dir + "/field_v_final.bin", res.final_state.v, cfg.n_rho,
                       cfg.n_theta, res.final_state.t);

    json js;
    js["steps_taken"] = res.steps_taken;
    js["warnings"] = res.warnings;
    js["note"] = "desk-scale parameters: asymptotic comparisons are directional only";
    json jsnaps = json::array();
    for (const auto& snap : res.snapshots) {
        json j;
        j["t"] = snap.t;
        j["u_mass"] = snap.u_mass;
        j["centroid_arc"] = snap.centroid_arc;
        j["gaps"] = snap.gaps;
        json jsp = json::array();
        for (const auto& sp : snap.detection.spikes)
            jsp.push_back({{"x", sp.position.x},
                           {"y", sp.position.y},
                           {"height", sp.height},
                           {"on_boundary", sp.on_boundary},
                           {"arc", sp.arc_coordinate}});
        j["spikes"] = jsp;
        jsnaps.push_back(j);
    }
    js["snapshots"] = jsnaps;
    write_json(common.out_dir + "/summary.json", js);
    write_resolved_config(common.out_dir + "/resolved_config.txt", resolved);
    write_metadata(common.out_dir);

    const auto& last = res.snapshots.back();
    std::cout << "t = " << fmt_double(last.t) << ", spikes = "
              << last.detection.spikes.size() << "\n";
    return 0;
}

struct VerifyCheck {
    std::string name;
    bool pass;
    double value;
};

int cmd_verify_all(const CommonArgs& common)
{
    std::vector<VerifyCheck> checks;
    auto record = [&](const std::string& name, bool pass, double value) {
        checks.push_back({name, pass, value});
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << " (" << fmt_double(value)
                  << ")\n";
    };

    {
        double worst = 0.0;
        for (int k = 1; k <= 12; ++k) {
            auto ev = eigenvalues_A(k);
            for (int n = 0; n < k; ++n)
                worst = std::max(worst, std::fabs(ev[n] - double(n * (n + 1))));
        }
        record("matrix A spectrum n(n+1), k = 1..12", worst < 1e-9, worst);
    }
    const GroundState& gs = shared_ground_state();
    const GroundStateMoments& m = shared_moments();
    {
        double e1 = std::fabs(m.I3 - 1.5 * m.I2) / m.I3;
        double e2 = std::fabs(m.Igrad - 0.5 * m.I2) / m.Igrad;
        double e3 = std::fabs(m.Igrad + m.I2 - m.I3) / m.I3;
        double e4 = std::fabs(2.0 * m.m1 + m.I2) / m.I2;
        double worst = std::max({e1, e2, e3, e4});
        record("ground state integral identities", worst < 1e-4, worst);
    }
    {
        double ratio = gs.value(10.0) / gs.value(5.0);
        double predicted = std::sqrt(0.5) * std::exp(-5.0);
        record("ground state decay law", std::fabs(ratio / predicted - 1.0) < 0.05,
               ratio / predicted);
        std::size_t j20 = std::size_t(20.0 / gs.h);
        double rr = gs.wp[j20] / gs.w[j20];
        record("tail logarithmic derivative at r = 20", rr > -1.03 && rr < -0.97, rr);
    }
    {
        auto ex = expansion_coefficients();
        double c1_exact = (std::log(2.0) - 0.57721566490153286) / M_PI;
        double c2_exact = -1.0 / (4.0 * M_PI);
        bool ok = std::fabs(ex.c1 - c1_exact) < 1e-5 && std::fabs(ex.c2 - c2_exact) < 1e-5;
        record("green kernel expansion coefficients", ok,
               std::max(std::fabs(ex.c1 - c1_exact), std::fabs(ex.c2 - c2_exact)));
    }
    {
        const double cases[3][2] = {{1e-3, 4e-4}, {5e-4, 2.5e-4}, {1.5e-4, 1e-4}};
        bool ok = true;
        double worst = 0.0;
        double prev_dev = 1e300;
        bool trend = true;
        for (auto& cs : cases) {
            auto p = ClusterParams::make(cs[0], cs[1], 2, -18.0, m);
            auto c = solve_positions(p);
            worst = std::max(worst, c.residual_norm / (p.nu2 * p.xi_sigma * p.sigma));
            ok = ok && c.residual_norm < 1e-12 * p.nu2 * p.xi_sigma * p.sigma;
            double dev = std::fabs((c.offsets[1] - c.offsets[0]) - asymptotic_spacing(2, p)) /
                         (c.offsets[1] - c.offsets[0]);
            trend = trend && dev < prev_dev;
            prev_dev = dev;
        }
        record("reduced system residuals", ok, worst);
        record("asymptotic spacing deviation trend", trend, prev_dev);
    }
    {
        auto p = ClusterParams::make(1e-3, 4e-4, 3, -18.0, m);
        auto rep = small_eigenvalue_estimates(p, solve_positions(p));
        bool ok = rep.lambda_synchronous < 0.0;
        for (double l : rep.lambda_matrix) ok = ok && l < 0.0;
        record("small eigenvalue signs", ok, rep.lambda_synchronous);
    }
    {
        auto d = assemble_local(0, gs, 500, 20.0, 2.0);
        auto ev = solve_nlep(0.0, d);
        record("nlep dominant eigenvalue negative", ev.front().real() < -0.5,
               ev.front().real());
        auto d0 = assemble_local(0, gs, 500, 20.0, 0.0);
        auto ev0 = solve_nlep(0.0, d0);
        record("local operator unstable without coupling", ev0.front().real() > 0.0,
               ev0.front().real());
    }
    {
        SimGrid sg(BoundaryCurve::make_circle(1.0), 48, 96);
        Stepper st(sg, 0.05, 0.1, 0.0, 0.02);
        SimState s;
        s.u.assign(sg.size(), 1.0);
        s.v.assign(sg.size(), 1.0);
        for (int k = 0; k < 200; ++k) st.step(s);
        double drift = 0.0;
        for (double x : s.u) drift = std::max(drift, std::fabs(x - 1.0));
        record("homogeneous state invariant", drift < 200 * 1e-10, drift);
    }

    ensure_directory(common.out_dir);
    json jr = json::array();
    bool all = true;
    for (const auto& c : checks) {
        jr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
        all = all && c.pass;
    }
    write_json(common.out_dir + "/verify_results.json",
               json{{"all_pass", all}, {"checks", jr}});
    write_metadata(common.out_dir);
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"numerical laboratory for boundary spike clusters in the 2-D "
                 "activator-inhibitor system"};
    app.require_subcommand(1);

    CommonArgs common;
    common.out_dir = default_out_root();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "flat key = value config file");
        sub->add_option("--out-dir", common.out_dir, "output directory");
    };

    auto* sc_gs = app.add_subcommand("ground-state", "solve the radial ground state");
    std::optional<double> gs_rmax, gs_tol;
    std::optional<int> gs_n;
    add_common(sc_gs);
    sc_gs->add_option("--r-max", gs_rmax, "truncation radius (config: ground.r_max)");
    sc_gs->add_option("--grid-n", gs_n, "grid intervals (config: ground.grid_n)");
    sc_gs->add_option("--tol", gs_tol, "shooting tolerance (config: ground.tol)");

    auto* sc_gr = app.add_subcommand("green", "half-plane kernel diagnostics");
    std::optional<double> gr_lo, gr_hi;
    std::optional<int> gr_n;
    add_common(sc_gr);
    sc_gr->add_option("--r-lo", gr_lo, "table start (config: green.r_lo)");
    sc_gr->add_option("--r-hi", gr_hi, "table end (config: green.r_hi)");
    sc_gr->add_option("--samples", gr_n, "table rows (config: green.samples)");

    auto* sc_rd = app.add_subcommand("reduce", "solve the spike-position system");
    std::optional<int> rd_k;
    std::optional<double> rd_eps, rd_d, rd_eta;
    add_common(sc_rd);
    sc_rd->add_option("--k", rd_k, "spike count (config: cluster.k)");
    sc_rd->add_option("--eps", rd_eps, "activator length (config: cluster.eps)");
    sc_rd->add_option("--d", rd_d, "inhibitor diffusivity (config: cluster.d)");
    sc_rd->add_option("--eta", rd_eta, "admissibility slack (config: cluster.eta)");

    auto* sc_st = app.add_subcommand("stability", "small-eigenvalue matrices and estimates");
    std::optional<int> st_k;
    std::optional<double> st_eps, st_d;
    add_common(sc_st);
    sc_st->add_option("--k", st_k, "spike count (config: cluster.k)");
    sc_st->add_option("--eps", st_eps, "activator length (config: cluster.eps)");
    sc_st->add_option("--d", st_d, "inhibitor diffusivity (config: cluster.d)");

    auto* sc_nl = app.add_subcommand("nlep", "nonlocal eigenvalue problem");
    std::optional<int> nl_mode, nl_n, nl_steps;
    std::optional<double> nl_gamma, nl_tau, nl_tmax;
    add_common(sc_nl);
    sc_nl->add_option("--mode", nl_mode, "angular mode (config: nlep.mode)");
    sc_nl->add_option("--grid-n", nl_n, "radial intervals (config: nlep.grid_n)");
    sc_nl->add_option("--gamma", nl_gamma, "nonlocal coefficient (config: nlep.gamma)");
    sc_nl->add_option("--tau", nl_tau, "delay parameter (config: nlep.tau)");
    sc_nl->add_option("--tau-max", nl_tmax, "sweep range (config: nlep.tau_max)");
    sc_nl->add_option("--tau-steps", nl_steps, "sweep steps (config: nlep.tau_steps)");

    auto* sc_sim = app.add_subcommand("simulate", "time-integrate the full system");
    std::optional<double> sm_eps, sm_d, sm_tau, sm_tend;
    std::optional<std::string> sm_seeds;
    add_common(sc_sim);
    sc_sim->add_option("--eps", sm_eps, "activator length (config: sim.eps)");
    sc_sim->add_option("--d", sm_d, "inhibitor diffusivity (config: sim.d)");
    sc_sim->add_option("--tau", sm_tau, "inhibitor time constant (config: sim.tau)");
    sc_sim->add_option("--t-end", sm_tend, "integration time (config: sim.t_end)");
    sc_sim->add_option("--seed-arcs", sm_seeds,
                       "comma-separated arc positions (config: sim.seed_arcs)");

    auto* sc_va = app.add_subcommand("verify-all", "run the full property suite");
    add_common(sc_va);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        FlatConfig file_cfg = load_config(common);
        if (sc_gs->parsed()) return cmd_ground_state(common, file_cfg, gs_rmax, gs_n, gs_tol);
        if (sc_gr->parsed()) return cmd_green(common, file_cfg, gr_lo, gr_hi, gr_n);
        if (sc_rd->parsed()) return cmd_reduce(common, file_cfg, rd_k, rd_eps, rd_d, rd_eta);
        if (sc_st->parsed()) return cmd_stability(common, file_cfg, st_k, st_eps, st_d);
        if (sc_nl->parsed())
            return cmd_nlep(common, file_cfg, nl_mode, nl_n, nl_gamma, nl_tau, nl_tmax,
                            nl_steps);
        if (sc_sim->parsed())
            return cmd_simulate(common, file_cfg, sm_eps, sm_d, sm_tau, sm_tend, sm_seeds);
        if (sc_va->parsed()) return cmd_verify_all(common);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const regime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const geometry_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
