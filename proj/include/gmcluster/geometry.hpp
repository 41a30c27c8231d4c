#pragma once
// Closed planar boundary curves (circle, ellipse, radial Fourier graphs),
// their curvature as a function of arc length, and the location of
// nondegenerate curvature maxima. All three registered curve kinds carry
// closed-form parameter derivatives up to fourth order, so the tangential
// curvature derivatives that enter the stability formulas are analytic:
// noisy finite differences never touch h' or h''.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmcluster/numerics.hpp"

namespace gmcluster {

struct singular_parameterization_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

enum class CurveKind { circle, ellipse, radial_fourier };

class BoundaryCurve {
public:
    static BoundaryCurve make_circle(double radius)
    {
        BoundaryCurve c;
        c.kind_ = CurveKind::circle;
        c.a_ = c.b_ = radius;
        c.init();
        return c;
    }

    static BoundaryCurve make_ellipse(double a, double b)
    {
        BoundaryCurve c;
        c.kind_ = CurveKind::ellipse;
        c.a_ = a;
        c.b_ = b;
        c.init();
        return c;
    }

    // r(theta) = r0 + sum_n ac[n-1] cos(n theta) + bs[n-1] sin(n theta)
    static BoundaryCurve make_radial_fourier(double r0, std::vector<double> ac,
                                             std::vector<double> bs)
    {
        BoundaryCurve c;
        c.kind_ = CurveKind::radial_fourier;
        c.r0_ = r0;
        c.ac_ = std::move(ac);
        c.bs_ = std::move(bs);
        c.init();
        return c;
    }

    CurveKind kind() const { return kind_; }
    int sampling() const { return sampling_; }
    void set_sampling(int n) { sampling_ = n; }
    // parameter-origin shift t -> t + c (same geometric curve)
    void set_phase(double c) { phase_ = c; }

    Vec2 point(double t) const { return eval(t + phase_, 0); }
    Vec2 d1(double t) const { return eval(t + phase_, 1); }
    Vec2 d2(double t) const { return eval(t + phase_, 2); }
    Vec2 d3(double t) const { return eval(t + phase_, 3); }
    Vec2 d4(double t) const { return eval(t + phase_, 4); }

    // radial graph r(theta) support (all three kinds are star-shaped about
    // the origin); used by the boundary-fitted simulator grid
    bool has_radial_graph() const { return true; }
    double radial(double theta, int order) const
    {
        switch (kind_) {
            case CurveKind::circle:
                return order == 0 ? a_ : 0.0;
            case CurveKind::ellipse: {
                // r = a b / sqrt(b^2 cos^2 + a^2 sin^2)
                double c = std::cos(theta), s = std::sin(theta);
                double g = b_ * b_ * c * c + a_ * a_ * s * s;
                if (order == 0) return a_ * b_ / std::sqrt(g);
                double gp = (a_ * a_ - b_ * b_) * std::sin(2 * theta);
                if (order == 1) return -0.5 * a_ * b_ * gp / std::pow(g, 1.5);
                double gpp = 2.0 * (a_ * a_ - b_ * b_) * std::cos(2 * theta);
                if (order == 2)
                    return a_ * b_ * (0.75 * gp * gp / std::pow(g, 2.5) -
                                      0.5 * gpp / std::pow(g, 1.5));
                throw std::invalid_argument("radial: order > 2 unsupported for ellipse");
            }
            case CurveKind::radial_fourier: {
                double v = (order == 0) ? r0_ : 0.0;
                for (std::size_t n = 1; n <= ac_.size() || n <= bs_.size(); ++n) {
                    double an = n <= ac_.size() ? ac_[n - 1] : 0.0;
                    double bn = n <= bs_.size() ? bs_[n - 1] : 0.0;
                    double kn = double(n);
                    double ph = kn * theta + 0.5 * M_PI * double(order);
                    v += std::pow(kn, order) * (an * std::cos(ph) + bn * std::sin(ph));
                }
                return v;
            }
        }
        return 0.0;
    }

    // signed curvature; counterclockwise convex traversal gives kappa > 0
    double curvature(double t) const
    {
        Vec2 g1 = d1(t), g2 = d2(t);
        double v = g1.norm();
        if (v < 1e-12)
            throw singular_parameterization_error("curvature: degenerate tangent");
        return (g1.x * g2.y - g1.y * g2.x) / (v * v * v);
    }

    // d kappa / ds and d^2 kappa / ds^2 (arc-length derivatives)
    double curvature_ds(double t) const
    {
        Vec2 g1 = d1(t), g2 = d2(t), g3 = d3(t);
        double v = g1.norm();
        if (v < 1e-12)
            throw singular_parameterization_error("curvature_ds: degenerate tangent");
        double N = g1.x * g2.y - g1.y * g2.x;
        double Np = g1.x * g3.y - g1.y * g3.x;
        double P = g1.dot(g2);
        double kt = Np / std::pow(v, 3) - 3.0 * N * P / std::pow(v, 5);
        return kt / v;
    }

    double curvature_dss(double t) const
    {
        Vec2 g1 = d1(t), g2 = d2(t), g3 = d3(t), g4 = d4(t);
        double v = g1.norm();
        if (v < 1e-12)
            throw singular_parameterization_error("curvature_dss: degenerate tangent");
        double N = g1.x * g2.y - g1.y * g2.x;
        double Np = g1.x * g3.y - g1.y * g3.x;
        double Npp = g2.x * g3.y - g2.y * g3.x + g1.x * g4.y - g1.y * g4.x;
        double P = g1.dot(g2);
        double Pp = g2.dot(g2) + g1.dot(g3);
        double kt = Np / std::pow(v, 3) - 3.0 * N * P / std::pow(v, 5);
        double ktt = Npp / std::pow(v, 3) - 6.0 * Np * P / std::pow(v, 5) -
                     3.0 * N * Pp / std::pow(v, 5) + 15.0 * N * P * P / std::pow(v, 7);
        return ktt / (v * v) - kt * P / std::pow(v, 4);
    }

    double total_arc_length() const { return arc_table_.back(); }

    double arc_length(double t) const
    {
        double tt = std::fmod(t, 2.0 * M_PI);
        if (tt < 0) tt += 2.0 * M_PI;
        double step = 2.0 * M_PI / double(arc_table_.size() - 1);
        std::size_t i = std::min(std::size_t(tt / step), arc_table_.size() - 2);
        double frac = (tt - double(i) * step) / step;
        return (1.0 - frac) * arc_table_[i] + frac * arc_table_[i + 1];
    }

    double param_of_arc_length(double s) const
    {
        double total = total_arc_length();
        double ss = std::fmod(s, total);
        if (ss < 0) ss += total;
        auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), ss);
        std::size_t i = std::min(std::size_t(std::max<std::ptrdiff_t>(
                                     it - arc_table_.begin() - 1, 0)),
                                 arc_table_.size() - 2);
        double step = 2.0 * M_PI / double(arc_table_.size() - 1);
        double t = (double(i) + (ss - arc_table_[i]) / (arc_table_[i + 1] - arc_table_[i])) * step;
        // two Newton corrections: d(arc)/dt = |gamma'|
        for (int k = 0; k < 2; ++k) t -= (arc_length(t) - ss) / d1(t).norm();
        return t;
    }

    struct Frame {
        Vec2 position, tangent, inward_normal;
    };

    Frame arc_length_frame(double t) const
    {
        Vec2 g1 = d1(t);
        double v = g1.norm();
        if (v < 1e-12)
            throw singular_parameterization_error("arc_length_frame: degenerate tangent");
        Frame fr;
        fr.position = point(t);
        fr.tangent = g1 * (1.0 / v);
        fr.inward_normal = {-fr.tangent.y, fr.tangent.x};
        // orientation check against an interior sample (the origin)
        Vec2 toward{-fr.position.x, -fr.position.y};
        if (fr.inward_normal.dot(toward) <= 0.0)
            throw geometry_error("arc_length_frame: normal does not point inward");
        return fr;
    }

    // closed-curve seam check: position and first two derivatives match
    bool is_closed(double tol = 1e-10) const
    {
        double t0 = 0.0, t1 = 2.0 * M_PI;
        return (point(t0) - point(t1)).norm() < tol && (d1(t0) - d1(t1)).norm() < tol &&
               (d2(t0) - d2(t1)).norm() < tol;
    }

private:
    CurveKind kind_ = CurveKind::circle;
    double a_ = 1.0, b_ = 1.0;
    double r0_ = 1.0;
    std::vector<double> ac_, bs_;
    double phase_ = 0.0;
    int sampling_ = 4096;
    std::vector<double> arc_table_;

    void init()
    {
        if (kind_ != CurveKind::radial_fourier && (a_ <= 0.0 || b_ <= 0.0))
            throw geometry_error("BoundaryCurve: radii must be positive");
        if (kind_ == CurveKind::radial_fourier) {
            for (int j = 0; j < 1024; ++j)
                if (radial(2.0 * M_PI * j / 1024.0, 0) <= 0.0)
                    throw geometry_error("BoundaryCurve: radial graph must stay positive");
        }
        build_arc_table();
    }

    void build_arc_table()
    {
        const int n = 4096;
        arc_table_.assign(n + 1, 0.0);
        double step = 2.0 * M_PI / double(n);
        double prev = eval(phase_, 1).norm();
        for (int i = 1; i <= n; ++i) {
            double t = step * double(i);
            double cur = eval(t + phase_, 1).norm();
            double tm = t - 0.5 * step;
            double mid = eval(tm + phase_, 1).norm();
            arc_table_[i] = arc_table_[i - 1] + step / 6.0 * (prev + 4.0 * mid + cur);
            prev = cur;
        }
    }

    Vec2 eval(double t, int order) const
    {
        switch (kind_) {
            case CurveKind::circle:
            case CurveKind::ellipse: {
                double c = std::cos(t), s = std::sin(t);
                switch (order & 3) {
                    case 0: return {a_ * c, b_ * s};
                    case 1: return {-a_ * s, b_ * c};
                    case 2: return {-a_ * c, -b_ * s};
                    default: return {a_ * s, -b_ * c};
                }
            }
            case CurveKind::radial_fourier: {
                // gamma = r e(t) with e = (cos, sin); e^{(k)} cycles e, e_perp, -e, -e_perp
                double r[5];
                for (int k = 0; k <= order; ++k) r[k] = radial(t, k);
                double c = std::cos(t), s = std::sin(t);
                Vec2 e{c, s}, ep{-s, c};
                auto basis = [&](int k) -> Vec2 {
                    switch (k & 3) {
                        case 0: return e;
                        case 1: return ep;
                        case 2: return e * -1.0;
                        default: return ep * -1.0;
                    }
                };
                // Leibniz: gamma^{(n)} = sum_k C(n,k) r^{(n-k)} e^{(k)}
                static const int binom[5][5] = {{1, 0, 0, 0, 0},
                                                {1, 1, 0, 0, 0},
                                                {1, 2, 1, 0, 0},
                                                {1, 3, 3, 1, 0},
                                                {1, 4, 6, 4, 1}};
                Vec2 out{0.0, 0.0};
                for (int k = 0; k <= order; ++k)
                    out = out + basis(k) * (double(binom[order][k]) * r[order - k]);
                return out;
            }
        }
        return {};
    }
};

struct CurvatureMax {
    double t = 0.0;       // parameter location
    Vec2 position;        // P0
    double h = 0.0;       // curvature value
    double h_ss = 0.0;    // second tangential derivative (arc length)
};

struct CurvatureExtremaReport {
    std::vector<CurvatureMax> maxima;      // nondegenerate maxima, sorted by t
    std::vector<CurvatureMax> degenerate;  // critical points with |h''| below threshold
    bool constant_curvature = false;
    std::string diagnostic;
};

inline CurvatureExtremaReport find_curvature_maxima(const BoundaryCurve& curve)
{
    CurvatureExtremaReport rep;
    const int n = std::max(512, curve.sampling());
    const double step = 2.0 * M_PI / double(n);

    std::vector<double> hp(n), hv(n);
    double hmax_abs = 0.0, kmin = 1e300, kmax = -1e300;
    for (int j = 0; j < n; ++j) {
        double t = step * double(j);
        hv[j] = curve.curvature(t);
        hp[j] = curve.curvature_ds(t);
        hmax_abs = std::max(hmax_abs, std::fabs(hv[j]));
        kmin = std::min(kmin, hv[j]);
        kmax = std::max(kmax, hv[j]);
    }
    if (kmax - kmin < 1e-12 * std::max(1.0, hmax_abs)) {
        rep.constant_curvature = true;
        rep.diagnostic = "degenerate: constant curvature";
        return rep;
    }

    const double h_ss_threshold = 1e-6 * hmax_abs;
    auto classify_root = [&](double t_root) {
        CurvatureMax cm;
        cm.t = std::fmod(t_root, 2.0 * M_PI);
        if (cm.t < 0) cm.t += 2.0 * M_PI;
        cm.position = curve.point(cm.t);
        cm.h = curve.curvature(cm.t);
        cm.h_ss = curve.curvature_dss(cm.t);
        if (std::fabs(cm.h_ss) < h_ss_threshold) rep.degenerate.push_back(cm);
        else if (cm.h_ss < 0.0) rep.maxima.push_back(cm);
    };
    for (int j = 0; j < n; ++j) {
        double f0 = hp[j], f1 = hp[(j + 1) % n];
        if (f0 == 0.0) {  // critical point lands on a sample
            classify_root(step * double(j));
            continue;
        }
        if (f1 == 0.0 || (f0 > 0) == (f1 > 0)) continue;
        // bisection on the bracket, never re-evaluating the endpoints
        double lo = step * double(j), hi = step * double(j + 1);
        bool lo_pos = f0 > 0;
        while (hi - lo > 1e-12) {
            double mid = 0.5 * (lo + hi);
            double fm = curve.curvature_ds(mid);
            if (fm == 0.0) { lo = hi = mid; break; }
            if ((fm > 0) == lo_pos) lo = mid;
            else hi = mid;
        }
        classify_root(0.5 * (lo + hi));
    }
    std::sort(rep.maxima.begin(), rep.maxima.end(),
              [](const CurvatureMax& a, const CurvatureMax& b) { return a.t < b.t; });
    return rep;
}

}  // namespace gmcluster
