#include "gradkit/sgeometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gradkit::sgeometry {

using magnetostatics::CurrentPath;
using magnetostatics::GeometryError;

namespace {

// Run levels of the serpentine: a symmetric ladder. With an odd run count
// the mirrored levels carry equal currents, so the vertical field component
// cancels at the trap center while dBz/dy survives; the two return offsets
// then cancel the axial component.
std::vector<double> run_levels(const SGeometryParams& p) {
    const int n_runs = p.n_s_turns + 1;
    std::vector<double> levels(n_runs);
    for (int k = 0; k < n_runs; ++k) levels[k] = p.s_leg_pitch * (k - 0.5 * (n_runs - 1));
    return levels;
}

Vec3 pt(double x, double y) { return Vec3{x, y, 0.0}; }

double seg_distance(const Vec3& a1, const Vec3& a2, const Vec3& b1, const Vec3& b2) {
    // Minimum distance between two segments (Ericson, Real-Time Collision
    // Detection, 5.1.9).
    const Vec3 d1 = a2 - a1;
    const Vec3 d2 = b2 - b1;
    const Vec3 r = a1 - b1;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0, t = 0.0;
    if (a <= 1e-18 && e <= 1e-18) return norm(r);
    if (a <= 1e-18) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= 1e-18) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            if (denom > 1e-18) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return norm((a1 + d1 * s) - (b1 + d2 * t));
}

}  // namespace

bool self_intersects(const std::vector<CurrentPath>& paths) {
    struct Seg {
        Vec3 a, b;
        int path;
        int index;
    };
    std::vector<Seg> segs;
    for (int p = 0; p < static_cast<int>(paths.size()); ++p)
        for (int i = 0; i + 1 < static_cast<int>(paths[p].vertices.size()); ++i)
            segs.push_back({paths[p].vertices[i], paths[p].vertices[i + 1], p, i});

    auto share_endpoint = [](const Seg& u, const Seg& v) {
        for (const Vec3* x : {&u.a, &u.b})
            for (const Vec3* y : {&v.a, &v.b})
                if (norm(*x - *y) < 1e-9) return true;
        return false;
    };

    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            const bool adjacent =
                segs[i].path == segs[j].path && std::abs(segs[i].index - segs[j].index) == 1;
            if (adjacent || share_endpoint(segs[i], segs[j])) continue;
            if (seg_distance(segs[i].a, segs[i].b, segs[j].a, segs[j].b) < 1e-6) return true;
        }
    }
    return false;
}

std::vector<CurrentPath> build_geometry(const SGeometryParams& p, double current_ma) {
    if (p.trace_width <= 0.0) throw GeometryError("trace width must be positive");
    if (p.s_leg_length <= 0.0 || p.s_leg_pitch <= 0.0)
        throw GeometryError("leg length and pitch must be positive");
    if (p.n_s_turns < 0) throw GeometryError("n_s_turns must be nonnegative");
    if (p.trap_height_um <= 0.0) throw GeometryError("trap height must be positive");

    const double half = p.s_leg_length;
    const double x_end = half + p.end_margin;
    std::vector<CurrentPath> paths;

    if (p.n_s_turns == 0) {
        // Straight feed-through along the trap axis plus two symmetric
        // returns; no gradient at the center by mirror symmetry.
        const double off = std::abs(p.return_path_offset);
        if (off < p.trace_width) throw GeometryError("return offset too small for feed-through");
        CurrentPath center{"s_center", {pt(0.0, -x_end), pt(0.0, x_end)}, current_ma,
                           p.trace_width};
        CurrentPath left{"return_left",
                         {pt(0.0, x_end), pt(-off, x_end), pt(-off, -x_end), pt(0.0, -x_end)},
                         current_ma / 2.0,
                         p.return_width};
        CurrentPath right{"return_right",
                          {pt(0.0, x_end), pt(off, x_end), pt(off, -x_end), pt(0.0, -x_end)},
                          current_ma / 2.0,
                          p.return_width};
        paths = {center, left, right};
    } else {
        const std::vector<double> levels = run_levels(p);
        const int n_runs = static_cast<int>(levels.size());
        for (int k = 0; k + 1 < n_runs; ++k)
            if (levels[k + 1] - levels[k] < p.trace_width)
                throw GeometryError("run levels closer than the trace width");

        const double yr_up = p.return_path_offset;
        const double yr_dn = p.return_path_offset_lower;
        if (yr_up - levels.back() < p.return_width / 2.0 + p.trace_width / 2.0)
            throw GeometryError("upper return overlaps the serpentine");
        if (levels.front() - yr_dn < p.return_width / 2.0 + p.trace_width / 2.0)
            throw GeometryError("lower return overlaps the serpentine");

        // Center serpentine: the first run flows -x (this orientation makes
        // dBz/dy positive for positive current), alternating afterwards, with
        // jogs at the alternating far ends.
        CurrentPath center;
        center.name = "s_center";
        center.current_ma = current_ma;
        center.trace_width_um = p.trace_width;
        center.vertices.push_back(pt(x_end, levels[0]));
        double side = -1.0;  // end reached by the current run (+x or -x)
        for (int k = 0; k < n_runs; ++k) {
            const double x_run_end = (k == n_runs - 1) ? side * x_end : side * half;
            center.vertices.push_back(pt(x_run_end, levels[k]));
            if (k + 1 < n_runs) {
                center.vertices.push_back(pt(x_run_end, levels[k + 1]));
                side = -side;
            }
        }
        const Vec3 exit_pt = center.vertices.back();
        const Vec3 feed_pt = center.vertices.front();

        auto make_return = [&](const char* name, double level) {
            CurrentPath r;
            r.name = name;
            r.current_ma = current_ma / 2.0;
            r.trace_width_um = p.return_width;
            r.vertices = {exit_pt, pt(exit_pt.x, level), pt(feed_pt.x, level), feed_pt};
            return r;
        };
        paths = {center, make_return("return_upper", yr_up), make_return("return_lower", yr_dn)};
    }

    if (self_intersects(paths)) throw GeometryError("generated layout self-intersects");
    return paths;
}

DesignMetrics evaluate(const SGeometryParams& p, double current_ma, const EvaluateOptions& opts) {
    magnetostatics::FieldOptions fopts;
    fopts.width_subdivisions = opts.width_subdivisions;
    fopts.max_current_ma = std::max(500.0, std::abs(current_ma));
    const std::vector<CurrentPath> paths = build_geometry(p, current_ma);
    const Vec3 center{0.0, 0.0, p.trap_height_um};
    const magnetostatics::SiteReport site =
        magnetostatics::site_report(paths, center, Vec3{}, opts.resistance_ohm, fopts);

    DesignMetrics m;
    m.gradient_g_per_mm = site.dbz_dy;
    m.residual_mg = norm(site.residual_b) * 1e3;
    m.power_mw = site.power_mw;
    if (current_ma != 0.0) {
        const double g_lo =
            magnetostatics::gradient_at(paths, center - Vec3{0, 5.0, 0}, fopts)[2][1];
        const double g_hi =
            magnetostatics::gradient_at(paths, center + Vec3{0, 5.0, 0}, fopts)[2][1];
        if (site.dbz_dy != 0.0)
            m.gradient_inhomogeneity = std::abs(g_hi - g_lo) / std::abs(site.dbz_dy);
    }
    const double tol = 1e-9;  // float guard on boundary equality
    m.feasible = m.residual_mg <= opts.residual_max_mg * (1.0 + tol) &&
                 m.power_mw <= opts.power_max_mw * (1.0 + tol) &&
                 p.trace_width + tol >= opts.min_trace_width_um;
    return m;
}

SGeometryParams reference_params() {
    // Solved so the axial and vertical field components vanish at the trap
    // center and the 300 mA gradient is 14.5 G/mm; the leftover residual is
    // the transverse component from the end connectors (~6 mG at 300 mA).
    SGeometryParams p;
    p.s_leg_length = 800.0;
    p.s_leg_pitch = 55.776706030945;
    p.trace_width = 10.0;
    p.return_path_offset = 228.602838418341;
    p.return_path_offset_lower = -228.602838418341;
    p.n_s_turns = 6;
    return p;
}

SGeometryParams detuned_params() {
    SGeometryParams p = reference_params();
    p.s_leg_pitch -= 5.0;
    p.return_path_offset += 25.0;
    p.return_path_offset_lower -= 20.0;
    return p;
}

}  // namespace gradkit::sgeometry
