#include "gradkit/magnetostatics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gradkit/constants.hpp"

namespace gradkit::magnetostatics {

namespace {

constexpr double kPrefactor = constants::biot_savart_gauss_um_per_ma;

// In-plane unit normal used to fan a trace of finite width into filaments.
Vec3 width_normal(const Vec3& dir) {
    Vec3 n = cross(dir, Vec3{0.0, 0.0, 1.0});
    double nn = norm(n);
    if (nn < 1e-12) {
        n = cross(dir, Vec3{1.0, 0.0, 0.0});
        nn = norm(n);
    }
    return n / nn;
}

}  // namespace

double distance_to_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
    const Vec3 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

// Field of a finite straight filament in the numerically robust form
//   B = k I (ri + rf) / (ri rf (ri rf + Ri.Rf)) (Ri x Rf),
// singular only on the segment itself.
Vec3 segment_field(const Vec3& a, const Vec3& b, double current_ma, const Vec3& p,
                   double epsilon_um) {
    if (distance_to_segment(a, b, p) <= epsilon_um) {
        std::ostringstream msg;
        msg << "field point " << p << " within " << epsilon_um << " um of segment " << a << " -> "
            << b;
        throw SingularityError(msg.str());
    }
    const Vec3 ri = p - a;
    const Vec3 rf = p - b;
    const double ni = norm(ri);
    const double nf = norm(rf);
    const double denom = ni * nf * (ni * nf + dot(ri, rf));
    return cross(ri, rf) * (kPrefactor * current_ma * (ni + nf) / denom);
}

Mat3 segment_gradient(const Vec3& a, const Vec3& b, double current_ma, const Vec3& p,
                      double epsilon_um) {
    if (distance_to_segment(a, b, p) <= epsilon_um) {
        std::ostringstream msg;
        msg << "gradient point " << p << " within " << epsilon_um << " um of segment " << a
            << " -> " << b;
        throw SingularityError(msg.str());
    }
    const Vec3 ri = p - a;
    const Vec3 rf = p - b;
    const double ni = norm(ri);
    const double nf = norm(rf);
    const double ip = dot(ri, rf);
    const double nn = ni * nf;
    const double s = nn + ip;
    const double den = nn * s;
    const double num = ni + nf;
    const Vec3 c = cross(ri, rf);
    const Vec3 amb = a - b;  // d(Ri x Rf)/dp_j = e_j x (a - b)

    Mat3 g;
    for (int j = 0; j < 3; ++j) {
        Vec3 ej{0.0, 0.0, 0.0};
        ej[j] = 1.0;
        const double dni = ri[j] / ni;
        const double dnf = rf[j] / nf;
        const double dnum = dni + dnf;
        const double dnn = dni * nf + ni * dnf;
        const double ds = dnn + ri[j] + rf[j];
        const double dden = dnn * s + nn * ds;
        const double df = (dnum * den - num * dden) / (den * den);
        const Vec3 dc = cross(ej, amb);
        // gauss/um here; converted to gauss/mm below
        const Vec3 col = c * df + dc * (num / den);
        for (int i = 0; i < 3; ++i) g[i][j] = kPrefactor * current_ma * col[i] * 1e3;
    }
    return g;
}

void validate_path(const CurrentPath& path, const FieldOptions& opts) {
    if (path.vertices.size() < 2)
        throw GeometryError("path '" + path.name + "' needs at least 2 vertices");
    if (path.trace_width_um <= 0.0)
        throw GeometryError("path '" + path.name + "' has nonpositive trace width");
    if (std::abs(path.current_ma) > opts.max_current_ma) {
        std::ostringstream msg;
        msg << "path '" << path.name << "' current " << path.current_ma << " mA exceeds limit "
            << opts.max_current_ma << " mA";
        throw GeometryError(msg.str());
    }
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
        if (!all_finite(path.vertices[i]) || !all_finite(path.vertices[i + 1]))
            throw GeometryError("path '" + path.name + "' has a non-finite vertex");
        if (norm(path.vertices[i + 1] - path.vertices[i]) == 0.0) {
            std::ostringstream msg;
            msg << "path '" << path.name << "' has a zero-length segment at vertex " << i;
            throw GeometryError(msg.str());
        }
    }
}

namespace {

// Applies fn(a, b, current) to each filament of each path, fanning segments
// into width_subdivisions parallel filaments across the trace width.
template <typename Fn>
void for_each_filament(std::span<const CurrentPath> paths, const FieldOptions& opts, Fn&& fn) {
    const int k = std::max(1, opts.width_subdivisions);
    for (const CurrentPath& path : paths) {
        validate_path(path, opts);
        const double i_fil = path.current_ma / static_cast<double>(k);
        for (std::size_t s = 0; s + 1 < path.vertices.size(); ++s) {
            const Vec3& a = path.vertices[s];
            const Vec3& b = path.vertices[s + 1];
            if (k == 1) {
                fn(a, b, path.current_ma);
                continue;
            }
            const Vec3 n = width_normal(b - a);
            for (int f = 0; f < k; ++f) {
                const double off =
                    path.trace_width_um * ((f + 0.5) / static_cast<double>(k) - 0.5);
                fn(a + n * off, b + n * off, i_fil);
            }
        }
    }
}

}  // namespace

Vec3 field_at(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts) {
    Vec3 b{};
    for_each_filament(paths, opts, [&](const Vec3& a, const Vec3& q, double i_ma) {
        b += segment_field(a, q, i_ma, p, opts.singularity_epsilon_um);
    });
    return b;
}

Mat3 gradient_at(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts) {
    Mat3 g{};
    for_each_filament(paths, opts, [&](const Vec3& a, const Vec3& q, double i_ma) {
        g += segment_gradient(a, q, i_ma, p, opts.singularity_epsilon_um);
    });
    return g;
}

FieldSample sample(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts) {
    return {field_at(paths, p, opts), gradient_at(paths, p, opts)};
}

double power_dissipated(double current_ma, double resistance_ohm) {
    if (resistance_ohm < 0.0) throw std::domain_error("negative resistance");
    const double i_a = current_ma * 1e-3;
    return i_a * i_a * resistance_ohm * 1e3;
}

SiteReport site_report(std::span<const CurrentPath> paths, const Vec3& trap_center,
                       const Vec3& bias_gauss, double resistance_ohm, const FieldOptions& opts) {
    SiteReport r;
    r.residual_b = field_at(paths, trap_center, opts);
    r.b_total = r.residual_b + bias_gauss;
    const Mat3 g = gradient_at(paths, trap_center, opts);
    r.dbz_dy = g[2][1];
    // d|B|/dy = (B . dB/dy)/|B|; the uniform bias adds no derivative.
    const double btot = norm(r.b_total);
    if (btot > 0.0)
        r.dabs_b_total_dy =
            (r.b_total.x * g[0][1] + r.b_total.y * g[1][1] + r.b_total.z * g[2][1]) / btot;
    double supply = 0.0;
    for (const CurrentPath& path : paths) supply = std::max(supply, std::abs(path.current_ma));
    r.power_mw = power_dissipated(supply, resistance_ohm);
    return r;
}

std::vector<CurrentPath> scale_currents(std::span<const CurrentPath> paths, double factor) {
    std::vector<CurrentPath> out(paths.begin(), paths.end());
    for (CurrentPath& p : out) p.current_ma *= factor;
    return out;
}

}  // namespace gradkit::magnetostatics
