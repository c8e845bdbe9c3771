#ifndef GRADKIT_MAGNETOSTATICS_HPP
#define GRADKIT_MAGNETOSTATICS_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradkit/vec3.hpp"

namespace gradkit::magnetostatics {

// Interface units: positions in um, currents in mA, fields in gauss,
// gradients in gauss/mm, power in mW.

struct CurrentPath {
    std::string name;
    std::vector<Vec3> vertices;   // polyline, >= 2 points, um
    double current_ma = 0.0;      // signed; positive flows vertices.front() -> back()
    double trace_width_um = 10.0; // metadata for constraints and width subdivision
};

struct FieldSample {
    Vec3 b;     // gauss
    Mat3 grad;  // gauss/mm, grad[i][j] = dB_i / dx_j
};

struct SiteReport {
    Vec3 b_total;     // path field + external bias, gauss
    Vec3 residual_b;  // path field alone at the trap center, gauss
    double dbz_dy = 0.0;  // gauss/mm; the addressing gradient (bias is uniform)
    double dabs_b_total_dy = 0.0;  // gauss/mm; d|B_total|/dy, for sensitivity studies
    double power_mw = 0.0;
};

struct FieldOptions {
    int width_subdivisions = 1;          // K parallel filaments across trace_width
    double singularity_epsilon_um = 0.1; // minimum distance to any conductor
    double max_current_ma = 500.0;       // validation bound on |current|
};

class SingularityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Exact field of a straight thin filament from a to b carrying current_ma,
// evaluated at p. Throws SingularityError if p is within epsilon of the segment.
Vec3 segment_field(const Vec3& a, const Vec3& b, double current_ma, const Vec3& p,
                   double epsilon_um = 0.1);

// Analytic spatial derivative tensor of segment_field, gauss/mm.
Mat3 segment_gradient(const Vec3& a, const Vec3& b, double current_ma, const Vec3& p,
                      double epsilon_um = 0.1);

void validate_path(const CurrentPath& path, const FieldOptions& opts = {});

Vec3 field_at(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts = {});
Mat3 gradient_at(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts = {});

// Field and gradient bundled at one point.
FieldSample sample(std::span<const CurrentPath> paths, const Vec3& p, const FieldOptions& opts = {});

// I^2 R in milliwatts; current in mA, resistance in ohms.
double power_dissipated(double current_ma, double resistance_ohm);

// Field, gradient entry [z][y], residual field and dissipated power at a site.
// Power is computed from the largest |path current| (the supply current of a
// series-fed geometry) through the given resistance.
SiteReport site_report(std::span<const CurrentPath> paths, const Vec3& trap_center,
                       const Vec3& bias_gauss, double resistance_ohm,
                       const FieldOptions& opts = {});

// Multiplies every path current by factor.
std::vector<CurrentPath> scale_currents(std::span<const CurrentPath> paths, double factor);

// Distance from p to the closed segment [a, b].
double distance_to_segment(const Vec3& a, const Vec3& b, const Vec3& p);

}  // namespace gradkit::magnetostatics

#endif
