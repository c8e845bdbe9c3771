#ifndef GRADKIT_SGEOMETRY_HPP
#define GRADKIT_SGEOMETRY_HPP

#include <vector>

#include "gradkit/magnetostatics.hpp"

namespace gradkit::sgeometry {

// Parameterized family of gradient-wire layouts: a serpentine of transverse
// runs (an S-shaped detour) below the trap center, fed from one end, with the
// current splitting at the opposite end into two wide return paths that run
// back alongside the S. All runs are transverse to the trap axis so the
// horizontal axial field comes only from the short end connectors; the run
// levels and the two return offsets are the cancellation knobs.
//
// n_s_turns = 0 degenerates to a straight feed-through along the trap axis
// (plus its two returns), which produces no addressing gradient at the
// center by mirror symmetry.
struct SGeometryParams {
    double s_leg_length = 800.0;        // run half-length, um
    double s_leg_pitch = 55.0;          // run level spacing, um
    double trace_width = 10.0;          // um; >= 10 for feasibility
    double return_path_offset = 228.0;  // upper return level (axial offset), um
    int n_s_turns = 6;                  // runs - 1; 0 = straight feed-through
    double trap_height_um = 100.0;

    // Family constants (defaulted; exposed for completeness).
    double return_path_offset_lower = -228.0;  // lower return level, um
    double return_width = 60.0;                // return trace width, um
    double end_margin = 120.0;                 // feed/exit extension beyond the runs, um
};

// Calibrated reference layout: level pattern and return offsets solved so the
// residual field at the trap center is at the few-mG level while the
// addressing gradient lands in the regime of tens of G/mm at 300..500 mA.
SGeometryParams reference_params();

// Reference layout with the serpentine detuned; used as the optimizer's
// starting point in examples and tests.
SGeometryParams detuned_params();

struct DesignMetrics {
    double gradient_g_per_mm = 0.0;  // dBz/dy at the trap center
    double residual_mg = 0.0;        // |path field| at the trap center, milligauss
    double power_mw = 0.0;
    // Relative spread of dBz/dy over +-5 um of chain extent; an uneven
    // splitting diagnostic.
    double gradient_inhomogeneity = 0.0;
    bool feasible = false;
};

struct EvaluateOptions {
    double residual_max_mg = 20.0;
    double power_max_mw = 50.0;
    double min_trace_width_um = 10.0;
    double resistance_ohm = 0.2;
    int width_subdivisions = 1;
};

// Builds the three current paths (center serpentine at the given supply
// current, two half-current returns). Throws GeometryError on
// self-intersecting or degenerate layouts.
std::vector<magnetostatics::CurrentPath> build_geometry(const SGeometryParams& params,
                                                        double current_ma = 300.0);

DesignMetrics evaluate(const SGeometryParams& params, double current_ma,
                       const EvaluateOptions& opts = {});

// True if any two non-adjacent segments intersect.
bool self_intersects(const std::vector<magnetostatics::CurrentPath>& paths);

}  // namespace gradkit::sgeometry

#endif
