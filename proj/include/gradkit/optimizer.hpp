#ifndef GRADKIT_OPTIMIZER_HPP
#define GRADKIT_OPTIMIZER_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gradkit/sgeometry.hpp"

namespace gradkit::optimizer {

// The four continuous design knobs searched over; the remaining
// SGeometryParams fields are carried through from the init point.
inline constexpr int kNumKnobs = 4;
using Knobs = std::array<double, kNumKnobs>;  // pitch, leg length, upper/lower return offsets

Knobs knobs_from(const sgeometry::SGeometryParams& p);
sgeometry::SGeometryParams apply_knobs(sgeometry::SGeometryParams base, const Knobs& k);

struct OptimizeSpec {
    double current_ma = 300.0;
    Knobs lower{};  // per-parameter bounds
    Knobs upper{};
    double residual_max_mg = 20.0;
    double power_max_mw = 50.0;
    int budget = 500;
    std::uint64_t seed = 1;
    double resistance_ohm = 0.2;
};

// Box bounds centered on a starting point.
OptimizeSpec default_spec(const sgeometry::SGeometryParams& around, double current_ma);

struct TraceEntry {
    int eval_index = 0;
    Knobs knobs{};
    sgeometry::DesignMetrics metrics;
    double cost = 0.0;          // minimized objective (-gradient + penalty)
    double running_best = 0.0;  // best cost so far, non-increasing
};

struct OptimizeResult {
    sgeometry::SGeometryParams best_params;
    sgeometry::DesignMetrics best_metrics;
    std::vector<TraceEntry> trace;
    int evaluations = 0;
};

class NoFeasiblePointError : public std::runtime_error {
  public:
    NoFeasiblePointError(const std::string& what, sgeometry::SGeometryParams best,
                         sgeometry::DesignMetrics metrics)
        : std::runtime_error(what), best_params(std::move(best)), best_metrics(metrics) {}
    sgeometry::SGeometryParams best_params;
    sgeometry::DesignMetrics best_metrics;
};

// Derivative-free maximization of the addressing gradient subject to the
// residual-field, power and trace-width constraints: Nelder-Mead with
// boundary projection, infeasible points penalized by a large constant plus
// the constraint violation, and deterministic restarts on stagnation.
OptimizeResult optimize(const OptimizeSpec& spec, const sgeometry::SGeometryParams& init);

}  // namespace gradkit::optimizer

#endif
