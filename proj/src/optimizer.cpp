#include "gradkit/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "gradkit/rng.hpp"

namespace gradkit::optimizer {

namespace {

constexpr double kInfeasiblePenalty = 1e4;

struct Objective {
    const OptimizeSpec& spec;
    const sgeometry::SGeometryParams& base;
    std::vector<TraceEntry>* trace;
    double best = std::numeric_limits<double>::infinity();

    double operator()(const Knobs& k) {
        sgeometry::SGeometryParams p = apply_knobs(base, k);
        sgeometry::EvaluateOptions eopts;
        eopts.residual_max_mg = spec.residual_max_mg;
        eopts.power_max_mw = spec.power_max_mw;
        eopts.resistance_ohm = spec.resistance_ohm;

        TraceEntry e;
        e.eval_index = static_cast<int>(trace->size());
        e.knobs = k;
        double cost;
        try {
            e.metrics = sgeometry::evaluate(p, spec.current_ma, eopts);
            cost = -e.metrics.gradient_g_per_mm;
            if (!e.metrics.feasible) {
                const double viol =
                    std::max(0.0, e.metrics.residual_mg - spec.residual_max_mg) +
                    std::max(0.0, e.metrics.power_mw - spec.power_max_mw) +
                    std::max(0.0, 10.0 - p.trace_width);
                cost = kInfeasiblePenalty + viol;
            }
        } catch (const magnetostatics::GeometryError&) {
            // Unbuildable layout: worse than any buildable infeasible point.
            e.metrics = sgeometry::DesignMetrics{};
            cost = 10.0 * kInfeasiblePenalty;
        }
        e.cost = cost;
        best = std::min(best, cost);
        e.running_best = best;
        trace->push_back(e);
        return cost;
    }
};

Knobs project(const OptimizeSpec& spec, Knobs k) {
    for (int i = 0; i < kNumKnobs; ++i) k[i] = std::clamp(k[i], spec.lower[i], spec.upper[i]);
    return k;
}

}  // namespace

Knobs knobs_from(const sgeometry::SGeometryParams& p) {
    return {p.s_leg_pitch, p.s_leg_length, p.return_path_offset, p.return_path_offset_lower};
}

sgeometry::SGeometryParams apply_knobs(sgeometry::SGeometryParams base, const Knobs& k) {
    base.s_leg_pitch = k[0];
    base.s_leg_length = k[1];
    base.return_path_offset = k[2];
    base.return_path_offset_lower = k[3];
    return base;
}

OptimizeSpec default_spec(const sgeometry::SGeometryParams& around, double current_ma) {
    OptimizeSpec spec;
    spec.current_ma = current_ma;
    const Knobs c = knobs_from(around);
    const Knobs halfwidth = {40.0, 150.0, 120.0, 120.0};
    for (int i = 0; i < kNumKnobs; ++i) {
        spec.lower[i] = c[i] - halfwidth[i];
        spec.upper[i] = c[i] + halfwidth[i];
    }
    return spec;
}

OptimizeResult optimize(const OptimizeSpec& spec, const sgeometry::SGeometryParams& init) {
    if (spec.budget < 1) throw std::domain_error("budget must be >= 1");
    for (int i = 0; i < kNumKnobs; ++i)
        if (spec.lower[i] > spec.upper[i]) throw std::domain_error("empty bounds");

    OptimizeResult result;
    Objective obj{spec, init, &result.trace};

    const int n = kNumKnobs;
    Knobs x0 = project(spec, knobs_from(init));
    std::vector<Knobs> simplex;
    std::vector<double> fval;
    RandomStream rng(spec.seed);

    auto spawn_simplex = [&](const Knobs& center, double scale) {
        simplex.assign(1, center);
        fval.assign(1, obj(center));
        for (int i = 0; i < n && static_cast<int>(result.trace.size()) < spec.budget; ++i) {
            Knobs v = center;
            const double span = spec.upper[i] - spec.lower[i];
            double step = scale * (span > 0.0 ? 0.12 * span : 1.0);
            if (v[i] + step > spec.upper[i]) step = -step;
            v[i] += step;
            simplex.push_back(project(spec, v));
            fval.push_back(obj(simplex.back()));
        }
    };

    spawn_simplex(x0, 1.0);

    auto order = [&]() {
        std::vector<int> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fval[a] < fval[b]; });
        std::vector<Knobs> s2;
        std::vector<double> f2;
        for (int i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fval[i]);
        }
        simplex = s2;
        fval = f2;
    };

    int restarts = 0;
    while (static_cast<int>(result.trace.size()) < spec.budget) {
        if (simplex.size() < static_cast<std::size_t>(n + 1)) break;  // budget ran out mid-spawn
        order();

        // Simplex collapse check; restart around the best point.
        double spread = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i)
            for (int d = 0; d < n; ++d)
                spread = std::max(spread, std::abs(simplex[i][d] - simplex[0][d]));
        if (spread < 1e-9) {
            ++restarts;
            Knobs center = simplex[0];
            for (int d = 0; d < n; ++d) {
                const double span = spec.upper[d] - spec.lower[d];
                center[d] += (rng.uniform() - 0.5) * 0.02 * span;
            }
            spawn_simplex(project(spec, center), std::pow(0.5, restarts));
            continue;
        }

        Knobs centroid{};
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (int d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        for (int d = 0; d < n; ++d) centroid[d] /= static_cast<double>(simplex.size() - 1);

        auto affine = [&](double t) {
            Knobs v;
            for (int d = 0; d < n; ++d) v[d] = centroid[d] + t * (simplex.back()[d] - centroid[d]);
            return project(spec, v);
        };

        const Knobs xr = affine(-1.0);
        const double fr = obj(xr);
        if (static_cast<int>(result.trace.size()) >= spec.budget) break;

        if (fr < fval[0]) {
            const Knobs xe = affine(-2.0);
            const double fe = obj(xe);
            if (fe < fr) {
                simplex.back() = xe;
                fval.back() = fe;
            } else {
                simplex.back() = xr;
                fval.back() = fr;
            }
        } else if (fr < fval[fval.size() - 2]) {
            simplex.back() = xr;
            fval.back() = fr;
        } else {
            const Knobs xc = affine(fr < fval.back() ? -0.5 : 0.5);
            const double fc = obj(xc);
            if (fc < std::min(fr, fval.back())) {
                simplex.back() = xc;
                fval.back() = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    for (int d = 0; d < n; ++d)
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    simplex[i] = project(spec, simplex[i]);
                    if (static_cast<int>(result.trace.size()) >= spec.budget) break;
                    fval[i] = obj(simplex[i]);
                }
            }
        }
    }

    // Best evaluated point over the whole trace; ties resolved by lower
    // power, then lower residual.
    int best_idx = 0;
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        const auto& cand = result.trace[i];
        const auto& best = result.trace[best_idx];
        if (cand.cost < best.cost ||
            (cand.cost == best.cost &&
             (cand.metrics.power_mw < best.metrics.power_mw ||
              (cand.metrics.power_mw == best.metrics.power_mw &&
               cand.metrics.residual_mg < best.metrics.residual_mg))))
            best_idx = static_cast<int>(i);
    }

    result.evaluations = static_cast<int>(result.trace.size());
    result.best_params = apply_knobs(init, result.trace[best_idx].knobs);
    result.best_metrics = result.trace[best_idx].metrics;
    if (!result.best_metrics.feasible)
        throw NoFeasiblePointError("no feasible design found within the evaluation budget",
                                   result.best_params, result.best_metrics);
    return result;
}

}  // namespace gradkit::optimizer
