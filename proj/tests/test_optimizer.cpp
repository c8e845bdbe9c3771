#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradkit/optimizer.hpp"
#include "gradkit/sgeometry.hpp"

using namespace gradkit;
using namespace gradkit::sgeometry;
using namespace gradkit::optimizer;

TEST_CASE("reference geometry metrics") {
    const SGeometryParams ref = reference_params();
    const DesignMetrics at300 = evaluate(ref, 300.0);
    CHECK(at300.gradient_g_per_mm >= 12.0);
    CHECK(at300.gradient_g_per_mm <= 17.0);
    CHECK(at300.residual_mg <= 20.0);
    CHECK(at300.power_mw == doctest::Approx(18.0).epsilon(1e-9));
    CHECK(at300.feasible);

    const DesignMetrics at500 = evaluate(ref, 500.0);
    CHECK(at500.gradient_g_per_mm >= 20.0);
    CHECK(at500.residual_mg <= 50.0);
    CHECK(at500.gradient_g_per_mm ==
          doctest::Approx(at300.gradient_g_per_mm * 5.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("axial field vanishes at the solved reference point") {
    const auto paths = build_geometry(reference_params(), 100.0);
    const Vec3 b = magnetostatics::field_at(paths, Vec3{0, 0, 100});
    CHECK(std::abs(b.y) <= 1e-6);  // gauss, per 100 mA
    CHECK(std::abs(b.z) <= 1e-6);
}

TEST_CASE("straight feed-through has no gradient by symmetry") {
    SGeometryParams p = reference_params();
    p.n_s_turns = 0;
    const DesignMetrics m = evaluate(p, 300.0);
    CHECK(std::abs(m.gradient_g_per_mm) < 1e-9);
}

TEST_CASE("zero current design") {
    const DesignMetrics m = evaluate(reference_params(), 0.0);
    CHECK(m.gradient_g_per_mm == 0.0);
    CHECK(m.residual_mg == 0.0);
    CHECK(m.power_mw == 0.0);
    CHECK(m.feasible);
}

TEST_CASE("sub-minimum trace width is infeasible") {
    SGeometryParams p = reference_params();
    p.trace_width = 8.0;
    CHECK_FALSE(evaluate(p, 300.0).feasible);
}

TEST_CASE("series current split") {
    const auto paths = build_geometry(reference_params(), 300.0);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].current_ma == doctest::Approx(300.0));
    CHECK(paths[1].current_ma == doctest::Approx(150.0));
    CHECK(paths[2].current_ma == doctest::Approx(150.0));
    CHECK_FALSE(self_intersects(paths));
}

TEST_CASE("overlapping returns are rejected") {
    SGeometryParams p = reference_params();
    p.return_path_offset = p.s_leg_pitch * 3.0 + 1.0;  // inside the serpentine band
    CHECK_THROWS_AS(build_geometry(p, 300.0), magnetostatics::GeometryError);
}

TEST_CASE("budget of one returns the initial evaluation") {
    const SGeometryParams ref = reference_params();
    OptimizeSpec spec = default_spec(ref, 300.0);
    spec.budget = 1;
    const OptimizeResult r = optimize(spec, ref);
    CHECK(r.evaluations == 1);
    const Knobs k0 = knobs_from(ref);
    for (int i = 0; i < kNumKnobs; ++i) CHECK(r.trace[0].knobs[i] == doctest::Approx(k0[i]));
    CHECK(r.best_metrics.feasible);
}

TEST_CASE("optimizer reaches a strong feasible design from a detuned start") {
    const SGeometryParams start = detuned_params();
    const DesignMetrics init = evaluate(start, 300.0);
    CHECK_FALSE(init.feasible);  // deliberately detuned

    OptimizeSpec spec = default_spec(start, 300.0);
    spec.budget = 500;
    spec.seed = 7;
    const OptimizeResult r = optimize(spec, start);
    CHECK(r.evaluations <= 500);
    CHECK(r.best_metrics.feasible);
    CHECK(r.best_metrics.gradient_g_per_mm >= 14.0);
    CHECK(r.best_metrics.gradient_g_per_mm >= 1.2 * init.gradient_g_per_mm);
    CHECK(r.best_metrics.residual_mg <= 20.0);
    CHECK(r.best_metrics.power_mw <= 18.0 + 1e-9);

    SUBCASE("running best is monotone non-increasing") {
        double best = r.trace.front().running_best;
        for (const auto& e : r.trace) {
            CHECK(e.running_best <= best + 1e-12);
            best = e.running_best;
            CHECK(e.running_best <= e.cost + 1e-12);
        }
    }

    SUBCASE("bounds respected along the trace") {
        for (const auto& e : r.trace)
            for (int i = 0; i < kNumKnobs; ++i) {
                CHECK(e.knobs[i] >= spec.lower[i] - 1e-12);
                CHECK(e.knobs[i] <= spec.upper[i] + 1e-12);
            }
    }

    SUBCASE("objective purity: re-evaluating the best point reproduces metrics") {
        sgeometry::EvaluateOptions eo;
        eo.residual_max_mg = spec.residual_max_mg;
        eo.power_max_mw = spec.power_max_mw;
        eo.resistance_ohm = spec.resistance_ohm;
        const DesignMetrics again = evaluate(r.best_params, 300.0, eo);
        CHECK(again.gradient_g_per_mm == r.best_metrics.gradient_g_per_mm);
        CHECK(again.residual_mg == r.best_metrics.residual_mg);
        CHECK(again.power_mw == r.best_metrics.power_mw);
        CHECK(again.feasible == r.best_metrics.feasible);
    }

    SUBCASE("determinism") {
        const OptimizeResult r2 = optimize(spec, start);
        REQUIRE(r2.trace.size() == r.trace.size());
        CHECK(r2.best_metrics.gradient_g_per_mm == r.best_metrics.gradient_g_per_mm);
    }
}

TEST_CASE("no feasible point raises with the best infeasible point attached") {
    SGeometryParams start = detuned_params();
    OptimizeSpec spec = default_spec(start, 300.0);
    spec.residual_max_mg = 1e-6;  // unattainable
    spec.budget = 40;
    CHECK_THROWS_AS(optimize(spec, start), NoFeasiblePointError);
    try {
        optimize(spec, start);
    } catch (const NoFeasiblePointError& e) {
        CHECK(e.best_metrics.residual_mg > 1e-6);
    }
}

TEST_CASE("width subdivision quantifies the finite-width correction") {
    const SGeometryParams ref = reference_params();
    sgeometry::EvaluateOptions k1, k9;
    k9.width_subdivisions = 9;
    const double g1 = evaluate(ref, 300.0, k1).gradient_g_per_mm;
    const double g9 = evaluate(ref, 300.0, k9).gradient_g_per_mm;
    CHECK(std::abs(g9 - g1) / g1 < 0.02);
}

TEST_CASE("gradient inhomogeneity is reported and small for the reference") {
    const auto m = evaluate(reference_params(), 300.0);
    CHECK(m.gradient_inhomogeneity > 0.0);
    CHECK(m.gradient_inhomogeneity < 0.1);  // near-uniform over the chain extent
}
