#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gradkit/geometry_io.hpp"
#include "gradkit/magnetostatics.hpp"
#include "gradkit/rng.hpp"
#include "oracles.hpp"

using namespace gradkit;
using namespace gradkit::magnetostatics;

namespace {

std::vector<CurrentPath> load_fixture() {
    return geometry_io::load_file(std::string(GRADKIT_DATA_DIR) + "/reference_geometry.txt");
}

// Random point at least min_dist away from every conductor.
Vec3 random_clear_point(RandomStream& rng, std::span<const CurrentPath> paths, double min_dist) {
    for (;;) {
        Vec3 p{(rng.uniform() - 0.5) * 2000.0, (rng.uniform() - 0.5) * 2000.0,
               20.0 + rng.uniform() * 400.0};
        double d = 1e30;
        for (const auto& path : paths)
            for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
                d = std::min(d, distance_to_segment(path.vertices[i], path.vertices[i + 1], p));
        if (d > min_dist) return p;
    }
}

}  // namespace

TEST_CASE("finite segment reproduces the infinite-wire field") {
    // 1 m long wire, 1 A, observation 1 mm away.
    const Vec3 a{0, -500000, 0}, b{0, 500000, 0}, p{1000, 0, 0};
    const Vec3 field = segment_field(a, b, 1000.0, p);
    const double expected = 2.0;  // mu0 I / (2 pi d)
    CHECK(std::abs(norm(field) - expected) / expected < 1e-4);
    CHECK(field.z < 0.0);
    CHECK(std::abs(field.x) < 1e-9);
    CHECK(std::abs(field.y) < 1e-9);
}

TEST_CASE("collinear point beyond the endpoints sees zero field") {
    const Vec3 a{0, 0, 0}, b{0, 100, 0}, p{0, 250, 0};
    const Vec3 field = segment_field(a, b, 200.0, p);
    CHECK(norm(field) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("segment field matches adaptive quadrature") {
    const Vec3 a{0, 0, 0}, b{100, 50, 0}, p{30, 80, 40};
    const Vec3 analytic = segment_field(a, b, 300.0, p);
    const Vec3 reference = oracles::segment_field_quadrature(a, b, 300.0, p);
    CHECK(norm(analytic - reference) / norm(reference) < 1e-9);
}

TEST_CASE("quadrature agreement on 100 random segments") {
    RandomStream rng(2026);
    for (int k = 0; k < 100; ++k) {
        Vec3 a{rng.uniform() * 200 - 100, rng.uniform() * 200 - 100, rng.uniform() * 50};
        Vec3 b{rng.uniform() * 200 - 100, rng.uniform() * 200 - 100, rng.uniform() * 50};
        if (norm(b - a) < 5.0) {
            --k;
            continue;
        }
        Vec3 p{rng.uniform() * 400 - 200, rng.uniform() * 400 - 200, 60 + rng.uniform() * 200};
        if (distance_to_segment(a, b, p) < 10.0) {
            --k;
            continue;
        }
        const double current = (rng.uniform() - 0.5) * 800.0;
        if (std::abs(current) < 1.0) {
            --k;
            continue;
        }
        const Vec3 analytic = segment_field(a, b, current, p);
        const Vec3 reference = oracles::segment_field_quadrature(a, b, current, p);
        CHECK(norm(analytic - reference) <= 1e-9 * norm(reference));
    }
}

TEST_CASE("point on the conductor raises a singularity error") {
    const Vec3 a{0, 0, 0}, b{100, 0, 0};
    CHECK_THROWS_AS(segment_field(a, b, 100.0, Vec3{50, 0.05, 0}), SingularityError);
    CHECK_THROWS_AS(gradient_at(std::vector<CurrentPath>{{"w", {a, b}, 100.0, 10.0}},
                                Vec3{50, 0, 0.05}),
                    SingularityError);
}

TEST_CASE("field_at of an empty path list is zero") {
    std::vector<CurrentPath> none;
    CHECK(norm(field_at(none, Vec3{1, 2, 3})) == 0.0);
}

TEST_CASE("opposite currents cancel to machine precision") {
    CurrentPath fwd{"fwd", {{0, -300, 0}, {40, 0, 0}, {0, 300, 0}}, 240.0, 10.0};
    CurrentPath bwd = fwd;
    bwd.name = "bwd";
    bwd.current_ma = -240.0;
    std::vector<CurrentPath> both{fwd, bwd};
    const Vec3 b = field_at(both, Vec3{15, 25, 90});
    CHECK(norm(b) < 1e-15);
}

TEST_CASE("superposition over the fixture paths") {
    auto paths = load_fixture();
    auto at300 = scale_currents(paths, 300.0 / 500.0);
    const Vec3 p{0, 0, 100};
    Vec3 total = field_at(at300, p);
    Vec3 sum{};
    for (const auto& path : at300) sum += field_at(std::vector<CurrentPath>{path}, p);
    CHECK(norm(total - sum) <= 1e-12 * norm(total));
}

TEST_CASE("linearity in current") {
    auto paths = load_fixture();
    const Vec3 p{40, -80, 130};
    FieldOptions high;
    high.max_current_ma = 1000.0;
    const Vec3 b1 = field_at(paths, p, high);
    const Mat3 g1 = gradient_at(paths, p, high);
    auto doubled = scale_currents(paths, 2.0);
    const Vec3 b2 = field_at(doubled, p, high);
    const Mat3 g2 = gradient_at(doubled, p, high);
    CHECK(norm(b2 - b1 * 2.0) <= 1e-12 * norm(b2));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(g2[i][j] == doctest::Approx(2.0 * g1[i][j]).epsilon(1e-12));
}

TEST_CASE("long-wire radial gradient of the field magnitude") {
    // d = 1 mm from a 1 A wire: d|B|/dr = -mu0 I/(2 pi d^2) = -2 G/mm.
    CurrentPath wire{"w", {{0, -500000, 0}, {0, 500000, 0}}, 1000.0, 10.0};
    std::vector<CurrentPath> paths{wire};
    FieldOptions high;
    high.max_current_ma = 1000.0;
    const Mat3 g = gradient_at(paths, Vec3{1000, 0, 0}, high);
    // B = -|B(x)| zhat on the +x axis; d|B|/dx = -dBz/dx here.
    const double d_mag_dx = -g[2][0];
    CHECK(std::abs(d_mag_dx - (-2.0)) < 2e-3);
}

TEST_CASE("analytic gradient matches central finite differences on the fixture") {
    auto paths = load_fixture();
    const Vec3 p{0, 0, 100};
    const Mat3 analytic = gradient_at(paths, p);
    const Mat3 fd = oracles::gradient_fd(paths, p, 0.5);
    const double scale = max_abs_entry(analytic);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(analytic[i][j] - fd[i][j]) <= 1e-3 * scale);
}

TEST_CASE("Maxwell checks at 1000 random points") {
    auto paths = load_fixture();
    RandomStream rng(777);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 p = random_clear_point(rng, paths, 8.0);
        const Mat3 g = gradient_at(paths, p);
        const double scale = max_abs_entry(g);
        CHECK(std::abs(trace(g)) <= 1e-6 * scale);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                CHECK(std::abs(g[i][j] - g[j][i]) <= 1e-6 * scale);
    }
}

TEST_CASE("mirror-symmetric current distribution has no axial field on the plane") {
    // Rectangular loop symmetric under y -> -y; mirrored segments carry the
    // mirrored current.
    CurrentPath loop{"loop",
                     {{50, -200, 0}, {350, -200, 0}, {350, 200, 0}, {50, 200, 0}, {50, -200, 0}},
                     180.0,
                     10.0};
    std::vector<CurrentPath> paths{loop};
    RandomStream rng(5);
    for (int k = 0; k < 40; ++k) {
        const Vec3 p{rng.uniform() * 800 - 400, 0.0, 30 + rng.uniform() * 300};
        const Vec3 b = field_at(paths, p);
        CHECK(std::abs(b.y) <= 1e-12 * std::max(norm(b), 1e-6));
    }
}

TEST_CASE("power dissipation") {
    CHECK(power_dissipated(500.0, 0.2) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(power_dissipated(0.0, 0.2) == 0.0);
    CHECK(power_dissipated(300.0, 0.2) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK_THROWS_AS(power_dissipated(100.0, -0.1), std::domain_error);
}

TEST_CASE("site report") {
    const Vec3 center{0, 0, 100};
    const Vec3 bias{0, 0, 4};

    SUBCASE("zero current") {
        auto paths = load_fixture();
        auto zero = scale_currents(paths, 0.0);
        const SiteReport r = site_report(zero, center, bias, 0.2);
        CHECK(norm(r.residual_b) == 0.0);
        CHECK(norm(r.b_total - bias) == 0.0);
        CHECK(r.dbz_dy == 0.0);
        CHECK(r.power_mw == 0.0);
    }

    SUBCASE("fixture at 500 mA") {
        auto paths = load_fixture();
        const SiteReport r = site_report(paths, center, bias, 0.2);
        CHECK(r.dbz_dy >= 20.0);
        CHECK(norm(r.residual_b) * 1e3 <= 50.0);  // milligauss
        CHECK(r.power_mw == doctest::Approx(50.0).epsilon(1e-9));
    }

    SUBCASE("doubling currents doubles residual and gradient") {
        auto paths = load_fixture();
        FieldOptions high;
        high.max_current_ma = 1000.0;
        const SiteReport r1 = site_report(paths, center, bias, 0.2, high);
        const SiteReport r2 = site_report(scale_currents(paths, 2.0), center, bias, 0.2, high);
        CHECK(norm(r2.residual_b - r1.residual_b * 2.0) <= 1e-12 * norm(r2.residual_b));
        CHECK(r2.dbz_dy == doctest::Approx(2.0 * r1.dbz_dy).epsilon(1e-12));
    }
}

TEST_CASE("sample bundles field and gradient") {
    auto paths = load_fixture();
    const Vec3 p{10, 20, 120};
    const FieldSample s = sample(paths, p);
    CHECK(norm(s.b - field_at(paths, p)) == 0.0);
    CHECK(std::abs(trace(s.grad)) <= 1e-6 * max_abs_entry(s.grad));
}

TEST_CASE("width subdivision stays close to the filament limit") {
    auto paths = load_fixture();
    FieldOptions k7;
    k7.width_subdivisions = 7;
    const Vec3 p{0, 0, 100};
    const double g1 = gradient_at(paths, p)[2][1];
    const double g7 = gradient_at(paths, p, k7)[2][1];
    CHECK(std::abs(g7 - g1) / std::abs(g1) < 0.02);
}

TEST_CASE("path validation") {
    CHECK_THROWS_AS(validate_path({"p", {{0, 0, 0}}, 10.0, 10.0}), GeometryError);
    CHECK_THROWS_AS(validate_path({"p", {{0, 0, 0}, {0, 0, 0}}, 10.0, 10.0}), GeometryError);
    CHECK_THROWS_AS(validate_path({"p", {{0, 0, 0}, {1, 0, 0}}, 10.0, 0.0}), GeometryError);
    CHECK_THROWS_AS(validate_path({"p", {{0, 0, 0}, {1, 0, 0}}, 900.0, 10.0}), GeometryError);
    CHECK_NOTHROW(validate_path({"p", {{0, 0, 0}, {1, 0, 0}}, 400.0, 10.0}));
}

TEST_CASE("site report includes the field-magnitude derivative") {
    auto paths = load_fixture();
    const SiteReport r = site_report(paths, Vec3{0, 0, 100}, Vec3{0, 0, 4}, 0.2);
    // With the bias along z dominating, d|B|/dy approaches dBz/dy.
    CHECK(r.dabs_b_total_dy == doctest::Approx(r.dbz_dy).epsilon(0.01));
    // Finite-difference cross-check on |B_total|.
    const Vec3 bias{0, 0, 4};
    const double h = 0.5;
    const double bp = norm(field_at(paths, Vec3{0, h, 100}) + bias);
    const double bm = norm(field_at(paths, Vec3{0, -h, 100}) + bias);
    CHECK(r.dabs_b_total_dy == doctest::Approx((bp - bm) / (2.0 * h) * 1e3).epsilon(1e-3));
}
