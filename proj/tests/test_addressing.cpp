#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradkit/addressing.hpp"
#include "gradkit/rng.hpp"
#include "oracles.hpp"

using namespace gradkit;
using namespace gradkit::addressing;

TEST_CASE("zeeman shift") {
    CHECK(zeeman_shift_khz(1.0) == doctest::Approx(2799.2).epsilon(2e-4));
    CHECK(zeeman_shift_khz(0.0) == 0.0);
    CHECK(zeeman_shift_khz(0.010) == doctest::Approx(28.0).epsilon(1e-2));
    CHECK(zeeman_shift_khz(-0.5) == doctest::Approx(-zeeman_shift_khz(0.5)).epsilon(1e-12));
}

TEST_CASE("qubit frequency splitting") {
    CHECK(splitting_khz(4.81, 23.0) == doctest::Approx(309.7).epsilon(1e-3));
    CHECK(splitting_khz(7.0, 0.0) == 0.0);
    CHECK(splitting_khz(4.81, 14.0) == doctest::Approx(188.5).epsilon(1e-3));
    CHECK(splitting_khz(4.11, 23.0) == doctest::Approx(264.7).epsilon(2e-3));
    CHECK_THROWS_AS(splitting_khz(0.0, 10.0), std::domain_error);
}

TEST_CASE("splitting is bilinear") {
    const double base = splitting_khz(3.7, 11.0);
    CHECK(splitting_khz(7.4, 11.0) == doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK(splitting_khz(3.7, 33.0) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("required gradient") {
    CHECK(required_gradient_g_per_mm(5.0, 100.0, 1.0) == doctest::Approx(7.15).epsilon(2e-3));
    CHECK(required_gradient_g_per_mm(5.0, 100.0, 10.0) ==
          doctest::Approx(10.0 * required_gradient_g_per_mm(5.0, 100.0, 1.0)).epsilon(1e-12));
    CHECK(required_gradient_g_per_mm(4.8, 35.0, 1.0) == doctest::Approx(2.60).epsilon(3e-3));
    CHECK_THROWS_AS(required_gradient_g_per_mm(5.0, 100.0, 0.5), std::domain_error);
    // consistency: splitting at the required gradient equals margin x rabi
    const double g = required_gradient_g_per_mm(5.2, 80.0, 3.0);
    CHECK(splitting_khz(5.2, g) == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("excitation probability closed form") {
    SUBCASE("resonant pi pulse") {
        const double t_pi = 1e3 / (2.0 * 35.0);
        CHECK(excitation_probability(35.0, 0.0, t_pi) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero duration") { CHECK(excitation_probability(20.0, 50.0, 0.0) == 0.0); }
    SUBCASE("matches the two-level ODE oracle at the reference operating point") {
        const double p = excitation_probability(34.0, 188.5, 14.71);
        CHECK(p == doctest::Approx(0.0093).epsilon(0.02));
        const double ode = oracles::two_level_excitation_rk4(34.0, 188.5, 14.71);
        CHECK(std::abs(p - ode) < 1e-6);
    }
    SUBCASE("matches the ODE oracle over 100 random operating points") {
        RandomStream rng(8);
        for (int k = 0; k < 100; ++k) {
            const double rabi = 5.0 + rng.uniform() * 80.0;
            const double det = (rng.uniform() - 0.5) * 400.0;
            const double t = rng.uniform() * 120.0;
            const double p = excitation_probability(rabi, det, t);
            const double ode = oracles::two_level_excitation_rk4(rabi, det, t);
            CHECK(std::abs(p - ode) < 1e-6);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("envelope bounds and monotonicity") {
    const double rabi = 25.0;
    double prev = 1.1;
    for (double det : {0.0, 20.0, 60.0, 120.0, 260.0, 600.0}) {
        const double env = rabi * rabi / (rabi * rabi + det * det);
        CHECK(env < prev);
        prev = env;
        RandomStream rng(17);
        for (int k = 0; k < 20; ++k) {
            const double t = rng.uniform() * 200.0;
            CHECK(excitation_probability(rabi, det, t) <= env + 1e-12);
        }
    }
}

TEST_CASE("crosstalk at the pi time") {
    SUBCASE("34 kHz Rabi at 188.5 kHz splitting") {
        const Crosstalk c = crosstalk_at_pi(34.0, 188.5);
        CHECK(c.envelope == doctest::Approx(0.0315).epsilon(2e-3));
        CHECK(c.instantaneous == doctest::Approx(0.0093).epsilon(0.02));
        CHECK(c.time_averaged == doctest::Approx(c.envelope / 2.0).epsilon(1e-12));
        CHECK(c.instantaneous <= 0.028);  // fitted experimental bound
    }
    SUBCASE("35 kHz at 190 kHz sits in the measured band") {
        const Crosstalk c = crosstalk_at_pi(35.0, 190.0);
        CHECK(c.instantaneous == doctest::Approx(0.0153).epsilon(0.02));
        const bool in_band = (c.instantaneous >= 0.012 && c.instantaneous <= 0.032) ||
                             (c.time_averaged >= 0.012 && c.time_averaged <= 0.032);
        CHECK(in_band);
    }
    SUBCASE("large splitting suppresses everything") {
        const Crosstalk c = crosstalk_at_pi(30.0, 3.0e5);
        CHECK(c.envelope < 1e-7);
        CHECK(c.instantaneous < 1e-7);
        CHECK(c.time_averaged < 1e-7);
    }
    SUBCASE("instantaneous never exceeds the envelope") {
        RandomStream rng(4);
        for (int k = 0; k < 50; ++k) {
            const Crosstalk c = crosstalk_at_pi(5.0 + rng.uniform() * 60.0,
                                                5.0 + rng.uniform() * 400.0);
            CHECK(c.instantaneous <= c.envelope + 1e-12);
        }
    }
}

TEST_CASE("lande-factor constructor") {
    // S1/2 m=-1/2 (g=2) -> D5/2 m=-5/2 (g=6/5): |g_D m_D - g_S m_S| = |-3 + 1| = 2.
    const QubitConstants qc = QubitConstants::from_lande_factors(2.0, -0.5, 1.2, -2.5);
    CHECK(qc.delta_g == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("address map") {
    ionchain::ChainSolution chain;
    chain.positions_um = {-2.405, 2.405};
    chain.secular_freq_khz = 847.0;

    magnetostatics::SiteReport site;
    site.dbz_dy = 23.0;
    site.residual_b = {0.0, 0.0, 0.0};

    SUBCASE("two ions split by the formula") {
        const AddressMap map = build_address_map(chain, site, 34.0);
        REQUIRE(map.entries.size() == 2);
        const double diff = map.entries[1].frequency_offset_khz - map.entries[0].frequency_offset_khz;
        CHECK(diff == doctest::Approx(splitting_khz(4.81, 23.0)).epsilon(1e-9));
        CHECK(map.center_shift_khz == 0.0);
    }

    SUBCASE("zero gradient and residual give zero offsets") {
        site.dbz_dy = 0.0;
        const AddressMap map = build_address_map(chain, site, 34.0);
        for (const auto& e : map.entries) CHECK(e.frequency_offset_khz == 0.0);
    }

    SUBCASE("residual bias shifts the center") {
        site.residual_b = {0.0, 0.0, 0.010};
        const AddressMap map = build_address_map(chain, site, 34.0);
        CHECK(map.center_shift_khz == doctest::Approx(28.0).epsilon(1e-2));
        const double mean = 0.5 * (map.entries[0].frequency_offset_khz +
                                   map.entries[1].frequency_offset_khz);
        CHECK(mean == doctest::Approx(map.center_shift_khz).epsilon(1e-9));
    }

    SUBCASE("uniform gradient gives equal adjacent differences") {
        ionchain::ChainSolution three;
        three.positions_um = {-4.116, 0.0, 4.116};
        const AddressMap map = build_address_map(three, site, 34.0);
        const double d1 = map.entries[1].frequency_offset_khz - map.entries[0].frequency_offset_khz;
        const double d2 = map.entries[2].frequency_offset_khz - map.entries[1].frequency_offset_khz;
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
    }

    SUBCASE("extreme ions carry the extreme offsets") {
        ionchain::ChainSolution five;
        five.positions_um = {-9.1, -4.2, 0.0, 4.2, 9.1};
        const AddressMap map = build_address_map(five, site, 34.0);
        for (std::size_t i = 1; i < map.entries.size(); ++i)
            CHECK(map.entries[i].frequency_offset_khz > map.entries[i - 1].frequency_offset_khz);
    }
}
