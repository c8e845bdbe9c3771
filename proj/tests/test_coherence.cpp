#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradkit/coherence.hpp"
#include "gradkit/spectra.hpp"

using namespace gradkit;
using namespace gradkit::coherence;

TEST_CASE("calibrate_sigma closed form") {
    CHECK(calibrate_sigma_khz(632.0) == doctest::Approx(0.356).epsilon(2e-3));
    CHECK(calibrate_sigma_khz(424.0) == doctest::Approx(0.531).epsilon(2e-3));
    CHECK(calibrate_sigma_khz(1e9) < 1e-6);
    CHECK_THROWS_AS(calibrate_sigma_khz(0.0), std::domain_error);
}

TEST_CASE("sample_detuning") {
    SUBCASE("zero sigma is identically zero") {
        NoiseModel m{NoiseKind::quasi_static, 0.0, 1.0};
        for (double v : sample_detuning(m, 2.0, 0.01, 3)) CHECK(v == 0.0);
    }
    SUBCASE("quasi-static draws are constant in time") {
        NoiseModel m{NoiseKind::quasi_static, 0.5, 1.0};
        const auto traj = sample_detuning(m, 1.0, 0.01, 7);
        for (double v : traj) CHECK(v == doctest::Approx(traj[0]).epsilon(1e-15));
        CHECK(traj[0] != 0.0);
    }
    SUBCASE("OU rejects too-coarse steps") {
        NoiseModel m{NoiseKind::ornstein_uhlenbeck, 0.5, 1.0};
        CHECK_THROWS_AS(sample_detuning(m, 5.0, 0.5, 1), std::domain_error);
    }
    SUBCASE("OU autocorrelation matches exp(-k dt/tau)") {
        NoiseModel m{NoiseKind::ornstein_uhlenbeck, 1.0, 5.0};
        const double dt = 0.05;
        const auto traj = sample_detuning(m, 100000 * dt, dt, 11);
        const int n = static_cast<int>(traj.size());
        double mean = 0.0;
        for (double v : traj) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : traj) var += (v - mean) * (v - mean);
        var /= n;
        CHECK(std::abs(var - 1.0) < 0.25);
        for (int lag : {1, 5, 20, 60}) {
            double acf = 0.0;
            for (int i = 0; i + lag < n; ++i) acf += (traj[i] - mean) * (traj[i + lag] - mean);
            acf /= (n - lag) * var;
            const double expected = std::exp(-lag * dt / m.correlation_time_ms);
            // 5 sigma band for an AR(1) autocorrelation estimate
            const double se = std::sqrt((1.0 - expected * expected) / (n - lag)) *
                              std::sqrt((1.0 + expected) / (1.0 - expected));
            CHECK(std::abs(acf - expected) <= 5.0 * se);
        }
    }
}

TEST_CASE("ramsey contrast") {
    SUBCASE("no noise keeps full contrast") {
        NoiseModel m{NoiseKind::quasi_static, 0.0, 1.0};
        for (const auto& pt : ramsey_contrast(m, {0.1, 0.4, 1.0}, 200, 1))
            CHECK(pt.contrast == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("quasi-static decay matches the analytic Gaussian") {
        const double sigma = calibrate_sigma_khz(632.0);
        NoiseModel m{NoiseKind::quasi_static, sigma, 1.0};
        std::vector<double> delays{0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0};
        const auto pts = ramsey_contrast(m, delays, 10000, 99);
        for (const auto& pt : pts) {
            const double analytic = std::exp(-std::pow(pt.delay_ms / 0.632, 2.0));
            CHECK(std::abs(pt.contrast - analytic) < 0.02);
        }
    }
    SUBCASE("contrast is non-increasing in sigma") {
        double prev = 1.0;
        for (double sigma : {0.1, 0.3, 0.6, 1.0}) {
            NoiseModel m{NoiseKind::quasi_static, sigma, 1.0};
            const double c = ramsey_contrast(m, {0.5}, 4000, 12)[0].contrast;
            CHECK(c <= prev + 0.03);
            prev = c;
        }
    }
    SUBCASE("trajectory floor enforced") {
        NoiseModel m{NoiseKind::quasi_static, 0.3, 1.0};
        CHECK_THROWS_AS(ramsey_contrast(m, {0.5}, 50, 1), std::domain_error);
    }
}

TEST_CASE("echo contrast") {
    SUBCASE("symmetric single echo refocuses quasi-static noise exactly") {
        NoiseModel m{NoiseKind::quasi_static, 0.8, 1.0};
        PulseSchedule s;
        s.total_time_ms = 4.0;
        s.pi_pulse_times_ms = {2.0};
        const double c = echo_contrast(m, s, 500, 21);
        CHECK(c >= 0.99);
        CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("zero sigma gives unit contrast") {
        NoiseModel m{NoiseKind::ornstein_uhlenbeck, 0.0, 10.0};
        const double c = echo_contrast(m, periodic_schedule(0.5, 1.0, 6.0), 200, 3);
        CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("echo beats free decay under quasi-static noise") {
        NoiseModel m{NoiseKind::quasi_static, 0.5, 1.0};
        for (double total : {1.0, 2.0, 5.0}) {
            const double ram = ramsey_contrast(m, {total}, 3000, 5)[0].contrast;
            PulseSchedule s;
            s.total_time_ms = total;
            s.pi_pulse_times_ms = {total / 2.0};
            CHECK(echo_contrast(m, s, 3000, 5) >= ram - 0.02);
        }
    }
    SUBCASE("schedule validation") {
        NoiseModel m{NoiseKind::quasi_static, 0.1, 1.0};
        PulseSchedule bad;
        bad.total_time_ms = 1.0;
        bad.pi_pulse_times_ms = {0.6, 0.4};
        CHECK_THROWS_AS(echo_contrast(m, bad, 200, 1), std::domain_error);
        bad.pi_pulse_times_ms = {1.5};
        CHECK_THROWS_AS(echo_contrast(m, bad, 200, 1), std::domain_error);
    }
}

TEST_CASE("periodic schedule helper") {
    const PulseSchedule s = periodic_schedule(0.5, 1.0, 4.0);
    REQUIRE(s.pi_pulse_times_ms.size() == 4);
    CHECK(s.pi_pulse_times_ms[0] == doctest::Approx(0.5));
    CHECK(s.pi_pulse_times_ms[3] == doctest::Approx(3.5));
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("determinism and partition independence") {
    NoiseModel m{NoiseKind::ornstein_uhlenbeck, 0.5, 10.0};
    const auto a = ramsey_contrast(m, {1.0, 3.0}, 2500, 404);
    const auto b = ramsey_contrast(m, {1.0, 3.0}, 2500, 404);
    CHECK(a[0].contrast == b[0].contrast);
    CHECK(a[1].contrast == b[1].contrast);

    // Per-trajectory seed streams: the one-delay call sees the same
    // trajectories as the two-delay call, so results agree bit-for-bit.
    const auto c = ramsey_contrast(m, {3.0}, 2500, 404);
    CHECK(c[0].contrast == a[1].contrast);
}

TEST_CASE("OU echo under the periodic schedule lands near the target band") {
    // Calibration used for the acceptance run: sigma from T2* = 424 us at the
    // operating current, correlation time 10 ms.
    NoiseModel m{NoiseKind::ornstein_uhlenbeck, calibrate_sigma_khz(424.0), 10.0};
    std::vector<spectra::DecayPoint> pts;
    for (double total : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        const double c = echo_contrast(m, periodic_schedule(0.5, 1.0, total), 2000, 17);
        pts.push_back({total * 1e3, c});
    }
    const auto fit = spectra::fit_decay(pts, spectra::DecayModel::exponential);
    CHECK(fit.time_constant_us / 1e3 >= 5.0);
    CHECK(fit.time_constant_us / 1e3 <= 20.0);
}
