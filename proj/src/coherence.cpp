#include "gradkit/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradkit/rng.hpp"

namespace gradkit::coherence {

namespace {

void validate_model(const NoiseModel& model) {
    if (model.sigma_khz < 0.0) throw std::domain_error("sigma must be nonnegative");
    if (model.kind == NoiseKind::ornstein_uhlenbeck && model.correlation_time_ms <= 0.0)
        throw std::domain_error("OU correlation time must be positive");
}

void check_dt(const NoiseModel& model, double dt_ms) {
    if (dt_ms <= 0.0) throw std::domain_error("dt must be positive");
    if (model.kind == NoiseKind::ornstein_uhlenbeck &&
        dt_ms > model.correlation_time_ms / 10.0 + 1e-15)
        throw std::domain_error("dt too coarse for OU noise: need dt <= correlation_time/10");
}

// Accumulated phase (in cycles, before the 2 pi) of one noise realization up
// to total_ms, with the sign toggled at the listed pulse times. The
// integration grid is uniform with step <= dt and contains every pulse time,
// so a symmetric echo refocuses quasi-static noise exactly.
double signed_phase_integral(const NoiseModel& model, double total_ms, double dt_ms,
                             const std::vector<double>& pulses_ms, RandomStream& rs) {
    if (model.kind == NoiseKind::quasi_static) {
        const double delta = model.sigma_khz * rs.gauss();
        double signed_time = 0.0;
        double prev = 0.0;
        double sign = 1.0;
        for (double tp : pulses_ms) {
            signed_time += sign * (tp - prev);
            prev = tp;
            sign = -sign;
        }
        signed_time += sign * (total_ms - prev);
        return delta * signed_time;
    }

    // OU: exact discretization x' = x e^(-h/tau) + sigma sqrt(1-e^(-2h/tau)) xi,
    // stationary start, trapezoidal phase accumulation between grid nodes.
    const double tau = model.correlation_time_ms;
    std::vector<double> nodes;
    const int n = std::max(1, static_cast<int>(std::ceil(total_ms / dt_ms - 1e-12)));
    nodes.reserve(n + pulses_ms.size() + 2);
    for (int i = 0; i <= n; ++i) nodes.push_back(total_ms * i / n);
    nodes.insert(nodes.end(), pulses_ms.begin(), pulses_ms.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                nodes.end());

    double x = model.sigma_khz * rs.gauss();
    double phase = 0.0;
    double sign = 1.0;
    std::size_t pulse_idx = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        while (pulse_idx < pulses_ms.size() && std::abs(pulses_ms[pulse_idx] - nodes[i]) < 1e-12) {
            sign = -sign;
            ++pulse_idx;
        }
        const double h = nodes[i + 1] - nodes[i];
        const double decay = std::exp(-h / tau);
        const double x_next =
            x * decay + model.sigma_khz * std::sqrt(1.0 - decay * decay) * rs.gauss();
        phase += sign * 0.5 * (x + x_next) * h;
        x = x_next;
    }
    return phase;
}

double ensemble_contrast(const NoiseModel& model, double total_ms, double dt_ms,
                         const std::vector<double>& pulses_ms, int trajectories,
                         std::uint64_t seed) {
    double sum_cos = 0.0, sum_sin = 0.0;
    for (int traj = 0; traj < trajectories; ++traj) {
        RandomStream rs(seed, static_cast<std::uint64_t>(traj));
        const double phi = 2.0 * M_PI * signed_phase_integral(model, total_ms, dt_ms, pulses_ms, rs);
        sum_cos += std::cos(phi);
        sum_sin += std::sin(phi);
    }
    const double n = static_cast<double>(trajectories);
    return std::sqrt(sum_cos * sum_cos + sum_sin * sum_sin) / n;
}

}  // namespace

PulseSchedule periodic_schedule(double first_ms, double every_ms, double total_ms) {
    if (first_ms <= 0.0 || every_ms <= 0.0) throw std::domain_error("pulse times must be positive");
    PulseSchedule s;
    s.total_time_ms = total_ms;
    for (double t = first_ms; t < total_ms; t += every_ms) s.pi_pulse_times_ms.push_back(t);
    return s;
}

void validate(const PulseSchedule& schedule) {
    if (schedule.total_time_ms <= 0.0) throw std::domain_error("total time must be positive");
    double prev = 0.0;
    for (double t : schedule.pi_pulse_times_ms) {
        if (t <= prev || t >= schedule.total_time_ms)
            throw std::domain_error("pi pulse times must be strictly increasing inside (0, total)");
        prev = t;
    }
}

std::vector<double> sample_detuning(const NoiseModel& model, double duration_ms, double dt_ms,
                                    std::uint64_t seed) {
    validate_model(model);
    check_dt(model, dt_ms);
    if (duration_ms <= 0.0) throw std::domain_error("duration must be positive");
    const int n = std::max(1, static_cast<int>(std::ceil(duration_ms / dt_ms - 1e-12)));
    std::vector<double> traj(n + 1);
    RandomStream rs(seed, 0);
    if (model.kind == NoiseKind::quasi_static) {
        const double delta = model.sigma_khz * rs.gauss();
        std::fill(traj.begin(), traj.end(), delta);
        return traj;
    }
    const double h = duration_ms / n;
    const double decay = std::exp(-h / model.correlation_time_ms);
    const double kick = model.sigma_khz * std::sqrt(1.0 - decay * decay);
    traj[0] = model.sigma_khz * rs.gauss();
    for (int i = 1; i <= n; ++i) traj[i] = traj[i - 1] * decay + kick * rs.gauss();
    return traj;
}

std::vector<ContrastPoint> ramsey_contrast(const NoiseModel& model,
                                           const std::vector<double>& delays_ms, int trajectories,
                                           std::uint64_t seed, double dt_ms) {
    validate_model(model);
    check_dt(model, dt_ms);
    if (trajectories < 100) throw std::domain_error("need at least 100 trajectories");
    std::vector<ContrastPoint> out;
    out.reserve(delays_ms.size());
    for (double delay : delays_ms) {
        if (delay < 0.0) throw std::domain_error("delays must be nonnegative");
        ContrastPoint pt;
        pt.delay_ms = delay;
        pt.contrast =
            delay == 0.0 ? 1.0 : ensemble_contrast(model, delay, dt_ms, {}, trajectories, seed);
        out.push_back(pt);
    }
    return out;
}

double echo_contrast(const NoiseModel& model, const PulseSchedule& schedule, int trajectories,
                     std::uint64_t seed, double dt_ms) {
    validate_model(model);
    check_dt(model, dt_ms);
    validate(schedule);
    if (trajectories < 100) throw std::domain_error("need at least 100 trajectories");
    return ensemble_contrast(model, schedule.total_time_ms, dt_ms, schedule.pi_pulse_times_ms,
                             trajectories, seed);
}

double calibrate_sigma_khz(double t2_star_us) {
    if (t2_star_us <= 0.0) throw std::domain_error("T2* must be positive");
    return std::sqrt(2.0) / (2.0 * M_PI * t2_star_us * 1e-3);
}

}  // namespace gradkit::coherence
