#ifndef GRADKIT_COHERENCE_HPP
#define GRADKIT_COHERENCE_HPP

#include <cstdint>
#include <vector>

namespace gradkit::coherence {

enum class NoiseKind { quasi_static, ornstein_uhlenbeck };

// Stochastic qubit detuning process. sigma is the stationary standard
// deviation in kHz; correlation_time_ms applies to the OU kind only.
struct NoiseModel {
    NoiseKind kind = NoiseKind::quasi_static;
    double sigma_khz = 0.0;
    double correlation_time_ms = 1.0;
};

struct PulseSchedule {
    std::vector<double> pi_pulse_times_ms;  // strictly increasing, inside (0, total)
    double total_time_ms = 0.0;
};

// pi pulses at first_ms, first_ms + every_ms, ... below total_ms.
PulseSchedule periodic_schedule(double first_ms, double every_ms, double total_ms);

void validate(const PulseSchedule& schedule);

// One noise realization sampled on a uniform grid of step dt (duration/dt
// steps, endpoint included). OU requires dt <= correlation_time / 10.
std::vector<double> sample_detuning(const NoiseModel& model, double duration_ms, double dt_ms,
                                    std::uint64_t seed);

struct ContrastPoint {
    double delay_ms = 0.0;
    double contrast = 0.0;
};

// Ramsey fringe contrast |<exp(i 2 pi Int delta f dt)>| over the ensemble,
// with instantaneous pi/2 pulses.
std::vector<ContrastPoint> ramsey_contrast(const NoiseModel& model,
                                           const std::vector<double>& delays_ms, int trajectories,
                                           std::uint64_t seed, double dt_ms = 0.01);

// Spin-echo contrast at schedule.total_time_ms; the accumulated phase sign
// toggles at every pi pulse.
double echo_contrast(const NoiseModel& model, const PulseSchedule& schedule, int trajectories,
                     std::uint64_t seed, double dt_ms = 0.01);

// Quasi-static sigma that produces a Gaussian Ramsey decay exp(-(T/T2*)^2):
// sigma = sqrt(2) / (2 pi T2*).
double calibrate_sigma_khz(double t2_star_us);

}  // namespace gradkit::coherence

#endif
