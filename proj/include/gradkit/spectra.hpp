#ifndef GRADKIT_SPECTRA_HPP
#define GRADKIT_SPECTRA_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gradkit::spectra {

struct ScanPoint {
    double frequency_offset_khz = 0.0;
    long successes = 0;
    long trials = 100;
};

struct FlopPoint {
    double time_us = 0.0;
    long successes = 0;
    long trials = 100;
};

struct DecayPoint {
    double time_us = 0.0;
    double contrast = 0.0;
};

struct Peak {
    double center_khz = 0.0;
    double amplitude = 0.0;  // in [0, 1]
};

// Sum of sin^2-modulated Lorentzian-envelope peaks: the Rabi resonance
// transition probability for a fixed-length probe pulse.
struct SpectrumModelParams {
    std::vector<Peak> peaks;  // sorted by center
    double rabi_khz = 0.0;
    double pulse_us = 50.0;
};

struct FlopParams {
    double rabi_khz = 0.0;
    double envelope_hwhm_us = 0.0;  // Gaussian envelope half width at half maximum
    double contrast = 0.0;          // initial contrast in [0, 1]
    double offset = 0.0;            // baseline probability
};

enum class DecayModel { gaussian, exponential };

struct SpectrumFitResult {
    SpectrumModelParams params;
    Eigen::MatrixXd covariance;  // parameter order: rabi, centers..., amplitudes...
    std::map<std::string, double> derived;
    double chi2_per_dof = 0.0;
    bool degenerate = false;
};

struct FlopFitResult {
    FlopParams params;
    FlopParams sigmas;  // 1-sigma standard errors, same fields
    Eigen::MatrixXd covariance;  // order: rabi, hwhm, contrast, offset
    std::map<std::string, double> derived;
    double chi2_per_dof = 0.0;
    bool degenerate = false;
};

struct DecayFitResult {
    double c0 = 0.0;
    double time_constant_us = 0.0;
    double c0_sigma = 0.0;
    double time_constant_sigma_us = 0.0;
    Eigen::MatrixXd covariance;
    double chi2_per_dof = 0.0;
    bool degenerate = false;
};

double model_spectrum(const SpectrumModelParams& params, double f_khz);
double flop_probability(const FlopParams& flop, double t_us);

std::vector<ScanPoint> simulate_scan(const SpectrumModelParams& params,
                                     const std::vector<double>& grid_khz, long trials,
                                     std::uint64_t seed);
std::vector<FlopPoint> simulate_flop(const FlopParams& flop, const std::vector<double>& times_us,
                                     long trials, std::uint64_t seed);

SpectrumFitResult fit_spectrum(const std::vector<ScanPoint>& data, int n_peaks,
                               std::optional<SpectrumModelParams> init = std::nullopt,
                               double pulse_us = 50.0);
FlopFitResult fit_flop(const std::vector<FlopPoint>& data);
DecayFitResult fit_decay(const std::vector<DecayPoint>& data, DecayModel model);

// Binomial standard error with the small-count floor 1/(trials + 2).
double binomial_sigma(long successes, long trials);

// CSV formats: scan 'freq_offset_khz,successes,trials',
// flop 'time_us,successes,trials', decay 'time_us,contrast'.
void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& data);
std::vector<ScanPoint> read_scan_csv(std::istream& in);
void write_flop_csv(std::ostream& out, const std::vector<FlopPoint>& data);
std::vector<FlopPoint> read_flop_csv(std::istream& in);
void write_decay_csv(std::ostream& out, const std::vector<DecayPoint>& data);
std::vector<DecayPoint> read_decay_csv(std::istream& in);

}  // namespace gradkit::spectra

#endif
