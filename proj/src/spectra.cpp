#include "gradkit/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gradkit/addressing.hpp"
#include "gradkit/fitting.hpp"
#include "gradkit/rng.hpp"

namespace gradkit::spectra {

namespace {

constexpr double kModelClip = 1e-9;  // keeps weighted residuals finite at 0/1

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n, 0.0);
    const int half = window / 2;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        int cnt = 0;
        for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
            s += v[j];
            ++cnt;
        }
        out[i] = s / cnt;
    }
    return out;
}

}  // namespace

double binomial_sigma(long successes, long trials) {
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return std::max(se, 1.0 / static_cast<double>(trials + 2));
}

double model_spectrum(const SpectrumModelParams& params, double f_khz) {
    double p = 0.0;
    for (const Peak& pk : params.peaks)
        p += pk.amplitude * addressing::excitation_probability(
                                params.rabi_khz, f_khz - pk.center_khz, params.pulse_us);
    return clip01(p);
}

double flop_probability(const FlopParams& flop, double t_us) {
    const double s = std::sin(M_PI * flop.rabi_khz * t_us * 1e-3);
    const double env = std::exp(-M_LN2 * (t_us / flop.envelope_hwhm_us) *
                                (t_us / flop.envelope_hwhm_us));
    return clip01(flop.offset + flop.contrast * env * s * s);
}

std::vector<ScanPoint> simulate_scan(const SpectrumModelParams& params,
                                     const std::vector<double>& grid_khz, long trials,
                                     std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    std::vector<ScanPoint> out;
    out.reserve(grid_khz.size());
    for (std::size_t i = 0; i < grid_khz.size(); ++i) {
        RandomStream rs(seed, i);
        ScanPoint pt;
        pt.frequency_offset_khz = grid_khz[i];
        pt.trials = trials;
        pt.successes = rs.binomial(trials, model_spectrum(params, grid_khz[i]));
        out.push_back(pt);
    }
    return out;
}

std::vector<FlopPoint> simulate_flop(const FlopParams& flop, const std::vector<double>& times_us,
                                     long trials, std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    std::vector<FlopPoint> out;
    out.reserve(times_us.size());
    for (std::size_t i = 0; i < times_us.size(); ++i) {
        RandomStream rs(seed, i);
        FlopPoint pt;
        pt.time_us = times_us[i];
        pt.trials = trials;
        pt.successes = rs.binomial(trials, flop_probability(flop, times_us[i]));
        out.push_back(pt);
    }
    return out;
}

namespace {

SpectrumModelParams unpack_spectrum(const Eigen::VectorXd& th, int n_peaks, double pulse_us) {
    SpectrumModelParams p;
    p.rabi_khz = th[0];
    p.pulse_us = pulse_us;
    p.peaks.resize(n_peaks);
    for (int k = 0; k < n_peaks; ++k) {
        p.peaks[k].center_khz = th[1 + k];
        p.peaks[k].amplitude = th[1 + n_peaks + k];
    }
    return p;
}

SpectrumModelParams auto_seed_peaks(const std::vector<ScanPoint>& data, int n_peaks,
                                    double pulse_us) {
    std::vector<double> p(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        p[i] = static_cast<double>(data[i].successes) / data[i].trials;
    const std::vector<double> sm = moving_average(p, 5);

    // Local maxima of the smoothed trace, ranked by height, ties to lower frequency.
    std::vector<int> candidates;
    for (int i = 1; i + 1 < static_cast<int>(sm.size()); ++i)
        if (sm[i] > sm[i - 1] && sm[i] >= sm[i + 1]) candidates.push_back(i);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return sm[a] > sm[b]; });
    if (static_cast<int>(candidates.size()) < n_peaks) {
        // Degenerate data; fall back to the n_peaks tallest raw points.
        candidates.resize(0);
        std::vector<int> idx(sm.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return sm[a] > sm[b]; });
        for (int i = 0; i < n_peaks; ++i) candidates.push_back(idx[i]);
    }
    candidates.resize(n_peaks);
    std::sort(candidates.begin(), candidates.end());

    SpectrumModelParams init;
    init.pulse_us = pulse_us;
    init.rabi_khz = 1e3 / (2.0 * pulse_us);  // pi-pulse guess for the probe length
    for (int c : candidates)
        init.peaks.push_back({data[c].frequency_offset_khz, std::clamp(sm[c], 0.05, 1.0)});
    return init;
}

}  // namespace

SpectrumFitResult fit_spectrum(const std::vector<ScanPoint>& data, int n_peaks,
                               std::optional<SpectrumModelParams> init, double pulse_us) {
    if (n_peaks < 1) throw std::domain_error("need at least one peak");
    const int n_params = 2 * n_peaks + 1;
    if (static_cast<int>(data.size()) < 5 * n_params)
        throw std::domain_error("need at least 5 data points per parameter");

    SpectrumModelParams start = init ? *init : auto_seed_peaks(data, n_peaks, pulse_us);
    if (init) pulse_us = start.pulse_us;
    Eigen::VectorXd th(n_params);
    th[0] = start.rabi_khz;
    for (int k = 0; k < n_peaks; ++k) {
        th[1 + k] = start.peaks[k].center_khz;
        th[1 + n_peaks + k] = start.peaks[k].amplitude;
    }

    // Binomial weights: start from the data-based standard errors, then one
    // reweighting pass with errors taken from the fitted model, which removes
    // the overweighting of saturated points (successes 0 or trials).
    std::vector<double> sigma(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        sigma[i] = binomial_sigma(data[i].successes, data[i].trials);

    auto residuals = [&](const Eigen::VectorXd& v) {
        const SpectrumModelParams mp = unpack_spectrum(v, n_peaks, pulse_us);
        Eigen::VectorXd r(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double m = std::clamp(model_spectrum(mp, data[i].frequency_offset_khz),
                                        kModelClip, 1.0 - kModelClip);
            const double y = static_cast<double>(data[i].successes) / data[i].trials;
            r[i] = (m - y) / sigma[i];
        }
        return r;
    };

    fitting::FitOutcome fo = fitting::levenberg_marquardt(residuals, th);
    {
        const SpectrumModelParams mp = unpack_spectrum(fo.params, n_peaks, pulse_us);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double m = std::clamp(model_spectrum(mp, data[i].frequency_offset_khz),
                                        kModelClip, 1.0 - kModelClip);
            sigma[i] = std::max(std::sqrt(m * (1.0 - m) / data[i].trials),
                                1.0 / static_cast<double>(data[i].trials + 2));
        }
        fo = fitting::levenberg_marquardt(residuals, fo.params);
    }

    // Sort peaks by center and permute the covariance to match.
    std::vector<int> order(n_peaks);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fo.params[1 + a] < fo.params[1 + b]; });
    Eigen::VectorXd sorted = fo.params;
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(n_params, n_params);
    perm(0, 0) = 1.0;
    for (int k = 0; k < n_peaks; ++k) {
        sorted[1 + k] = fo.params[1 + order[k]];
        sorted[1 + n_peaks + k] = fo.params[1 + n_peaks + order[k]];
        perm(1 + k, 1 + order[k]) = 1.0;
        perm(1 + n_peaks + k, 1 + n_peaks + order[k]) = 1.0;
    }

    SpectrumFitResult res;
    res.params = unpack_spectrum(sorted, n_peaks, pulse_us);
    res.degenerate = fo.degenerate;
    res.covariance = fo.covariance;
    if (!fo.degenerate) res.covariance = perm * fo.covariance * perm.transpose();
    res.chi2_per_dof = fo.dof > 0 ? fo.chi2 / fo.dof : 0.0;

    if (n_peaks >= 2 && !fo.degenerate) {
        const double span =
            res.params.peaks.back().center_khz - res.params.peaks.front().center_khz;
        const double mean_split = span / (n_peaks - 1);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n_params);
        g[1] = -1.0 / (n_peaks - 1);
        g[1 + n_peaks - 1] = 1.0 / (n_peaks - 1);
        const double var = g.transpose() * res.covariance * g;
        res.derived["mean_adjacent_splitting_khz"] = mean_split;
        res.derived["mean_adjacent_splitting_sigma_khz"] = std::sqrt(std::max(var, 0.0));
    }
    res.derived["rabi_sigma_khz"] =
        fo.degenerate ? 0.0 : std::sqrt(std::max(res.covariance(0, 0), 0.0));
    return res;
}

FlopFitResult fit_flop(const std::vector<FlopPoint>& data) {
    if (data.size() < 20) throw std::domain_error("need at least 20 flop points");
    std::vector<double> p(data.size());
    double tmax = 0.0, pmin = 1.0, pmax = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        p[i] = static_cast<double>(data[i].successes) / data[i].trials;
        tmax = std::max(tmax, data[i].time_us);
        pmin = std::min(pmin, p[i]);
        pmax = std::max(pmax, p[i]);
    }

    // Initial Rabi frequency from the dominant discrete-spectrum bin. The
    // population oscillates at the Rabi frequency itself (sin^2 doubling and
    // the cycles convention cancel).
    const int n = static_cast<int>(data.size());
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / n;
    double best_mag = -1.0;
    double rabi0 = 1.0;
    for (int k = 1; k <= n / 2; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            const double ph = -2.0 * M_PI * k * j / n;
            acc += (p[j] - mean) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            rabi0 = static_cast<double>(k) / (tmax * 1e-3);  // bin k -> k/(N dt) in kHz
        }
    }
    const double periods = rabi0 * tmax * 1e-3;
    if (periods < 3.0) throw std::domain_error("flop data must span at least 3 periods");

    std::vector<double> sigma(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        sigma[i] = binomial_sigma(data[i].successes, data[i].trials);

    auto residuals = [&](const Eigen::VectorXd& v) {
        FlopParams fp{v[0], v[1], v[2], v[3]};
        Eigen::VectorXd r(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double m =
                std::clamp(flop_probability(fp, data[i].time_us), kModelClip, 1.0 - kModelClip);
            r[i] = (m - p[i]) / sigma[i];
        }
        return r;
    };

    Eigen::VectorXd th(4);
    th << rabi0, tmax / 2.0, std::max(pmax - pmin, 0.1), pmin;
    fitting::FitOutcome fo = fitting::levenberg_marquardt(residuals, th);
    {
        // Model-based reweighting pass; see fit_spectrum.
        const FlopParams fp{fo.params[0], std::abs(fo.params[1]), fo.params[2], fo.params[3]};
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double m =
                std::clamp(flop_probability(fp, data[i].time_us), kModelClip, 1.0 - kModelClip);
            sigma[i] = std::max(std::sqrt(m * (1.0 - m) / data[i].trials),
                                1.0 / static_cast<double>(data[i].trials + 2));
        }
        fo = fitting::levenberg_marquardt(residuals, fo.params);
    }

    FlopFitResult res;
    res.params = {fo.params[0], std::abs(fo.params[1]), fo.params[2], fo.params[3]};
    res.covariance = fo.covariance;
    res.degenerate = fo.degenerate;
    res.chi2_per_dof = fo.dof > 0 ? fo.chi2 / fo.dof : 0.0;
    if (!fo.degenerate) {
        res.sigmas = {std::sqrt(std::max(fo.covariance(0, 0), 0.0)),
                      std::sqrt(std::max(fo.covariance(1, 1), 0.0)),
                      std::sqrt(std::max(fo.covariance(2, 2), 0.0)),
                      std::sqrt(std::max(fo.covariance(3, 3), 0.0))};
    }
    res.derived["periods_spanned"] = res.params.rabi_khz * tmax * 1e-3;
    return res;
}

DecayFitResult fit_decay(const std::vector<DecayPoint>& data, DecayModel model) {
    if (data.size() < 5) throw std::domain_error("need at least 5 decay points");
    for (const DecayPoint& d : data)
        if (d.contrast < 0.0 || d.contrast > 1.0)
            throw std::domain_error("contrast values must lie in [0, 1]");

    // Log-linear seed using points above 5% contrast.
    double c0_guess = 0.0, tmax = 0.0;
    for (const DecayPoint& d : data) {
        c0_guess = std::max(c0_guess, d.contrast);
        tmax = std::max(tmax, d.time_us);
    }
    if (c0_guess <= 0.0) throw std::domain_error("all-zero contrast data");
    double sxx = 0.0, sxy = 0.0;
    for (const DecayPoint& d : data) {
        if (d.contrast < 0.05 * c0_guess) continue;
        const double x = (model == DecayModel::gaussian) ? d.time_us * d.time_us : d.time_us;
        const double y = std::log(d.contrast / c0_guess);
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (sxx > 0.0) ? sxy / sxx : -1.0 / tmax;
    double t_guess = tmax;
    if (slope < 0.0)
        t_guess = (model == DecayModel::gaussian) ? std::sqrt(-1.0 / slope) : -1.0 / slope;

    auto residuals = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double x = data[i].time_us / v[1];
            const double m = v[0] * std::exp(model == DecayModel::gaussian ? -x * x : -x);
            r[i] = m - data[i].contrast;
        }
        return r;
    };

    Eigen::VectorXd th(2);
    th << c0_guess, t_guess;
    fitting::FitOutcome fo = fitting::levenberg_marquardt(residuals, th);

    DecayFitResult res;
    res.c0 = fo.params[0];
    res.time_constant_us = std::abs(fo.params[1]);
    res.chi2_per_dof = fo.dof > 0 ? fo.chi2 / fo.dof : 0.0;
    res.degenerate = fo.degenerate;
    // Unweighted fit: scale the covariance by the residual variance.
    if (!fo.degenerate) {
        res.covariance = fo.covariance * res.chi2_per_dof;
        res.c0_sigma = std::sqrt(std::max(res.covariance(0, 0), 0.0));
        res.time_constant_sigma_us = std::sqrt(std::max(res.covariance(1, 1), 0.0));
    }
    return res;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

void expect_header(std::istream& in, const std::string& expected) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
        throw std::runtime_error("expected CSV header '" + expected + "', got '" + line + "'");
}

}  // namespace

void write_scan_csv(std::ostream& out, const std::vector<ScanPoint>& data) {
    out << "freq_offset_khz,successes,trials\n";
    for (const ScanPoint& d : data)
        out << d.frequency_offset_khz << "," << d.successes << "," << d.trials << "\n";
}

std::vector<ScanPoint> read_scan_csv(std::istream& in) {
    expect_header(in, "freq_offset_khz,successes,trials");
    std::vector<ScanPoint> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw std::runtime_error("scan CSV line " + std::to_string(lineno) +
                                     ": expected 3 columns");
        ScanPoint p;
        p.frequency_offset_khz = std::stod(cells[0]);
        p.successes = std::stol(cells[1]);
        p.trials = std::stol(cells[2]);
        if (p.trials <= 0 || p.successes < 0 || p.successes > p.trials)
            throw std::runtime_error("scan CSV line " + std::to_string(lineno) +
                                     ": invalid counts");
        out.push_back(p);
    }
    return out;
}

void write_flop_csv(std::ostream& out, const std::vector<FlopPoint>& data) {
    out << "time_us,successes,trials\n";
    for (const FlopPoint& d : data)
        out << d.time_us << "," << d.successes << "," << d.trials << "\n";
}

std::vector<FlopPoint> read_flop_csv(std::istream& in) {
    expect_header(in, "time_us,successes,trials");
    std::vector<FlopPoint> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw std::runtime_error("flop CSV line " + std::to_string(lineno) +
                                     ": expected 3 columns");
        FlopPoint p;
        p.time_us = std::stod(cells[0]);
        p.successes = std::stol(cells[1]);
        p.trials = std::stol(cells[2]);
        if (p.trials <= 0 || p.successes < 0 || p.successes > p.trials)
            throw std::runtime_error("flop CSV line " + std::to_string(lineno) +
                                     ": invalid counts");
        out.push_back(p);
    }
    return out;
}

void write_decay_csv(std::ostream& out, const std::vector<DecayPoint>& data) {
    out << "time_us,contrast\n";
    for (const DecayPoint& d : data) out << d.time_us << "," << d.contrast << "\n";
}

std::vector<DecayPoint> read_decay_csv(std::istream& in) {
    expect_header(in, "time_us,contrast");
    std::vector<DecayPoint> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw std::runtime_error("decay CSV line " + std::to_string(lineno) +
                                     ": expected 2 columns");
        out.push_back({std::stod(cells[0]), std::stod(cells[1])});
    }
    return out;
}

}  // namespace gradkit::spectra
