#include "gradkit/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gradkit/addressing.hpp"
#include "gradkit/coherence.hpp"
#include "gradkit/ionchain.hpp"
#include "gradkit/magnetostatics.hpp"
#include "gradkit/sgeometry.hpp"
#include "gradkit/spectra.hpp"

namespace gradkit::report {

namespace {

struct Row {
    std::string quantity;
    std::string computed;
    std::string reference;
};

std::string fmt(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

}  // namespace

std::string run(std::uint64_t seed, const std::string& data_dir) {
    std::vector<Row> rows;

    // Chain spacings.
    const auto sr = ionchain::sr88();
    const auto two = ionchain::equilibrium_positions(sr, 847.0, 2);
    const auto three = ionchain::equilibrium_positions(sr, 847.0, 3);
    rows.push_back({"two-ion spacing at 847 kHz [um]", fmt(ionchain::spacings(two)[0], 3), "4.8"});
    rows.push_back(
        {"three-ion spacing at 847 kHz [um]", fmt(ionchain::spacings(three)[0], 3), "4.1"});

    // Splittings and gradient requirement.
    rows.push_back({"splitting 4.81 um x 23 G/mm [kHz]", fmt(addressing::splitting_khz(4.81, 23.0), 1),
                    "310(2)"});
    rows.push_back({"splitting 4.11 um x 23 G/mm [kHz]", fmt(addressing::splitting_khz(4.11, 23.0), 1),
                    "266(1)"});
    rows.push_back({"splitting 4.81 um x 14 G/mm [kHz]", fmt(addressing::splitting_khz(4.81, 14.0), 1),
                    "~190"});
    rows.push_back({"gradient for 100 kHz at 5 um [G/mm]",
                    fmt(addressing::required_gradient_g_per_mm(5.0, 100.0, 1.0), 2), "7.2"});

    // Reference wire design.
    const auto ref = sgeometry::reference_params();
    const auto m300 = sgeometry::evaluate(ref, 300.0);
    const auto m500 = sgeometry::evaluate(ref, 500.0);
    rows.push_back({"design gradient at 300 mA [G/mm]", fmt(m300.gradient_g_per_mm, 2), "14"});
    rows.push_back({"design gradient at 500 mA [G/mm]", fmt(m500.gradient_g_per_mm, 2), "23"});
    rows.push_back({"design residual field at 500 mA [mG]", fmt(m500.residual_mg, 1), "~10"});
    rows.push_back({"power at 500 mA through 0.2 ohm [mW]",
                    fmt(magnetostatics::power_dissipated(500.0, 0.2), 1), "50"});

    // Crosstalk.
    const auto ct34 = addressing::crosstalk_at_pi(34.0, 188.5);
    const auto ct35 = addressing::crosstalk_at_pi(35.0, 190.0);
    rows.push_back(
        {"pi-pulse crosstalk, 34 kHz at 188.5 kHz [%]", fmt(100.0 * ct34.instantaneous, 2), "<2.8"});
    rows.push_back(
        {"pi-pulse crosstalk, 35 kHz at 190 kHz [%]", fmt(100.0 * ct35.instantaneous, 2), "2.2(1.0)"});

    // Fit of the shipped two-ion scan.
    {
        std::ifstream in(data_dir + "/two_ion_scan_500mA.csv");
        if (!in) throw std::runtime_error("missing fixture " + data_dir + "/two_ion_scan_500mA.csv");
        const auto data = spectra::read_scan_csv(in);
        const auto fit = spectra::fit_spectrum(data, 2);
        const double split = fit.derived.at("mean_adjacent_splitting_khz");
        const double sig = fit.derived.at("mean_adjacent_splitting_sigma_khz");
        rows.push_back({"fitted splitting, shipped 500 mA scan [kHz]",
                        fmt(split, 2) + " +- " + fmt(sig, 2), "310(2)"});
    }

    // Rabi flop fit on a synthetic dataset at the reference truth.
    {
        const spectra::FlopParams truth{35.0, 170.0, 0.97, 0.0};
        std::vector<double> times;
        for (int i = 0; i < 100; ++i) times.push_back(2.0 + 4.0 * i);
        const auto data = spectra::simulate_flop(truth, times, 100, seed + 1);
        const auto fit = spectra::fit_flop(data);
        rows.push_back({"fitted Rabi frequency, synthetic flops [kHz]",
                        fmt(fit.params.rabi_khz, 2) + " +- " + fmt(fit.sigmas.rabi_khz, 2), "35"});
        rows.push_back({"fitted flop envelope HWHM [us]",
                        fmt(fit.params.envelope_hwhm_us, 0) + " +- " +
                            fmt(fit.sigmas.envelope_hwhm_us, 0),
                        "170"});
        rows.push_back({"fitted flop contrast [%]",
                        fmt(100.0 * fit.params.contrast, 1) + " +- " +
                            fmt(100.0 * fit.sigmas.contrast, 1),
                        "97"});
    }

    // Ramsey decay Monte Carlo at the calibrated quasi-static sigma.
    {
        const double sigma = coherence::calibrate_sigma_khz(632.0);
        coherence::NoiseModel model{coherence::NoiseKind::quasi_static, sigma, 1.0};
        std::vector<double> delays;
        for (double t = 0.1; t <= 1.0 + 1e-9; t += 0.1) delays.push_back(t);
        const auto pts = coherence::ramsey_contrast(model, delays, 4000, seed + 2);
        std::vector<spectra::DecayPoint> decay;
        for (const auto& pt : pts) decay.push_back({pt.delay_ms * 1e3, pt.contrast});
        const auto fit = spectra::fit_decay(decay, spectra::DecayModel::gaussian);
        rows.push_back({"Ramsey T2* from Monte Carlo [us]", fmt(fit.time_constant_us, 0), "632(12)"});
    }

    // Spin-echo time constant under low-frequency noise.
    {
        coherence::NoiseModel model{coherence::NoiseKind::ornstein_uhlenbeck,
                                    coherence::calibrate_sigma_khz(424.0), 10.0};
        std::vector<spectra::DecayPoint> decay;
        for (double total : {2.0, 4.0, 6.0, 8.0, 10.0}) {
            const auto schedule = coherence::periodic_schedule(0.5, 1.0, total);
            decay.push_back(
                {total * 1e3, coherence::echo_contrast(model, schedule, 1500, seed + 3)});
        }
        const auto fit = spectra::fit_decay(decay, spectra::DecayModel::exponential);
        rows.push_back({"spin-echo time constant [ms]", fmt(fit.time_constant_us / 1e3, 1), "~10"});
    }

    std::ostringstream out;
    out << "gradkit reproduction report (seed " << seed << ")\n";
    out << std::string(78, '-') << "\n";
    out << std::left << std::setw(46) << "quantity" << std::setw(18) << "computed"
        << "reference" << "\n";
    out << std::string(78, '-') << "\n";
    for (const auto& r : rows)
        out << std::left << std::setw(46) << r.quantity << std::setw(18) << r.computed
            << r.reference << "\n";
    out << std::string(78, '-') << "\n";
    return out.str();
}

}  // namespace gradkit::report
