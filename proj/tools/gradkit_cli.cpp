// gradkit: design and analysis toolkit for magnetic-field-gradient ion
// addressing. Subcommands cover field evaluation, chain equilibria,
// per-ion addressing, spectrum/flop simulation and fitting, coherence
// Monte Carlo, geometry optimization and the reproduction report.
//
// Exit codes: 0 success, 1 usage error, 2 computation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "gradkit/addressing.hpp"
#include "gradkit/coherence.hpp"
#include "gradkit/geometry_io.hpp"
#include "gradkit/ionchain.hpp"
#include "gradkit/magnetostatics.hpp"
#include "gradkit/optimizer.hpp"
#include "gradkit/report.hpp"
#include "gradkit/sgeometry.hpp"
#include "gradkit/spectra.hpp"

using json = nlohmann::json;
using namespace gradkit;

namespace {

constexpr std::uint64_t kDefaultSeed = 123456789ULL;

#ifndef GRADKIT_DATA_DIR
#define GRADKIT_DATA_DIR "data"
#endif

// "lo:hi:step" inclusive grid.
std::vector<double> parse_grid(const std::string& s) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream in(s);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw CLI::ValidationError("grid", "expected <lo>:<hi>:<step> with positive step");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-9 * step; v += step) grid.push_back(v);
    if (grid.empty()) throw CLI::ValidationError("grid", "empty grid");
    return grid;
}

// "center:amplitude,center:amplitude,..."
std::vector<spectra::Peak> parse_peaks(const std::string& s) {
    std::vector<spectra::Peak> peaks;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("peaks", "expected <center_khz>:<amplitude>[,...]");
        peaks.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    if (peaks.empty()) throw CLI::ValidationError("peaks", "no peaks given");
    return peaks;
}

// "first+every" in ms, e.g. "0.5+1".
std::pair<double, double> parse_echo(const std::string& s) {
    const auto plus = s.find('+');
    if (plus == std::string::npos)
        throw CLI::ValidationError("echo", "expected <first_ms>+<every_ms>, e.g. 0.5+1");
    return {std::stod(s.substr(0, plus)), std::stod(s.substr(plus + 1))};
}

std::vector<double> parse_triplet(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    if (v.size() != 3) throw CLI::ValidationError(what, "expected three comma-separated numbers");
    return v;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

// Scales all path currents so the largest |current| (the supply) matches.
std::vector<magnetostatics::CurrentPath> load_geometry_at(const std::string& file,
                                                          std::optional<double> current_ma) {
    auto paths = geometry_io::load_file(file);
    if (!current_ma) return paths;
    double supply = 0.0;
    for (const auto& p : paths) supply = std::max(supply, std::abs(p.current_ma));
    if (supply == 0.0) throw std::runtime_error("geometry file carries zero current");
    return magnetostatics::scale_currents(paths, *current_ma / supply);
}

struct FieldArgs {
    std::string geometry;
    double current = -1.0;  // <0: keep file currents
    std::vector<double> bias{0.0, 0.0, 4.0};
    std::vector<double> at{0.0, 0.0, 100.0};
    double resistance = 0.2;
    int subdivisions = 1;
    bool json_out = false;
};

int run_field(const FieldArgs& a) {
    std::optional<double> cur;
    if (a.current >= 0.0) cur = a.current;
    auto paths = load_geometry_at(a.geometry, cur);
    magnetostatics::FieldOptions opts;
    opts.width_subdivisions = a.subdivisions;
    opts.max_current_ma = 1e6;  // file contents decide; validation happened at parse
    const Vec3 center{a.at[0], a.at[1], a.at[2]};
    const Vec3 bias{a.bias[0], a.bias[1], a.bias[2]};
    const auto r = magnetostatics::site_report(paths, center, bias, a.resistance, opts);
    if (a.json_out) {
        json j;
        j["b_total_gauss"] = {r.b_total.x, r.b_total.y, r.b_total.z};
        j["residual_b_gauss"] = {r.residual_b.x, r.residual_b.y, r.residual_b.z};
        j["residual_b_mag_mg"] = norm(r.residual_b) * 1e3;
        j["dbz_dy_g_per_mm"] = r.dbz_dy;
        j["dabs_b_total_dy_g_per_mm"] = r.dabs_b_total_dy;
        j["power_mw"] = r.power_mw;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << std::setprecision(10);
        std::cout << "b_total_gauss=" << r.b_total.x << "," << r.b_total.y << "," << r.b_total.z
                  << "\n";
        std::cout << "residual_b_gauss=" << r.residual_b.x << "," << r.residual_b.y << ","
                  << r.residual_b.z << "\n";
        std::cout << "residual_b_mag_mg=" << norm(r.residual_b) * 1e3 << "\n";
        std::cout << "dbz_dy_g_per_mm=" << r.dbz_dy << "\n";
        std::cout << "dabs_b_total_dy_g_per_mm=" << r.dabs_b_total_dy << "\n";
        std::cout << "power_mw=" << r.power_mw << "\n";
    }
    return 0;
}

struct ChainArgs {
    std::string species = "Sr88";
    double secular_khz = 847.0;
    int n = 2;
    std::string out;
    bool json_out = false;
};

int run_chain(const ChainArgs& a) {
    const auto sol =
        ionchain::equilibrium_positions(ionchain::species_by_name(a.species), a.secular_khz, a.n);
    if (a.json_out) {
        json j;
        j["positions_um"] = sol.positions_um;
        if (a.n >= 2) j["spacings_um"] = ionchain::spacings(sol);
        j["secular_freq_khz"] = sol.secular_freq_khz;
        j["residual_force"] = sol.residual_force;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::ofstream file;
    std::ostream& out = open_out(file, a.out);
    out << "index,position_um\n" << std::setprecision(10);
    for (std::size_t i = 0; i < sol.positions_um.size(); ++i)
        out << i << "," << sol.positions_um[i] << "\n";
    return 0;
}

struct AddressArgs {
    // quick mode
    double spacing_um = 0.0;
    double gradient = 0.0;
    // pipeline mode
    std::string geometry;
    std::string species = "Sr88";
    double current = 300.0;
    double secular_khz = 847.0;
    int n = 2;
    double rabi_khz = 34.0;
    std::vector<double> bias{0.0, 0.0, 4.0};
    bool json_out = false;
};

int run_address(const AddressArgs& a) {
    if (a.spacing_um > 0.0) {
        const double split = addressing::splitting_khz(a.spacing_um, a.gradient);
        const auto ct = addressing::crosstalk_at_pi(a.rabi_khz, split);
        if (a.json_out) {
            json j;
            j["splitting_khz"] = split;
            j["crosstalk_instantaneous"] = ct.instantaneous;
            j["crosstalk_envelope"] = ct.envelope;
            j["crosstalk_time_averaged"] = ct.time_averaged;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << std::setprecision(10);
            std::cout << "splitting_khz=" << split << "\n";
            std::cout << "crosstalk_instantaneous=" << ct.instantaneous << "\n";
            std::cout << "crosstalk_envelope=" << ct.envelope << "\n";
            std::cout << "crosstalk_time_averaged=" << ct.time_averaged << "\n";
        }
        return 0;
    }
    if (a.geometry.empty())
        throw CLI::ValidationError("address", "need either --spacing/--gradient or --geometry");
    auto paths = load_geometry_at(a.geometry, a.current);
    const auto chain =
        ionchain::equilibrium_positions(ionchain::species_by_name(a.species), a.secular_khz, a.n);
    magnetostatics::FieldOptions fopts;
    fopts.max_current_ma = 1e6;
    const auto site = magnetostatics::site_report(
        paths, Vec3{0, 0, 100}, Vec3{a.bias[0], a.bias[1], a.bias[2]}, 0.2, fopts);
    const auto map = addressing::build_address_map(chain, site, a.rabi_khz);

    auto neighbour_crosstalk = [&](std::size_t i) {
        double worst = 0.0;
        for (std::size_t j : {i == 0 ? i : i - 1, i + 1}) {
            if (j == i || j >= map.entries.size()) continue;
            const double split = std::abs(map.entries[i].frequency_offset_khz -
                                          map.entries[j].frequency_offset_khz);
            if (split <= 0.0) return 1.0;
            worst = std::max(worst,
                             addressing::crosstalk_at_pi(a.rabi_khz, split).instantaneous);
        }
        return worst;
    };

    if (a.json_out) {
        json j;
        j["dbz_dy_g_per_mm"] = site.dbz_dy;
        j["center_shift_khz"] = map.center_shift_khz;
        j["rabi_khz"] = map.rabi_khz;
        json rows = json::array();
        for (std::size_t i = 0; i < map.entries.size(); ++i) {
            const auto& e = map.entries[i];
            rows.push_back({{"ion_index", e.ion_index},
                            {"position_um", e.position_um},
                            {"offset_khz", e.frequency_offset_khz},
                            {"crosstalk_to_neighbors", neighbour_crosstalk(i)}});
        }
        j["ions"] = rows;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "ion_index,position_um,offset_khz,crosstalk_to_neighbors\n"
              << std::setprecision(8);
    for (std::size_t i = 0; i < map.entries.size(); ++i) {
        const auto& e = map.entries[i];
        std::cout << e.ion_index << "," << e.position_um << "," << e.frequency_offset_khz << ","
                  << neighbour_crosstalk(i) << "\n";
    }
    return 0;
}

struct SpectrumArgs {
    std::string mode;  // sim | fit
    std::string peaks_spec;
    double rabi_khz = 9.0;
    double pulse_us = 50.0;
    std::string grid = "-350:350:2";
    long trials = 100;
    std::uint64_t seed = kDefaultSeed;
    std::string in;
    std::string out;
    std::string curve_out;
    int n_peaks = 2;
    bool json_out = false;
};

int run_spectrum(const SpectrumArgs& a) {
    if (a.mode == "sim") {
        spectra::SpectrumModelParams truth;
        truth.peaks = parse_peaks(a.peaks_spec.empty() ? "-155:0.9,155:0.9" : a.peaks_spec);
        truth.rabi_khz = a.rabi_khz;
        truth.pulse_us = a.pulse_us;
        const auto data = spectra::simulate_scan(truth, parse_grid(a.grid), a.trials, a.seed);
        std::ofstream file;
        spectra::write_scan_csv(open_out(file, a.out), data);
        return 0;
    }
    // fit
    std::ifstream in(a.in);
    if (!in) throw std::runtime_error("cannot open scan CSV '" + a.in + "'");
    const auto data = spectra::read_scan_csv(in);
    const auto fit = spectra::fit_spectrum(data, a.n_peaks, std::nullopt, a.pulse_us);
    if (!a.curve_out.empty()) {
        std::ofstream curve(a.curve_out);
        curve << "freq_offset_khz,probability\n" << std::setprecision(10);
        const double lo = data.front().frequency_offset_khz;
        const double hi = data.back().frequency_offset_khz;
        for (int i = 0; i <= 1000; ++i) {
            const double f = lo + (hi - lo) * i / 1000.0;
            curve << f << "," << spectra::model_spectrum(fit.params, f) << "\n";
        }
    }
    if (a.json_out) {
        json j;
        j["rabi_khz"] = fit.params.rabi_khz;
        j["pulse_us"] = fit.params.pulse_us;
        json pk = json::array();
        for (const auto& p : fit.params.peaks)
            pk.push_back({{"center_khz", p.center_khz}, {"amplitude", p.amplitude}});
        j["peaks"] = pk;
        j["chi2_per_dof"] = fit.chi2_per_dof;
        j["degenerate"] = fit.degenerate;
        for (const auto& [k, v] : fit.derived) j[k] = v;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "peak  center_khz   amplitude\n" << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < fit.params.peaks.size(); ++i)
        std::cout << std::setw(4) << i << "  " << std::setw(10) << fit.params.peaks[i].center_khz
                  << "  " << std::setw(9) << fit.params.peaks[i].amplitude << "\n";
    std::cout << "\n";
    std::cout << "rabi_khz=" << fit.params.rabi_khz << "\n";
    std::cout << "chi2_per_dof=" << fit.chi2_per_dof << "\n";
    for (const auto& [k, v] : fit.derived) std::cout << k << "=" << v << "\n";
    std::cout << "degenerate=" << (fit.degenerate ? 1 : 0) << "\n";
    return 0;
}

struct FlopArgs {
    std::string mode;
    double rabi_khz = 35.0;
    double hwhm_us = 170.0;
    double contrast = 0.97;
    double offset = 0.0;
    std::string times = "2:400:4";
    long trials = 100;
    std::uint64_t seed = kDefaultSeed;
    std::string in;
    std::string out;
    std::string curve_out;
    bool json_out = false;
};

int run_flop(const FlopArgs& a) {
    if (a.mode == "sim") {
        const spectra::FlopParams truth{a.rabi_khz, a.hwhm_us, a.contrast, a.offset};
        const auto data = spectra::simulate_flop(truth, parse_grid(a.times), a.trials, a.seed);
        std::ofstream file;
        spectra::write_flop_csv(open_out(file, a.out), data);
        return 0;
    }
    std::ifstream in(a.in);
    if (!in) throw std::runtime_error("cannot open flop CSV '" + a.in + "'");
    const auto data = spectra::read_flop_csv(in);
    const auto fit = spectra::fit_flop(data);
    if (!a.curve_out.empty()) {
        std::ofstream curve(a.curve_out);
        curve << "time_us,probability\n" << std::setprecision(10);
        const double hi = data.back().time_us;
        for (int i = 0; i <= 1000; ++i) {
            const double t = hi * i / 1000.0;
            curve << t << "," << spectra::flop_probability(fit.params, t) << "\n";
        }
    }
    if (a.json_out) {
        json j;
        j["rabi_khz"] = fit.params.rabi_khz;
        j["rabi_sigma_khz"] = fit.sigmas.rabi_khz;
        j["envelope_hwhm_us"] = fit.params.envelope_hwhm_us;
        j["envelope_hwhm_sigma_us"] = fit.sigmas.envelope_hwhm_us;
        j["contrast"] = fit.params.contrast;
        j["contrast_sigma"] = fit.sigmas.contrast;
        j["offset"] = fit.params.offset;
        j["offset_sigma"] = fit.sigmas.offset;
        j["chi2_per_dof"] = fit.chi2_per_dof;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << std::setprecision(8);
    std::cout << "rabi_khz=" << fit.params.rabi_khz << "\n";
    std::cout << "rabi_sigma_khz=" << fit.sigmas.rabi_khz << "\n";
    std::cout << "envelope_hwhm_us=" << fit.params.envelope_hwhm_us << "\n";
    std::cout << "envelope_hwhm_sigma_us=" << fit.sigmas.envelope_hwhm_us << "\n";
    std::cout << "contrast=" << fit.params.contrast << "\n";
    std::cout << "contrast_sigma=" << fit.sigmas.contrast << "\n";
    std::cout << "offset=" << fit.params.offset << "\n";
    std::cout << "chi2_per_dof=" << fit.chi2_per_dof << "\n";
    return 0;
}

struct CoherenceArgs {
    std::string mode;  // ramsey | echo
    std::string model = "quasi_static";
    double sigma_khz = -1.0;
    double t2star_us = -1.0;
    double tau_c_ms = 10.0;
    std::string delays = "0.05:1.0:0.05";
    std::string echo_spec = "0.5+1";
    int trajectories = 10000;
    double dt_ms = 0.01;
    std::uint64_t seed = kDefaultSeed;
    std::string out;
};

int run_coherence(const CoherenceArgs& a) {
    coherence::NoiseModel model;
    if (a.model == "quasi_static")
        model.kind = coherence::NoiseKind::quasi_static;
    else if (a.model == "ou" || a.model == "ornstein_uhlenbeck")
        model.kind = coherence::NoiseKind::ornstein_uhlenbeck;
    else
        throw CLI::ValidationError("model", "expected quasi_static or ou");
    model.correlation_time_ms = a.tau_c_ms;
    if (a.sigma_khz >= 0.0)
        model.sigma_khz = a.sigma_khz;
    else if (a.t2star_us > 0.0)
        model.sigma_khz = coherence::calibrate_sigma_khz(a.t2star_us);
    else
        throw CLI::ValidationError("sigma", "give --sigma or --t2star");

    const auto delays = parse_grid(a.delays);
    std::ofstream file;
    std::ostream& out = open_out(file, a.out);
    out << "delay_ms,contrast\n" << std::setprecision(10);
    if (a.mode == "ramsey") {
        for (const auto& pt : coherence::ramsey_contrast(model, delays, a.trajectories, a.seed,
                                                         a.dt_ms))
            out << pt.delay_ms << "," << pt.contrast << "\n";
    } else {
        const auto [first, every] = parse_echo(a.echo_spec);
        for (double total : delays) {
            const auto schedule = coherence::periodic_schedule(first, every, total);
            out << total << ","
                << coherence::echo_contrast(model, schedule, a.trajectories, a.seed, a.dt_ms)
                << "\n";
        }
    }
    return 0;
}

struct OptimizeArgs {
    double current = 300.0;
    int budget = 500;
    std::uint64_t seed = 1;
    std::string start = "detuned";  // detuned | reference
    std::string bounds_file;
    double residual_max_mg = 20.0;
    double power_max_mw = 50.0;
    std::string geometry_out;
    std::string trace_out;
    bool json_out = false;
};

// Bounds file: lines 'bound <knob> <lo> <hi>', knobs: s_leg_pitch,
// s_leg_length, return_path_offset, return_path_offset_lower.
void apply_bounds_file(optimizer::OptimizeSpec& spec, const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open bounds file '" + file + "'");
    const std::vector<std::string> names{"s_leg_pitch", "s_leg_length", "return_path_offset",
                                         "return_path_offset_lower"};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word != "bound")
            throw geometry_io::ParseError(lineno, "expected 'bound <knob> <lo> <hi>'");
        std::string knob;
        double lo, hi;
        if (!(ls >> knob >> lo >> hi))
            throw geometry_io::ParseError(lineno, "expected 'bound <knob> <lo> <hi>'");
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == knob) {
                spec.lower[i] = lo;
                spec.upper[i] = hi;
                found = true;
            }
        if (!found) throw geometry_io::ParseError(lineno, "unknown knob '" + knob + "'");
    }
}

int run_optimize(const OptimizeArgs& a) {
    const sgeometry::SGeometryParams init = a.start == "reference"
                                                ? sgeometry::reference_params()
                                                : sgeometry::detuned_params();
    optimizer::OptimizeSpec spec = optimizer::default_spec(init, a.current);
    spec.budget = a.budget;
    spec.seed = a.seed;
    spec.residual_max_mg = a.residual_max_mg;
    spec.power_max_mw = a.power_max_mw;
    if (!a.bounds_file.empty()) apply_bounds_file(spec, a.bounds_file);

    const auto result = optimizer::optimize(spec, init);

    if (!a.geometry_out.empty()) {
        const auto paths = sgeometry::build_geometry(result.best_params, a.current);
        geometry_io::write_file(a.geometry_out, paths);
    }
    if (!a.trace_out.empty()) {
        std::ofstream trace(a.trace_out);
        trace << "eval_index,s_leg_pitch_um,s_leg_length_um,return_path_offset_um,"
                 "return_path_offset_lower_um,gradient_g_per_mm,residual_mg,power_mw,feasible,"
                 "cost,running_best\n"
              << std::setprecision(10);
        for (const auto& e : result.trace) {
            trace << e.eval_index;
            for (double k : e.knobs) trace << "," << k;
            trace << "," << e.metrics.gradient_g_per_mm << "," << e.metrics.residual_mg << ","
                  << e.metrics.power_mw << "," << (e.metrics.feasible ? 1 : 0) << "," << e.cost
                  << "," << e.running_best << "\n";
        }
    }
    if (a.json_out) {
        json j;
        j["evaluations"] = result.evaluations;
        j["gradient_g_per_mm"] = result.best_metrics.gradient_g_per_mm;
        j["residual_mg"] = result.best_metrics.residual_mg;
        j["power_mw"] = result.best_metrics.power_mw;
        j["gradient_inhomogeneity"] = result.best_metrics.gradient_inhomogeneity;
        j["feasible"] = result.best_metrics.feasible;
        j["s_leg_pitch_um"] = result.best_params.s_leg_pitch;
        j["s_leg_length_um"] = result.best_params.s_leg_length;
        j["return_path_offset_um"] = result.best_params.return_path_offset;
        j["return_path_offset_lower_um"] = result.best_params.return_path_offset_lower;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << std::setprecision(10);
    std::cout << "evaluations=" << result.evaluations << "\n";
    std::cout << "gradient_g_per_mm=" << result.best_metrics.gradient_g_per_mm << "\n";
    std::cout << "residual_mg=" << result.best_metrics.residual_mg << "\n";
    std::cout << "power_mw=" << result.best_metrics.power_mw << "\n";
    std::cout << "gradient_inhomogeneity=" << result.best_metrics.gradient_inhomogeneity << "\n";
    std::cout << "feasible=" << (result.best_metrics.feasible ? 1 : 0) << "\n";
    std::cout << "s_leg_pitch_um=" << result.best_params.s_leg_pitch << "\n";
    std::cout << "s_leg_length_um=" << result.best_params.s_leg_length << "\n";
    std::cout << "return_path_offset_um=" << result.best_params.return_path_offset << "\n";
    std::cout << "return_path_offset_lower_um=" << result.best_params.return_path_offset_lower
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradkit: magnetic-field-gradient ion addressing toolkit.\n"
                 "Units: positions um, currents mA, fields gauss, gradients gauss/mm,\n"
                 "frequencies kHz, times us (pulses) or ms (coherence delays)."};
    app.require_subcommand(1);

    FieldArgs field_args;
    auto* field = app.add_subcommand("field", "Field, gradient and power at the trap site");
    field->add_option("--geometry", field_args.geometry, "geometry file (um, mA)")->required();
    field->add_option("--current", field_args.current,
                      "supply current in mA (scales the file's currents); omit to keep the file");
    field->add_option("--bias", [&field_args](const std::vector<std::string>& v) {
        field_args.bias = parse_triplet(v[0], "bias");
        return true;
    }, "external bias field in gauss as bx,by,bz (default 0,0,4)");
    field->add_option("--at", [&field_args](const std::vector<std::string>& v) {
        field_args.at = parse_triplet(v[0], "at");
        return true;
    }, "evaluation point in um (default 0,0,100)");
    field->add_option("--resistance", field_args.resistance, "path resistance in ohm (default 0.2)");
    field->add_option("--subdivide-width", field_args.subdivisions,
                      "filaments across each trace width (default 1)");
    field->add_flag("--json", field_args.json_out, "JSON output");

    ChainArgs chain_args;
    auto* chain = app.add_subcommand("chain", "Ion chain equilibrium positions (CSV: index,position_um)");
    chain->add_option("--species", chain_args.species, "Sr88, Ca40 or a mass in u (default Sr88)");
    chain->add_option("--secular", chain_args.secular_khz, "axial secular frequency in kHz")
        ->required();
    chain->add_option("--n", chain_args.n, "ion count")->required();
    chain->add_option("--out", chain_args.out, "output CSV path (default stdout)");
    chain->add_flag("--json", chain_args.json_out, "JSON output (includes spacings_um)");

    AddressArgs addr_args;
    auto* address = app.add_subcommand(
        "address", "Per-ion frequency offsets and crosstalk (or quick splitting from "
                   "--spacing/--gradient)");
    address->add_option("--spacing", addr_args.spacing_um, "ion spacing in um (quick mode)");
    address->add_option("--gradient", addr_args.gradient, "field gradient in gauss/mm (quick mode)");
    address->add_option("--geometry", addr_args.geometry, "geometry file for the full pipeline");
    address->add_option("--species", addr_args.species, "ion species (default Sr88)");
    address->add_option("--current", addr_args.current, "supply current in mA (default 300)");
    address->add_option("--secular", addr_args.secular_khz, "secular frequency in kHz (default 847)");
    address->add_option("--n", addr_args.n, "ion count (default 2)");
    address->add_option("--rabi", addr_args.rabi_khz, "Rabi frequency in kHz (default 34)");
    address->add_flag("--json", addr_args.json_out, "JSON output");

    SpectrumArgs spec_args;
    auto* spectrum = app.add_subcommand("spectrum", "Simulate or fit frequency-scan spectra");
    spectrum->add_option("mode", spec_args.mode, "sim or fit")
        ->required()
        ->check(CLI::IsMember({"sim", "fit"}));
    spectrum->add_option("--peaks", spec_args.peaks_spec,
                         "peaks as center_khz:amplitude[,...] (sim; default -155:0.9,155:0.9)");
    spectrum->add_option("--rabi", spec_args.rabi_khz, "Rabi frequency in kHz (sim; default 9)");
    spectrum->add_option("--pulse", spec_args.pulse_us, "probe pulse length in us (default 50)");
    spectrum->add_option("--grid", spec_args.grid, "frequency grid lo:hi:step in kHz");
    spectrum->add_option("--trials", spec_args.trials, "trials per point (default 100)");
    spectrum->add_option("--seed", spec_args.seed, "RNG seed")->envname("GRADKIT_SEED");
    spectrum->add_option("--in", spec_args.in, "input scan CSV (fit)");
    spectrum->add_option("--out", spec_args.out, "output CSV (sim; default stdout)");
    spectrum->add_option("--curve-out", spec_args.curve_out, "fitted model curve CSV (fit)");
    spectrum->add_option("--n-peaks", spec_args.n_peaks, "number of peaks to fit (default 2)");
    spectrum->add_flag("--json", spec_args.json_out, "JSON output");

    FlopArgs flop_args;
    auto* flop = app.add_subcommand("flop", "Simulate or fit Rabi flop data");
    flop->add_option("mode", flop_args.mode, "sim or fit")
        ->required()
        ->check(CLI::IsMember({"sim", "fit"}));
    flop->add_option("--rabi", flop_args.rabi_khz, "Rabi frequency in kHz (sim; default 35)");
    flop->add_option("--hwhm", flop_args.hwhm_us, "Gaussian envelope HWHM in us (default 170)");
    flop->add_option("--contrast", flop_args.contrast, "initial contrast (default 0.97)");
    flop->add_option("--offset", flop_args.offset, "baseline probability (default 0)");
    flop->add_option("--times", flop_args.times, "time grid lo:hi:step in us (default 2:400:4)");
    flop->add_option("--trials", flop_args.trials, "trials per point (default 100)");
    flop->add_option("--seed", flop_args.seed, "RNG seed")->envname("GRADKIT_SEED");
    flop->add_option("--in", flop_args.in, "input flop CSV (fit)");
    flop->add_option("--out", flop_args.out, "output CSV (sim; default stdout)");
    flop->add_option("--curve-out", flop_args.curve_out, "fitted model curve CSV (fit)");
    flop->add_flag("--json", flop_args.json_out, "JSON output");

    CoherenceArgs coh_args;
    auto* coherence_cmd = app.add_subcommand("coherence",
                                             "Ramsey / spin-echo Monte Carlo (CSV: delay_ms,contrast)");
    coherence_cmd->add_option("mode", coh_args.mode, "ramsey or echo")
        ->required()
        ->check(CLI::IsMember({"ramsey", "echo"}));
    coherence_cmd->add_option("--model", coh_args.model, "quasi_static or ou");
    coherence_cmd->add_option("--sigma", coh_args.sigma_khz, "detuning sigma in kHz");
    coherence_cmd->add_option("--t2star", coh_args.t2star_us,
                              "calibrate sigma from this T2* in us");
    coherence_cmd->add_option("--tau-c", coh_args.tau_c_ms, "OU correlation time in ms (default 10)");
    coherence_cmd->add_option("--delays", coh_args.delays,
                              "delay (ramsey) or total-time (echo) grid lo:hi:step in ms");
    coherence_cmd->add_option("--echo", coh_args.echo_spec,
                              "pi pulse schedule first_ms+every_ms (default 0.5+1)");
    coherence_cmd->add_option("--trajectories", coh_args.trajectories,
                              "Monte Carlo trajectories (default 10000)");
    coherence_cmd->add_option("--dt", coh_args.dt_ms, "integration step in ms (default 0.01)");
    coherence_cmd->add_option("--seed", coh_args.seed, "RNG seed")->envname("GRADKIT_SEED");
    coherence_cmd->add_option("--out", coh_args.out, "output CSV (default stdout)");

    OptimizeArgs opt_args;
    auto* optimize_cmd = app.add_subcommand("optimize",
                                            "Search the gradient-wire family for the best design");
    optimize_cmd->add_option("--current", opt_args.current, "design current in mA (default 300)");
    optimize_cmd->add_option("--budget", opt_args.budget, "evaluation budget (default 500)");
    optimize_cmd->add_option("--seed", opt_args.seed, "restart RNG seed")->envname("GRADKIT_SEED");
    optimize_cmd->add_option("--start", opt_args.start, "start point: detuned or reference")
        ->check(CLI::IsMember({"detuned", "reference"}));
    optimize_cmd->add_option("--bounds-file", opt_args.bounds_file,
                             "bounds file: lines 'bound <knob> <lo> <hi>'");
    optimize_cmd->add_option("--residual-max", opt_args.residual_max_mg,
                             "residual field limit in mG (default 20)");
    optimize_cmd->add_option("--power-max", opt_args.power_max_mw, "power limit in mW (default 50)");
    optimize_cmd->add_option("--geometry-out", opt_args.geometry_out, "write the best geometry file");
    optimize_cmd->add_option("--trace-out", opt_args.trace_out, "write the evaluation trace CSV");
    optimize_cmd->add_flag("--json", opt_args.json_out, "JSON output");

    std::uint64_t report_seed = kDefaultSeed;
    std::string report_data_dir = GRADKIT_DATA_DIR;
    auto* report_cmd = app.add_subcommand("report",
                                          "Full reproduction suite: computed vs reference values");
    report_cmd->add_option("--seed", report_seed, "RNG seed")->envname("GRADKIT_SEED");
    report_cmd->add_option("--data-dir", report_data_dir, "directory with shipped fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (field->parsed()) return run_field(field_args);
        if (chain->parsed()) return run_chain(chain_args);
        if (address->parsed()) return run_address(addr_args);
        if (spectrum->parsed()) return run_spectrum(spec_args);
        if (flop->parsed()) return run_flop(flop_args);
        if (coherence_cmd->parsed()) return run_coherence(coh_args);
        if (optimize_cmd->parsed()) return run_optimize(opt_args);
        if (report_cmd->parsed()) {
            std::cout << report::run(report_seed, report_data_dir);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
