#include "gradkit/ionchain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gradkit/constants.hpp"

namespace gradkit::ionchain {

namespace {

constexpr double kForceTol = 1e-12;  // solver target, below the 1e-10 contract

// Gradient of the scaled potential; also returns the max |component|.
double scaled_gradient(const std::vector<double>& u, std::vector<double>& g) {
    const int n = static_cast<int>(u.size());
    g.assign(n, 0.0);
    for (int i = 0; i < n; ++i) g[i] = u[i];
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = u[i] - u[j];
            const double f = 1.0 / (d * d) * (d > 0 ? 1.0 : -1.0);
            g[i] -= f;
            g[j] += f;
        }
    }
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

// Newton step on the scaled force balance. The Hessian is symmetric
// positive definite near the minimum; plain Cholesky suffices.
bool newton_step(const std::vector<double>& u, const std::vector<double>& g,
                 std::vector<double>& step) {
    const int n = static_cast<int>(u.size());
    std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) h[i * n + i] = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(u[i] - u[j]);
            const double c = 2.0 / (d * d * d);
            h[i * n + i] += c;
            h[j * n + j] += c;
            h[i * n + j] -= c;
            h[j * n + i] -= c;
        }
    }
    // Cholesky h = L L^T
    std::vector<double> l(h);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = l[i * n + j];
            for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    step.assign(n, 0.0);
    // forward solve L y = -g
    for (int i = 0; i < n; ++i) {
        double s = -g[i];
        for (int k = 0; k < i; ++k) s -= l[i * n + k] * step[k];
        step[i] = s / l[i * n + i];
    }
    // back solve L^T x = y
    for (int i = n - 1; i >= 0; --i) {
        double s = step[i];
        for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * step[k];
        step[i] = s / l[i * n + i];
    }
    return true;
}

// Coordinate-descent fallback: cyclic 1-d damped Newton sweeps.
double coordinate_descent(std::vector<double>& u, int sweeps) {
    const int n = static_cast<int>(u.size());
    std::vector<double> g;
    double res = scaled_gradient(u, g);
    for (int sweep = 0; sweep < sweeps && res > kForceTol; ++sweep) {
        for (int i = 0; i < n; ++i) {
            double gi = u[i];
            double hi = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = u[i] - u[j];
                gi -= (d > 0 ? 1.0 : -1.0) / (d * d);
                hi += 2.0 / std::abs(d * d * d);
            }
            u[i] -= gi / hi;
        }
        res = scaled_gradient(u, g);
    }
    return res;
}

}  // namespace

Species sr88() { return {constants::mass_sr88_u, 1}; }
Species ca40() { return {constants::mass_ca40_u, 1}; }

Species species_by_name(const std::string& name) {
    if (name == "Sr88" || name == "sr88" || name == "88Sr") return sr88();
    if (name == "Ca40" || name == "ca40" || name == "40Ca") return ca40();
    try {
        std::size_t used = 0;
        const double mass = std::stod(name, &used);
        if (used == name.size() && mass > 0.0) return {mass, 1};
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown species '" + name + "' (use Sr88, Ca40 or a mass in u)");
}

double length_scale_um(const Species& species, double secular_freq_khz) {
    if (secular_freq_khz <= 0.0) throw std::domain_error("secular frequency must be positive");
    if (species.mass_u <= 0.0) throw std::domain_error("species mass must be positive");
    if (species.charge < 1) throw std::domain_error("species charge must be >= 1");
    const double q = species.charge * constants::elementary_charge;
    const double m = species.mass_u * constants::atomic_mass_unit;
    const double omega = 2.0 * M_PI * secular_freq_khz * 1e3;
    const double l3 = q * q / (4.0 * M_PI * constants::eps0 * m * omega * omega);
    return std::cbrt(l3) * 1e6;
}

std::vector<double> scaled_equilibrium(int n, double* residual_out) {
    if (n < 1 || n > 50) throw std::domain_error("ion count must be in [1, 50]");
    std::vector<double> u(n);
    const double half = std::pow(static_cast<double>(n), 0.9) / 2.0;
    for (int i = 0; i < n; ++i)
        u[i] = (n == 1) ? 0.0 : -half + 2.0 * half * i / static_cast<double>(n - 1);

    std::vector<double> g, step;
    double res = scaled_gradient(u, g);
    bool newton_ok = true;
    for (int iter = 0; iter < 200 && res > kForceTol; ++iter) {
        if (!newton_step(u, g, step)) {
            newton_ok = false;
            break;
        }
        // Backtrack on the potential; keeps the ordering intact.
        const double phi0 = scaled_potential(u);
        double t = 1.0;
        std::vector<double> trial(u.size());
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + t * step[i];
            if (std::is_sorted(trial.begin(), trial.end()) && scaled_potential(trial) <= phi0) {
                u = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            newton_ok = false;
            break;
        }
        res = scaled_gradient(u, g);
    }
    if (!newton_ok || res > kForceTol) res = coordinate_descent(u, 2000);
    if (res > 1e-10)
        throw ConvergenceError("equilibrium solve did not reach force tolerance", res);
    if (residual_out) *residual_out = res;
    return u;
}

double scaled_potential(const std::vector<double>& u) {
    double e = 0.0;
    for (double v : u) e += 0.5 * v * v;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) e += 1.0 / std::abs(u[i] - u[j]);
    return e;
}

ChainSolution equilibrium_positions(const Species& species, double secular_freq_khz, int n) {
    const double l = length_scale_um(species, secular_freq_khz);
    ChainSolution sol;
    sol.species = species;
    sol.secular_freq_khz = secular_freq_khz;
    std::vector<double> u = scaled_equilibrium(n, &sol.residual_force);
    // Recenter; Sum u_i = 0 holds at the exact solution, this removes rounding drift.
    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
    sol.positions_um.resize(n);
    for (int i = 0; i < n; ++i) sol.positions_um[i] = (u[i] - mean) * l;
    std::sort(sol.positions_um.begin(), sol.positions_um.end());
    return sol;
}

std::vector<double> spacings(const ChainSolution& solution) {
    if (solution.positions_um.size() < 2)
        throw std::domain_error("spacings require at least 2 ions");
    std::vector<double> d(solution.positions_um.size() - 1);
    for (std::size_t i = 0; i + 1 < solution.positions_um.size(); ++i)
        d[i] = solution.positions_um[i + 1] - solution.positions_um[i];
    return d;
}

double secular_from_sidebands_khz(double carrier_khz, double sideband_khz) {
    if (carrier_khz == sideband_khz)
        throw std::domain_error("carrier and sideband frequencies must differ");
    return std::abs(sideband_khz - carrier_khz);
}

}  // namespace gradkit::ionchain
