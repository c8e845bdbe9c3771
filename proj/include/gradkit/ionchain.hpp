#ifndef GRADKIT_IONCHAIN_HPP
#define GRADKIT_IONCHAIN_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace gradkit::ionchain {

struct Species {
    double mass_u = 0.0;  // atomic mass units
    int charge = 1;       // elementary charges
};

Species sr88();
Species ca40();
// Accepts "Sr88", "Ca40" or a numeric mass in u.
Species species_by_name(const std::string& name);

struct ChainSolution {
    std::vector<double> positions_um;  // sorted ascending, centroid at 0
    double secular_freq_khz = 0.0;
    Species species;
    double residual_force = 0.0;  // max |net force| in scaled units
};

class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual(best_residual) {}
    double best_residual;
};

// Coulomb length scale l = (q^2 / (4 pi eps0 m w^2))^(1/3) in um,
// with w = 2 pi * secular_freq.
double length_scale_um(const Species& species, double secular_freq_khz);

// Equilibrium positions of n ions in a harmonic axial well, 1 <= n <= 50.
ChainSolution equilibrium_positions(const Species& species, double secular_freq_khz, int n);

// Adjacent position differences, length n-1; requires n >= 2.
std::vector<double> spacings(const ChainSolution& solution);

// |sideband - carrier|; the two frequencies must differ.
double secular_from_sidebands_khz(double carrier_khz, double sideband_khz);

// Dimensionless equilibrium positions u = y / l for n ions (test oracle hook
// and internal workhorse).
std::vector<double> scaled_equilibrium(int n, double* residual_out = nullptr);

// Scaled potential energy 0.5 sum u_i^2 + sum_{i<j} 1/|u_i-u_j|.
double scaled_potential(const std::vector<double>& u);

}  // namespace gradkit::ionchain

#endif
