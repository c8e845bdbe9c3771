#ifndef GRADKIT_ADDRESSING_HPP
#define GRADKIT_ADDRESSING_HPP

#include <string>
#include <vector>

#include "gradkit/ionchain.hpp"
#include "gradkit/magnetostatics.hpp"

namespace gradkit::addressing {

// Qubit-transition constants for a magnetic-field-sensitive optical qubit.
// delta_g is the difference of Lande g-factors between the two levels.
struct QubitConstants {
    double delta_g = 2.0;
    double mu_b_over_h_mhz_per_gauss;  // defaulted from CODATA in the constructor
    std::string transition = "S1/2(-1/2)->D5/2(-5/2)";

    QubitConstants();
    // Composes delta_g = g_upper * m_upper - g_lower * m_lower.
    static QubitConstants from_lande_factors(double g_lower, double m_lower, double g_upper,
                                             double m_upper);
};

struct AddressEntry {
    int ion_index = 0;
    double position_um = 0.0;
    double frequency_offset_khz = 0.0;  // relative to the zero-gradient line center
};

struct AddressMap {
    std::vector<AddressEntry> entries;  // sorted by ion position
    double rabi_khz = 0.0;
    double center_shift_khz = 0.0;  // Zeeman shift of the line center from residual bias
};

struct Crosstalk {
    double instantaneous = 0.0;  // excitation probability at the pi time
    double envelope = 0.0;       // Lorentzian bound O^2/(O^2+D^2)
    double time_averaged = 0.0;  // envelope / 2
};

// Linear Zeeman shift delta_g * (mu_B/h) * B in kHz for a field in gauss.
double zeeman_shift_khz(double bz_gauss, const QubitConstants& qc = {});

// Qubit frequency splitting between neighbouring ions: spacing in um,
// gradient in gauss/mm, result in kHz.
double splitting_khz(double spacing_um, double gradient_g_per_mm, const QubitConstants& qc = {});

// Gradient needed so the splitting is margin x the Rabi frequency.
double required_gradient_g_per_mm(double spacing_um, double rabi_khz, double margin,
                                  const QubitConstants& qc = {});

// Generalized Rabi excitation probability. Rabi frequency convention is
// cycles: the resonant pi time is 1/(2 rabi). rabi/detuning in kHz, t in us.
double excitation_probability(double rabi_khz, double detuning_khz, double duration_us);

// Crosstalk on the neighbour ion when a pi pulse is applied at its splitting.
Crosstalk crosstalk_at_pi(double rabi_khz, double splitting_khz);

AddressMap build_address_map(const ionchain::ChainSolution& chain,
                             const magnetostatics::SiteReport& site, double rabi_khz,
                             const QubitConstants& qc = {});

}  // namespace gradkit::addressing

#endif
