#include "gradkit/addressing.hpp"

#include <cmath>
#include <stdexcept>

#include "gradkit/constants.hpp"

namespace gradkit::addressing {

QubitConstants::QubitConstants()
    : mu_b_over_h_mhz_per_gauss(constants::mu_b_over_h_mhz_per_gauss) {}

QubitConstants QubitConstants::from_lande_factors(double g_lower, double m_lower, double g_upper,
                                                  double m_upper) {
    QubitConstants qc;
    qc.delta_g = std::abs(g_upper * m_upper - g_lower * m_lower);
    return qc;
}

double zeeman_shift_khz(double bz_gauss, const QubitConstants& qc) {
    // MHz/G * G -> MHz; 1e3 to kHz.
    return qc.delta_g * qc.mu_b_over_h_mhz_per_gauss * bz_gauss * 1e3;
}

double splitting_khz(double spacing_um, double gradient_g_per_mm, const QubitConstants& qc) {
    if (spacing_um <= 0.0) throw std::domain_error("spacing must be positive");
    // MHz/G * (um * 1e-3 mm) * G/mm = 1e-3 MHz = kHz; the factors cancel.
    return qc.delta_g * qc.mu_b_over_h_mhz_per_gauss * spacing_um * gradient_g_per_mm;
}

double required_gradient_g_per_mm(double spacing_um, double rabi_khz, double margin,
                                  const QubitConstants& qc) {
    if (spacing_um <= 0.0) throw std::domain_error("spacing must be positive");
    if (rabi_khz <= 0.0) throw std::domain_error("rabi frequency must be positive");
    if (margin < 1.0) throw std::domain_error("margin must be >= 1");
    return margin * rabi_khz / (qc.delta_g * qc.mu_b_over_h_mhz_per_gauss * spacing_um);
}

double excitation_probability(double rabi_khz, double detuning_khz, double duration_us) {
    if (rabi_khz <= 0.0) throw std::domain_error("rabi frequency must be positive");
    if (duration_us < 0.0) throw std::domain_error("duration must be nonnegative");
    const double eff = std::sqrt(rabi_khz * rabi_khz + detuning_khz * detuning_khz);
    const double envelope = (rabi_khz * rabi_khz) / (eff * eff);
    const double s = std::sin(M_PI * eff * duration_us * 1e-3);  // kHz * ms = cycles
    return envelope * s * s;
}

Crosstalk crosstalk_at_pi(double rabi_khz, double splitting_khz) {
    if (rabi_khz <= 0.0) throw std::domain_error("rabi frequency must be positive");
    if (splitting_khz <= 0.0) throw std::domain_error("splitting must be positive");
    Crosstalk c;
    const double t_pi_us = 1e3 / (2.0 * rabi_khz);
    c.instantaneous = excitation_probability(rabi_khz, splitting_khz, t_pi_us);
    c.envelope =
        rabi_khz * rabi_khz / (rabi_khz * rabi_khz + splitting_khz * splitting_khz);
    c.time_averaged = 0.5 * c.envelope;
    return c;
}

AddressMap build_address_map(const ionchain::ChainSolution& chain,
                             const magnetostatics::SiteReport& site, double rabi_khz,
                             const QubitConstants& qc) {
    if (chain.positions_um.empty()) throw std::domain_error("chain has no ions");
    AddressMap map;
    map.rabi_khz = rabi_khz;
    map.center_shift_khz = zeeman_shift_khz(site.residual_b.z, qc);
    map.entries.reserve(chain.positions_um.size());
    for (std::size_t i = 0; i < chain.positions_um.size(); ++i) {
        AddressEntry e;
        e.ion_index = static_cast<int>(i);
        e.position_um = chain.positions_um[i];
        e.frequency_offset_khz = qc.delta_g * qc.mu_b_over_h_mhz_per_gauss * e.position_um *
                                     site.dbz_dy +
                                 map.center_shift_khz;
        map.entries.push_back(e);
    }
    return map;
}

}  // namespace gradkit::addressing
