#ifndef GRADKIT_CONSTANTS_HPP
#define GRADKIT_CONSTANTS_HPP

namespace gradkit::constants {

// CODATA 2018 values. SI unless stated otherwise.
inline constexpr double mu0 = 1.25663706212e-6;           // vacuum permeability, T m / A
inline constexpr double eps0 = 8.8541878128e-12;          // vacuum permittivity, F / m
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double planck_h = 6.62607015e-34;        // J s (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24; // J / T
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// Bohr magneton in frequency units: mu_B / h in MHz per gauss.
// 9.2740100783e-24 / 6.62607015e-34 = 1.3996244936e10 Hz/T = 1.3996244936 MHz/G.
inline constexpr double mu_b_over_h_mhz_per_gauss = bohr_magneton / planck_h * 1e-10;

// Biot-Savart prefactor in the toolkit's interface units (gauss, mA, um).
// B[T] = (mu0 / 4pi) I[A] f[1/m]; converting gauss/mA/um multiplies by
// 1e4 * 1e-3 * 1e6 = 1e7, so the prefactor is mu0/(4pi) * 1e7 ~= 1.0000000006.
inline constexpr double biot_savart_gauss_um_per_ma =
    mu0 / (4.0 * 3.14159265358979323846) * 1e7;

// Isotope masses in atomic mass units.
inline constexpr double mass_sr88_u = 87.9056121;
inline constexpr double mass_ca40_u = 39.962590866;

}  // namespace gradkit::constants

#endif
