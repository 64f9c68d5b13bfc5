#pragma once

namespace smm {

/// Physical constants in SI units (CODATA 2018). Frozen literals, not
/// runtime-configurable: every number downstream must be reproducible
/// bit for bit across builds.
struct PhysicalConstants {
    double mu_b = 9.2740100783e-24;  ///< Bohr magneton [J/T]
    double k_b = 1.380649e-23;       ///< Boltzmann constant [J/K]
    double hbar = 1.054571817e-34;   ///< reduced Planck constant [J s]

    /// Zeeman scale factor [K/T]: mu_B B in temperature units.
    constexpr double mu_b_over_kb() const { return mu_b / k_b; }
    /// Conversion from Kelvin to angular frequency [rad s^-1 K^-1].
    constexpr double kb_over_hbar() const { return k_b / hbar; }
};

inline constexpr PhysicalConstants constants{};

}  // namespace smm
