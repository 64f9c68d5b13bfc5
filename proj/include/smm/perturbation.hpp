#pragma once

#include <complex>
#include <vector>

#include "smm/dimer_model.hpp"

namespace smm {

/// One rectangular transverse-field pulse, circularly polarized so that
/// absorption lowers m by one. Active on the window (-T/2, T/2).
struct PulseParams {
    double b_perp_tesla = 3.8e-4;   ///< rotating transverse field amplitude
    double omega_radps = 0.0;       ///< carrier angular frequency
    double duration_s = 1e-8;       ///< pulse length T

    /// Throws std::invalid_argument unless duration > 0, b_perp >= 0,
    /// omega >= 0 and all values are finite.
    void validate() const;
};

enum class TransitionChannel { drive_absorption, drive_emission, exchange };

/// First-order transition amplitude and derived rate for a single ordered
/// pair of product states.
struct TransitionRecord {
    ProductState from, to;
    TransitionChannel channel = TransitionChannel::drive_absorption;
    std::complex<double> amplitude;  ///< dimensionless first-order amplitude
    double rate_per_s = 0.0;         ///< |amplitude|^2 / T
    double detuning_radps = 0.0;     ///< argument of the active finite-time delta
    double ladder_element = 0.0;     ///< |<to|S+-|from>| of the active channel
    bool non_perturbative = false;   ///< |amplitude| > 0.3: first order is meaningless
    bool connects_computing_basis = false;
};

/// Finite-pulse spectral window sin(omega T/2) / (pi omega), with the exact
/// omega == 0 limit T/(2 pi). Units: seconds. duration <= 0 throws.
double delta_T(double omega_radps, double duration_s);

/// First-order amplitude of the pulsed transverse drive between two product
/// states. Matrix elements come from the spin operators; each ladder
/// direction pairs with its own spectral window:
///   (pi g mu_B Bperp / (i hbar)) [ <to|S+|from> delta_T(w_gap + w)
///                                 + <to|S-|from> delta_T(w_gap - w) ]
/// summed over the two units.
std::complex<double> drive_amplitude(const ModelParams& p, const PulseParams& pulse,
                                     const ProductState& from, const ProductState& to);

/// |drive_amplitude|^2 / T.
double drive_rate(const ModelParams& p, const PulseParams& pulse,
                  const ProductState& from, const ProductState& to);

/// First-order amplitude of the always-on transverse exchange term over one
/// pulse window: (2 pi / (i hbar)) <to|Hxy|from> delta_T(w_gap), with the
/// matrix element in Joules.
std::complex<double> exchange_amplitude(const ModelParams& p, double duration_s,
                                        const ProductState& from, const ProductState& to);

/// |exchange_amplitude|^2 / T.
double exchange_rate(const ModelParams& p, double duration_s,
                     const ProductState& from, const ProductState& to);

/// Every drive transition out of the four computing states to any single-unit
/// m +- 1 neighbor, followed by every transverse-exchange transition out of
/// the same states. Drive records first, each group sorted by descending
/// rate. Records whose first-order amplitude exceeds 0.3 are flagged
/// non-perturbative; a global sort would rank those meaningless rates above
/// every physical one, which is why the channel groups stay separate.
std::vector<TransitionRecord> rate_table(const ModelParams& p, const PulseParams& pulse);

}  // namespace smm
