#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "smm/perturbation.hpp"

namespace smm {

/// Amplitudes of a resonantly driven two-level pair, interaction picture.
struct TwoLevelState {
    std::complex<double> c_a{1.0, 0.0};
    std::complex<double> c_b{0.0, 0.0};
};

/// Closed-form resonant Rabi rotation:
///   c_a(t) = c_a cos(Wt/2) + i c_b sin(Wt/2)
///   c_b(t) = c_b cos(Wt/2) + i c_a sin(Wt/2)
TwoLevelState rabi_evolve(const TwoLevelState& c0, double rabi_omega_radps, double t_s);

/// g mu_B Bperp |<to|S+-|from>| / hbar for a pair one ladder step apart
/// [rad/s]. Zero if the states are not connected by a single step.
double effective_rabi_frequency(const ModelParams& p, const PulseParams& pulse,
                                const ProductState& from, const ProductState& to);

/// Transverse amplitude [Tesla] that makes the target-pair Rabi angle
/// exactly pi over the given duration. The ladder element is taken from the
/// spin operators, never hard-coded. duration <= 0 throws.
double calibrate_pi_pulse(const ModelParams& p, double duration_s);

enum class Frame { rotating, lab };

struct PropagateOptions {
    Frame frame = Frame::rotating;
    int samples = 201;        ///< output grid points, both window edges included
    long min_steps = 0;       ///< lab frame: lower bound on integrator steps
    /// Restrict the dynamics to these basis indices (all couplings to other
    /// states dropped). psi0 must live inside the subspace.
    std::optional<std::vector<int>> subspace;
};

struct PropagationResult {
    std::vector<double> times;       ///< seconds, from -T/2 to +T/2
    Eigen::MatrixXd populations;     ///< row per time, column per basis index
    Vector final_state;              ///< lab-frame amplitudes at +T/2
    double max_norm_error = 0.0;     ///< max ||psi|^2 - 1| over the run
    long steps_taken = 0;            ///< integrator steps (0: exact eigenbasis route)
};

/// Solves i hbar dpsi/dt = [h_full + drive(t)] psi over (-T/2, T/2) with
///   drive(t) = -(g mu_B Bperp / 2) sum_i (e^{+i w t} Si+ + e^{-i w t} Si-).
///
/// Frame::rotating transforms by exp(-i w (Sz1+Sz2) t), where the drive is
/// static, and applies one exact eigendecomposition of the resulting
/// time-independent Hamiltonian; norm drift is roundoff only.
///
/// Frame::lab integrates the same equation directly: interaction picture of
/// the diagonal part, commutator-free fourth-order Magnus steps whose
/// exponentials are unitary to machine precision. The step count comes from
/// a quadrature-error model over the oscillating matrix elements; min_steps
/// can only refine it, never coarsen. Both frames must agree on every
/// population; the lab route exists as an independent cross-check of the
/// rotating-frame algebra.
///
/// Throws std::invalid_argument for malformed input and std::runtime_error
/// if the integrator cannot hold its accuracy contract.
PropagationResult propagate(const ModelParams& p, const PulseParams& pulse,
                            const Vector& psi0, const PropagateOptions& opts = {});

/// 4x4 gate on the computing basis plus per-input leakage.
struct GateResult {
    Eigen::Matrix4cd matrix;                     ///< columns: images of a, b, c, d
    std::array<double, 4> leakage_per_state{};   ///< 1 - |projection|^2 per input
    double truth_table_fidelity = 0.0;
    double phase_aware_fidelity = 0.0;
};

struct FidelityPair {
    double truth_table = 0.0;
    double phase_aware = 0.0;
};

/// Fidelities of a 4x4 matrix against the controlled-NOT target that swaps
/// the second pair of basis states. truth_table averages the population
/// landing on the target output; phase_aware is |tr(Ucnot^dag U)| / 4 after
/// optimizing one global phase and independent phases on the two control
/// sectors.
FidelityPair cnot_fidelity(const Eigen::Matrix4cd& gate);

/// Propagates each computing basis state through one pulse window and
/// projects the final states back onto the computing basis, stripping each
/// label's deterministic free-evolution phase exp(-i E0 t / hbar)
/// (interaction-picture convention). Column norm^2 + leakage = 1 per input.
GateResult extract_gate(const ModelParams& p, const PulseParams& pulse,
                        Frame frame = Frame::rotating);

}  // namespace smm
