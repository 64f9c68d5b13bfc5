#pragma once

#include <array>

#include <Eigen/Dense>

#include "smm/spin_algebra.hpp"

namespace smm {

/// Model parameters for the exchange-coupled dimer of two identical
/// giant-spin units. Energies in Kelvin, field in Tesla.
///
/// Hamiltonian (unit i):   h_i = D Sz_i^2 + g (mu_B/k_B) Bz Sz_i
/// Dimer:                  h   = h_1 + h_2 + Jz Sz_1 Sz_2
///                               + (Jxy/2)(S1+ S2- + S1- S2+)
struct ModelParams {
    double d_kelvin = -0.72;   ///< easy-axis anisotropy (negative: easy axis)
    double g_factor = 2.0;
    double bz_tesla = 0.5;     ///< longitudinal bias field
    double jz_kelvin = 0.1;    ///< Ising part of the exchange coupling
    double jxy_kelvin = 0.1;   ///< transverse part of the exchange coupling
    SpinQuantumNumber s{9};    ///< spin of each unit, default 9/2

    /// Throws std::invalid_argument on non-finite values or g <= 0.
    void validate() const;
};

/// Energy difference between two product states, in both unit systems.
struct EnergyGapEntry {
    ProductState from, to;
    double gap_kelvin = 0.0;
    double gap_radps = 0.0;  ///< gap_kelvin * k_B / hbar
};

/// Eigensystem of a Hermitian matrix, eigenvalues ascending.
struct Eigendecomposition {
    Eigen::VectorXd eigenvalues;   ///< Kelvin (or the input's unit)
    Matrix eigenvectors;           ///< columns, orthonormal
};

double kelvin_to_angular(double e_kelvin);
double angular_to_kelvin(double omega_radps);

/// Single-unit anisotropy + Zeeman term embedded in the product space.
/// unit_index is 1 or 2; anything else throws std::invalid_argument.
Matrix h_single(const ModelParams& p, int unit_index);

/// Diagonal dimer Hamiltonian: both units plus the Ising exchange term.
Matrix h_zero(const ModelParams& p);

/// Full dimer Hamiltonian including the transverse exchange term.
Matrix h_full(const ModelParams& p);

/// Closed-form diagonal energy of |m1, m2>:
///   (m1^2 + m2^2) D + (m1 + m2) g (mu_B/k_B) Bz + m1 m2 Jz   [Kelvin]
double analytic_energy(const ModelParams& p, double m1, double m2);

/// Gap from a to b (positive when b lies above a).
EnergyGapEntry gap(const ModelParams& p, const ProductState& a, const ProductState& b);

/// Splitting 9 Jz k_B / hbar between the two conditional resonance
/// frequencies of the computing basis [rad/s].
double delta_omega(const ModelParams& p);

/// Self-adjoint eigensolve. Input must be Hermitian to 1e-10 (max entry of
/// |H - H^dag|), otherwise std::invalid_argument.
Eigendecomposition eigendecompose(const Matrix& h);

/// The four computing states in logic order |00>, |01>, |10>, |11>:
///   (s, s), (s, s-1), (-s, s), (-s, s-1).
std::array<ProductState, 4> computing_basis(const ModelParams& p);

/// Resonance frequency of the target pair |10> <-> |11> [rad/s].
double omega1(const ModelParams& p);

/// Resonance frequency of the spectator pair |00> <-> |01> [rad/s].
double omega2(const ModelParams& p);

}  // namespace smm
