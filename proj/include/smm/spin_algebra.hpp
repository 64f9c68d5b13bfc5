#pragma once

#include <complex>

#include <Eigen/Dense>

namespace smm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Spin quantum number stored as 2s, so half-integer values stay exact.
struct SpinQuantumNumber {
    int twice_s = 9;

    /// Validating factory; throws std::invalid_argument unless 2s is a
    /// non-negative integer (within 1e-9 of one).
    static SpinQuantumNumber of(double s);

    double value() const { return 0.5 * twice_s; }
    int dimension() const { return twice_s + 1; }
    /// True if m is one of s, s-1, ..., -s.
    bool valid_m(double m) const;
};

/// Ladder and Cartesian spin matrices in the |s,m> basis with m descending
/// from +s (row 0) to -s. Dense complex throughout; safe to copy and to
/// read concurrently.
struct SpinOperatorSet {
    SpinQuantumNumber s;
    Matrix sz, s_plus, s_minus, sx, sy;
};

/// Builds the operator set from <m-1|S-|m> = sqrt(s(s+1) - m(m-1)).
/// Requires s >= 1/2.
SpinOperatorSet spin_operators(SpinQuantumNumber s);

/// Kronecker product with the first factor on the slow index, matching the
/// row-major product-basis convention used everywhere in this library.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
        a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b.derived();
    return out;
}

/// op acting on unit 1 of the two-spin product space: op (x) identity.
/// op must be (2s+1) x (2s+1).
Matrix embed_first(const Matrix& op, SpinQuantumNumber s);

/// op acting on unit 2: identity (x) op.
Matrix embed_second(const Matrix& op, SpinQuantumNumber s);

/// One |m1, m2> product-basis label. index is the flat row-major position:
/// m1 is the slow index, m2 the fast one, both descending from +s.
struct ProductState {
    double m1 = 0.0;
    double m2 = 0.0;
    int index = 0;
};

/// Flat index of |m1, m2>; throws std::invalid_argument for invalid m.
int state_index(SpinQuantumNumber s, double m1, double m2);

/// Inverse of state_index; throws std::out_of_range for a bad index.
ProductState index_state(SpinQuantumNumber s, int index);

/// Convenience: label plus index in one step.
ProductState product_state(SpinQuantumNumber s, double m1, double m2);

/// <to| S1^dir + S2^dir |from> for direction +1 (raising) or -1 (lowering).
/// Nonzero only when exactly one unit moves one ladder step; the element is
/// read from the operator matrices, never recomputed from the closed form.
double ladder_step_element(const SpinOperatorSet& ops, const ProductState& from,
                           const ProductState& to, int direction);

}  // namespace smm
