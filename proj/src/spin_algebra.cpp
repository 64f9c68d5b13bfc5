#include "smm/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smm {

SpinQuantumNumber SpinQuantumNumber::of(double s) {
    const double twice = 2.0 * s;
    const long long rounded = std::llround(twice);
    if (!std::isfinite(s) || rounded < 0 || std::abs(twice - static_cast<double>(rounded)) > 1e-9)
        throw std::invalid_argument("spin quantum number must be a non-negative half-integer, got " +
                                    std::to_string(s));
    return SpinQuantumNumber{static_cast<int>(rounded)};
}

bool SpinQuantumNumber::valid_m(double m) const {
    const double steps = value() - m;  // 0 .. 2s in integer steps
    const long long k = std::llround(steps);
    return k >= 0 && k <= twice_s && std::abs(steps - static_cast<double>(k)) < 1e-9;
}

SpinOperatorSet spin_operators(SpinQuantumNumber s) {
    if (s.twice_s < 1)
        throw std::invalid_argument("spin operators need s >= 1/2");
    const int d = s.dimension();
    const double sv = s.value();

    Matrix sz = Matrix::Zero(d, d);
    Matrix sm = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = sv - k;
        sz(k, k) = m;
        // S- |m> = sqrt(s(s+1) - m(m-1)) |m-1>, row k+1 holds m-1
        if (k + 1 < d) sm(k + 1, k) = std::sqrt(sv * (sv + 1.0) - m * (m - 1.0));
    }
    Matrix sp = sm.adjoint();
    Matrix sx = 0.5 * (sp + sm);
    Matrix sy = Complex(0.0, -0.5) * (sp - sm);
    return SpinOperatorSet{s, std::move(sz), std::move(sp), std::move(sm),
                           std::move(sx), std::move(sy)};
}

Matrix embed_first(const Matrix& op, SpinQuantumNumber s) {
    const int d = s.dimension();
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("embed_first: operator dimension does not match 2s+1");
    return kron(op, Matrix::Identity(d, d));
}

Matrix embed_second(const Matrix& op, SpinQuantumNumber s) {
    const int d = s.dimension();
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("embed_second: operator dimension does not match 2s+1");
    return kron(Matrix::Identity(d, d), op);
}

int state_index(SpinQuantumNumber s, double m1, double m2) {
    if (!s.valid_m(m1) || !s.valid_m(m2))
        throw std::invalid_argument("state_index: m outside {-s..s} ladder");
    const int d = s.dimension();
    const int i1 = static_cast<int>(std::llround(s.value() - m1));
    const int i2 = static_cast<int>(std::llround(s.value() - m2));
    return i1 * d + i2;
}

ProductState index_state(SpinQuantumNumber s, int index) {
    const int d = s.dimension();
    if (index < 0 || index >= d * d)
        throw std::out_of_range("index_state: flat index outside the product space");
    const double m1 = s.value() - static_cast<double>(index / d);
    const double m2 = s.value() - static_cast<double>(index % d);
    return ProductState{m1, m2, index};
}

ProductState product_state(SpinQuantumNumber s, double m1, double m2) {
    return ProductState{m1, m2, state_index(s, m1, m2)};
}

double ladder_step_element(const SpinOperatorSet& ops, const ProductState& from,
                           const ProductState& to, int direction) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("ladder_step_element: direction must be +1 or -1");
    if (!ops.s.valid_m(from.m1) || !ops.s.valid_m(from.m2) || !ops.s.valid_m(to.m1) ||
        !ops.s.valid_m(to.m2))
        throw std::invalid_argument("ladder_step_element: m outside {-s..s} ladder");
    const Matrix& op = direction > 0 ? ops.s_plus : ops.s_minus;
    const double s = ops.s.value();
    const auto row = [s](double m) {
        return static_cast<Eigen::Index>(std::llround(s - m));
    };
    const double step = static_cast<double>(direction);
    double total = 0.0;
    if (to.m2 == from.m2 && to.m1 == from.m1 + step)
        total += op(row(to.m1), row(from.m1)).real();
    if (to.m1 == from.m1 && to.m2 == from.m2 + step)
        total += op(row(to.m2), row(from.m2)).real();
    return total;
}

}  // namespace smm
