#include "smm/dimer_model.hpp"

#include <cmath>
#include <stdexcept>

#include "smm/constants.hpp"

namespace smm {

void ModelParams::validate() const {
    const double vals[] = {d_kelvin, g_factor, bz_tesla, jz_kelvin, jxy_kelvin};
    for (double v : vals)
        if (!std::isfinite(v)) throw std::invalid_argument("model parameter not finite");
    if (g_factor <= 0.0) throw std::invalid_argument("g factor must be positive");
    if (s.twice_s < 1) throw std::invalid_argument("unit spin must be at least 1/2");
}

double kelvin_to_angular(double e_kelvin) { return e_kelvin * constants.kb_over_hbar(); }

double angular_to_kelvin(double omega_radps) { return omega_radps / constants.kb_over_hbar(); }

Matrix h_single(const ModelParams& p, int unit_index) {
    p.validate();
    if (unit_index != 1 && unit_index != 2)
        throw std::invalid_argument("h_single: unit_index must be 1 or 2");
    const SpinOperatorSet ops = spin_operators(p.s);
    const Matrix h = p.d_kelvin * (ops.sz * ops.sz) +
                     p.g_factor * constants.mu_b_over_kb() * p.bz_tesla * ops.sz;
    return unit_index == 1 ? embed_first(h, p.s) : embed_second(h, p.s);
}

Matrix h_zero(const ModelParams& p) {
    p.validate();
    const SpinOperatorSet ops = spin_operators(p.s);
    const Matrix sz1 = embed_first(ops.sz, p.s);
    const Matrix sz2 = embed_second(ops.sz, p.s);
    return h_single(p, 1) + h_single(p, 2) + p.jz_kelvin * (sz1 * sz2).eval();
}

Matrix h_full(const ModelParams& p) {
    p.validate();
    const SpinOperatorSet ops = spin_operators(p.s);
    const Matrix flip = embed_first(ops.s_plus, p.s) * embed_second(ops.s_minus, p.s) +
                        embed_first(ops.s_minus, p.s) * embed_second(ops.s_plus, p.s);
    return h_zero(p) + 0.5 * p.jxy_kelvin * flip;
}

double analytic_energy(const ModelParams& p, double m1, double m2) {
    p.validate();
    if (!p.s.valid_m(m1) || !p.s.valid_m(m2))
        throw std::invalid_argument("analytic_energy: m outside the ladder");
    return (m1 * m1 + m2 * m2) * p.d_kelvin +
           (m1 + m2) * p.g_factor * constants.mu_b_over_kb() * p.bz_tesla +
           m1 * m2 * p.jz_kelvin;
}

EnergyGapEntry gap(const ModelParams& p, const ProductState& a, const ProductState& b) {
    const double dk = analytic_energy(p, b.m1, b.m2) - analytic_energy(p, a.m1, a.m2);
    return EnergyGapEntry{a, b, dk, kelvin_to_angular(dk)};
}

double delta_omega(const ModelParams& p) {
    p.validate();
    return kelvin_to_angular(2.0 * p.s.value() * p.jz_kelvin);
}

Eigendecomposition eigendecompose(const Matrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigendecompose: matrix not square");
    const double herm_err = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-10)
        throw std::invalid_argument("eigendecompose: input not Hermitian (max deviation " +
                                    std::to_string(herm_err) + ")");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");
    return Eigendecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

std::array<ProductState, 4> computing_basis(const ModelParams& p) {
    const double sv = p.s.value();
    return {product_state(p.s, sv, sv), product_state(p.s, sv, sv - 1.0),
            product_state(p.s, -sv, sv), product_state(p.s, -sv, sv - 1.0)};
}

double omega1(const ModelParams& p) {
    const auto basis = computing_basis(p);
    return gap(p, basis[2], basis[3]).gap_radps;
}

double omega2(const ModelParams& p) {
    const auto basis = computing_basis(p);
    return gap(p, basis[0], basis[1]).gap_radps;
}

}  // namespace smm
