#include "smm/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smm/constants.hpp"

namespace smm {

namespace {

constexpr double pi = std::numbers::pi;

bool in_computing_basis(const std::array<ProductState, 4>& basis, int index) {
    for (const auto& st : basis)
        if (st.index == index) return true;
    return false;
}

/// Dimensionless element <to| S1+-S2-+ |from> of the transverse exchange
/// operator, without the Jxy/2 prefactor. Zero unless the pair differs by
/// one opposite step on each unit.
double exchange_operator_element(const SpinOperatorSet& ops, const ProductState& from,
                                 const ProductState& to) {
    const double s = ops.s.value();
    const auto row = [s](double m) {
        return static_cast<Eigen::Index>(std::llround(s - m));
    };
    if (to.m1 == from.m1 + 1.0 && to.m2 == from.m2 - 1.0)
        return ops.s_plus(row(to.m1), row(from.m1)).real() *
               ops.s_minus(row(to.m2), row(from.m2)).real();
    if (to.m1 == from.m1 - 1.0 && to.m2 == from.m2 + 1.0)
        return ops.s_minus(row(to.m1), row(from.m1)).real() *
               ops.s_plus(row(to.m2), row(from.m2)).real();
    return 0.0;
}

void validate_pair(const ModelParams& p, const ProductState& from, const ProductState& to) {
    if (!p.s.valid_m(from.m1) || !p.s.valid_m(from.m2) || !p.s.valid_m(to.m1) ||
        !p.s.valid_m(to.m2))
        throw std::invalid_argument("transition states must carry valid m labels");
}

}  // namespace

void PulseParams::validate() const {
    if (!std::isfinite(b_perp_tesla) || !std::isfinite(omega_radps) || !std::isfinite(duration_s))
        throw std::invalid_argument("pulse parameter not finite");
    if (duration_s <= 0.0) throw std::invalid_argument("pulse duration must be positive");
    if (b_perp_tesla < 0.0) throw std::invalid_argument("transverse field must be non-negative");
    if (omega_radps < 0.0) throw std::invalid_argument("carrier frequency must be non-negative");
}

double delta_T(double omega_radps, double duration_s) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("delta_T: duration must be positive");
    if (omega_radps == 0.0) return duration_s / (2.0 * pi);
    return std::sin(0.5 * omega_radps * duration_s) / (pi * omega_radps);
}

std::complex<double> drive_amplitude(const ModelParams& p, const PulseParams& pulse,
                                     const ProductState& from, const ProductState& to) {
    p.validate();
    pulse.validate();
    validate_pair(p, from, to);
    const SpinOperatorSet ops = spin_operators(p.s);
    const double m_raise = ladder_step_element(ops, from, to, +1);
    const double m_lower = ladder_step_element(ops, from, to, -1);
    if (m_raise == 0.0 && m_lower == 0.0) return {0.0, 0.0};
    const double w_gap = gap(p, from, to).gap_radps;
    const double window = m_raise * delta_T(w_gap + pulse.omega_radps, pulse.duration_s) +
                          m_lower * delta_T(w_gap - pulse.omega_radps, pulse.duration_s);
    const double scale =
        pi * p.g_factor * constants.mu_b * pulse.b_perp_tesla / constants.hbar;
    // prefactor 1/(i hbar) from first-order time-dependent perturbation theory
    return std::complex<double>(0.0, -1.0) * scale * window;
}

double drive_rate(const ModelParams& p, const PulseParams& pulse, const ProductState& from,
                  const ProductState& to) {
    return std::norm(drive_amplitude(p, pulse, from, to)) / pulse.duration_s;
}

std::complex<double> exchange_amplitude(const ModelParams& p, double duration_s,
                                        const ProductState& from, const ProductState& to) {
    p.validate();
    if (!(duration_s > 0.0))
        throw std::invalid_argument("exchange_amplitude: duration must be positive");
    validate_pair(p, from, to);
    const SpinOperatorSet ops = spin_operators(p.s);
    const double op_elem = exchange_operator_element(ops, from, to);
    if (op_elem == 0.0) return {0.0, 0.0};
    const double elem_joule = 0.5 * p.jxy_kelvin * op_elem * constants.k_b;
    const double w_gap = gap(p, from, to).gap_radps;
    const double value =
        (2.0 * pi / constants.hbar) * elem_joule * delta_T(w_gap, duration_s);
    return std::complex<double>(0.0, -1.0) * value;
}

double exchange_rate(const ModelParams& p, double duration_s, const ProductState& from,
                     const ProductState& to) {
    return std::norm(exchange_amplitude(p, duration_s, from, to)) / duration_s;
}

std::vector<TransitionRecord> rate_table(const ModelParams& p, const PulseParams& pulse) {
    p.validate();
    pulse.validate();
    const SpinOperatorSet ops = spin_operators(p.s);
    const auto basis = computing_basis(p);

    std::vector<TransitionRecord> drive_records;
    std::vector<TransitionRecord> exchange_records;

    for (const ProductState& from : basis) {
        // Single-unit drive moves: (m1 +- 1, m2) and (m1, m2 +- 1).
        const double moves[4][2] = {{from.m1 + 1.0, from.m2},
                                    {from.m1 - 1.0, from.m2},
                                    {from.m1, from.m2 + 1.0},
                                    {from.m1, from.m2 - 1.0}};
        for (const auto& mv : moves) {
            if (!p.s.valid_m(mv[0]) || !p.s.valid_m(mv[1])) continue;
            const ProductState to = product_state(p.s, mv[0], mv[1]);
            TransitionRecord rec;
            rec.from = from;
            rec.to = to;
            const EnergyGapEntry g = gap(p, from, to);
            rec.channel = g.gap_kelvin > 0.0 ? TransitionChannel::drive_absorption
                                             : TransitionChannel::drive_emission;
            const double m_raise = ladder_step_element(ops, from, to, +1);
            const double m_lower = ladder_step_element(ops, from, to, -1);
            // Exactly one ladder direction connects a single-step pair, so
            // only one spectral window contributes and its argument is the
            // record's detuning.
            if (m_lower != 0.0) {
                rec.detuning_radps = g.gap_radps - pulse.omega_radps;
                rec.ladder_element = std::abs(m_lower);
            } else {
                rec.detuning_radps = g.gap_radps + pulse.omega_radps;
                rec.ladder_element = std::abs(m_raise);
            }
            rec.amplitude = drive_amplitude(p, pulse, from, to);
            rec.rate_per_s = std::norm(rec.amplitude) / pulse.duration_s;
            rec.non_perturbative = std::abs(rec.amplitude) > 0.3;
            rec.connects_computing_basis = in_computing_basis(basis, to.index);
            drive_records.push_back(rec);
        }

        // Transverse-exchange moves: (m1 +- 1, m2 -+ 1).
        const double xmoves[2][2] = {{from.m1 + 1.0, from.m2 - 1.0},
                                     {from.m1 - 1.0, from.m2 + 1.0}};
        for (const auto& mv : xmoves) {
            if (!p.s.valid_m(mv[0]) || !p.s.valid_m(mv[1])) continue;
            const ProductState to = product_state(p.s, mv[0], mv[1]);
            TransitionRecord rec;
            rec.from = from;
            rec.to = to;
            rec.channel = TransitionChannel::exchange;
            const EnergyGapEntry g = gap(p, from, to);
            rec.detuning_radps = g.gap_radps;
            rec.ladder_element = std::abs(exchange_operator_element(ops, from, to));
            rec.amplitude = exchange_amplitude(p, pulse.duration_s, from, to);
            rec.rate_per_s = std::norm(rec.amplitude) / pulse.duration_s;
            rec.non_perturbative = std::abs(rec.amplitude) > 0.3;
            rec.connects_computing_basis = in_computing_basis(basis, to.index);
            exchange_records.push_back(rec);
        }
    }

    const auto by_rate_then_index = [](const TransitionRecord& a, const TransitionRecord& b) {
        if (a.rate_per_s != b.rate_per_s) return a.rate_per_s > b.rate_per_s;
        if (a.from.index != b.from.index) return a.from.index < b.from.index;
        return a.to.index < b.to.index;
    };
    std::sort(drive_records.begin(), drive_records.end(), by_rate_then_index);
    std::sort(exchange_records.begin(), exchange_records.end(), by_rate_then_index);

    drive_records.insert(drive_records.end(), exchange_records.begin(), exchange_records.end());
    return drive_records;
}

}  // namespace smm
