// Acceptance gate for the dimer controlled-NOT simulator.
//
// Runs ten end-to-end checks, prints exactly one PASS/FAIL line per check
// plus INFO lines for documented reference discrepancies, and exits with the
// number of failed checks. Tolerances are pinned inline; reference values
// are stated next to the computation they gate.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smm/dimer_model.hpp"
#include "smm/dynamics.hpp"
#include "smm/perturbation.hpp"
#include "smm/spin_algebra.hpp"

using namespace smm;
namespace fs = std::filesystem;

namespace {

// Local physical constants (CODATA 2018), independent of the library.
constexpr double kMuB = 9.2740100783e-24;  // J/T
constexpr double kKB = 1.380649e-23;       // J/K
constexpr double kHbar = 1.054571817e-34;  // J*s
constexpr double kPi = std::numbers::pi;

int failures = 0;
const auto t0_total = std::chrono::steady_clock::now();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void line(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-22s  %s\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& msg) {
    std::printf("INFO  %s\n", msg.c_str());
    std::fflush(stdout);
}

// Independent closed form for the diagonal energy of |m1,m2> in kelvin.
double local_energy(const ModelParams& p, double m1, double m2) {
    return (m1 * m1 + m2 * m2) * p.d_kelvin +
           (m1 + m2) * p.g_factor * (kMuB / kKB) * p.bz_tesla + m1 * m2 * p.jz_kelvin;
}

ModelParams random_params(std::mt19937& rng) {
    std::uniform_real_distribution<double> dD(-1.2, -0.2), dg(1.5, 2.5), dB(0.0, 1.2),
        dJ(-0.3, 0.3);
    ModelParams p;
    p.d_kelvin = dD(rng);
    p.g_factor = dg(rng);
    p.bz_tesla = dB(rng);
    p.jz_kelvin = dJ(rng);
    p.jxy_kelvin = dJ(rng);
    return p;
}

bool within_factor(double value, double reference, double factor) {
    return value <= reference * factor && value >= reference / factor;
}

// ---------------------------------------------------------------------------

void criterion_1_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20260819);
    double worst = 0.0;
    for (int set = 0; set < 3; ++set) {
        const ModelParams p = random_params(rng);
        const Eigendecomposition eig = eigendecompose(h_zero(p));
        std::vector<double> expect;
        expect.reserve(100);
        for (int i = 0; i < 100; ++i) {
            const ProductState st = index_state(p.s, i);
            expect.push_back(local_energy(p, st.m1, st.m2));
        }
        std::sort(expect.begin(), expect.end());
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst, std::abs(eig.eigenvalues[i] - expect[i]));
    }
    const double secs = seconds_since(t0);
    line(1, "spectrum-exactness", worst <= 1e-10 && secs < 1.0,
         "max |numeric - analytic| = " + sci(worst) + " K over 3 random sets (tol 1e-10), " +
             sci(secs) + " s (limit 1 s)");
}

void criterion_2_resonant_rates() {
    const ModelParams p;
    const auto basis = computing_basis(p);
    const double r1 =
        drive_rate(p, PulseParams{3.8e-4, omega1(p), 1e-8}, basis[2], basis[3]);
    const double r2 =
        drive_rate(p, PulseParams{0.38e-4, omega1(p), 1e-7}, basis[2], basis[3]);
    const bool pass = std::abs(r1 / 1.0e8 - 1.0) <= 0.02 && std::abs(r2 / 1.0e7 - 1.0) <= 0.02;
    line(2, "resonant-rates", pass,
         "target pair: " + sci(r1) + " vs 1.0e8 and " + sci(r2) +
             " vs 1.0e7 1/s (tol 2%)");
}

void criterion_3_detuned_rates() {
    const ModelParams p;
    const auto basis = computing_basis(p);
    const ProductState a = basis[0], b = basis[1], d = basis[3];
    const ProductState d52 = product_state(p.s, -4.5, 2.5);
    const ProductState b52 = product_state(p.s, 4.5, 2.5);
    const ProductState b77 = product_state(p.s, 3.5, 3.5);

    const PulseParams fast{3.8e-4, omega1(p), 1e-8};
    const PulseParams slow{0.38e-4, omega1(p), 1e-7};

    bool pass = true;
    std::ostringstream detail;

    const double ab_fast = drive_rate(p, fast, a, b);
    const double ab_slow = drive_rate(p, slow, a, b);
    pass = pass && within_factor(ab_fast, 2.4e2, 2.0) && within_factor(ab_slow, 0.23, 2.0);
    detail << "spectator " << sci(ab_fast) << " vs 2.4e2 and " << sci(ab_slow)
           << " vs 0.23 (factor 2); ";

    const double w_d52 = drive_rate(p, fast, d, d52);
    const double w_b52 = drive_rate(p, fast, b, b52);
    const double w_b77 = drive_rate(p, fast, b, b77);
    pass = pass && within_factor(w_d52, 4.4e1, 10.0) && within_factor(w_b52, 8.8, 10.0) &&
           within_factor(w_b77, 3.6e2, 10.0);
    detail << "decaying " << sci(w_d52) << "/" << sci(w_b52) << "/" << sci(w_b77)
           << " vs 4.4e1/8.8/3.6e2 (factor 10); ";

    // Envelope bound O0^2 M^2 / (Delta^2 T) over every detuned drive record.
    double worst_margin = 0.0;
    for (const PulseParams& pulse : {fast, slow}) {
        const double omega0 = p.g_factor * kMuB * pulse.b_perp_tesla / kHbar;
        for (const TransitionRecord& rec : rate_table(p, pulse)) {
            if (rec.channel == TransitionChannel::exchange || rec.detuning_radps == 0.0)
                continue;
            const double bound =
                omega0 * omega0 * rec.ladder_element * rec.ladder_element /
                (rec.detuning_radps * rec.detuning_radps * pulse.duration_s);
            worst_margin = std::max(worst_margin, rec.rate_per_s / bound);
        }
    }
    pass = pass && worst_margin <= 1.0 + 1e-12;
    detail << "envelope max rate/bound = " << sci(worst_margin);
    line(3, "detuned-rates", pass, detail.str());
}

void criterion_4_splitting_identity() {
    std::mt19937 rng(481516);
    std::uniform_real_distribution<double> dJ(-0.5, 0.5);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        ModelParams p = random_params(rng);
        p.jz_kelvin = dJ(rng);
        if (std::abs(p.jz_kelvin) < 0.01) p.jz_kelvin = 0.04;
        const double split = omega1(p) - omega2(p);
        const double expect = 9.0 * p.jz_kelvin * kKB / kHbar;
        worst = std::max(worst, std::abs(split - expect) / std::abs(expect));
    }
    line(4, "splitting-identity", worst <= 1e-9,
         "max relative deviation of (w1 - w2) from 9 Jz kB/hbar = " + sci(worst) +
             " over 25 random draws (tol 1e-9)");
}

void criterion_5_rabi_crosscheck() {
    ModelParams p;
    p.jxy_kelvin = 0.0;
    const auto basis = computing_basis(p);
    const double w1 = omega1(p);
    const int c_idx = basis[2].index, d_idx = basis[3].index;
    const PulseParams probe{3.8e-4, w1, 1e-8};
    const double w_eff = effective_rabi_frequency(p, probe, basis[2], basis[3]);
    const double t_two_cycles = 2.0 * 2.0 * kPi / w_eff;

    const double eps_c = local_energy(p, -4.5, 4.5) * kKB / kHbar;
    const double eps_d = local_energy(p, -4.5, 3.5) * kKB / kHbar;

    Vector psi_pure = Vector::Zero(100);
    psi_pure[c_idx] = Complex(1.0, 0.0);
    Vector psi_mix = Vector::Zero(100);
    psi_mix[c_idx] = Complex(std::sqrt(0.4), 0.0);
    psi_mix[d_idx] = Complex(0.0, std::sqrt(0.6));

    double worst_amp = 0.0, worst_norm = 0.0;
    for (int k = 1; k <= 16; ++k) {
        const double duration = t_two_cycles * k / 16.0;
        const PulseParams pulse{3.8e-4, w1, duration};
        const bool lab_check = (k == 5 || k == 11 || k == 16);
        for (const Vector& psi0 : {psi_pure, psi_mix}) {
            const Complex window = std::polar(1.0, -w1 * duration / 2.0);
            const TwoLevelState start{psi0[c_idx], window * psi0[d_idx]};
            const TwoLevelState expect = rabi_evolve(start, w_eff, duration);
            for (int use_lab = 0; use_lab <= (lab_check ? 1 : 0); ++use_lab) {
                PropagateOptions opts;
                opts.frame = use_lab ? Frame::lab : Frame::rotating;
                opts.samples = 2;
                opts.subspace = std::vector<int>{c_idx, d_idx};
                const PropagationResult res = propagate(p, pulse, psi0, opts);
                const Complex ca =
                    std::polar(1.0, eps_c * duration) * res.final_state[c_idx];
                const Complex cb = window * std::polar(1.0, eps_d * duration) *
                                   res.final_state[d_idx];
                worst_amp = std::max({worst_amp, std::abs(ca - expect.c_a),
                                      std::abs(cb - expect.c_b)});
                worst_norm = std::max(worst_norm, res.max_norm_error);
            }
        }
    }
    line(5, "rabi-crosscheck", worst_amp <= 1e-6 && worst_norm <= 1e-9,
         "max two-level amplitude deviation = " + sci(worst_amp) +
             " (tol 1e-6) over 16 durations x 2 states, both frames; max norm drift = " +
             sci(worst_norm) + " (tol 1e-9)");
}

void criterion_6_gate_quality() {
    ModelParams p;
    p.jxy_kelvin = 0.0;
    const double b_cal = calibrate_pi_pulse(p, 1e-8);
    const GateResult g = extract_gate(p, PulseParams{b_cal, omega1(p), 1e-8});

    bool pass = g.truth_table_fidelity >= 0.99;
    double worst_leak = 0.0, worst_prob = 1.0;
    const int target_row[4] = {0, 1, 3, 2};
    for (int j = 0; j < 4; ++j) {
        worst_leak = std::max(worst_leak, g.leakage_per_state[j]);
        worst_prob = std::min(worst_prob, std::norm(g.matrix(target_row[j], j)));
    }
    pass = pass && worst_leak <= 5e-3 && worst_prob >= 0.99;
    line(6, "gate-quality", pass,
         "calibrated pi pulse (" + sci(b_cal * 1e4) +
             " G, 1e-8 s): truth-table fidelity = " + sci(g.truth_table_fidelity) +
             " (>= 0.99), max leakage = " + sci(worst_leak) +
             " (<= 5e-3), min mapped probability = " + sci(worst_prob) + " (>= 0.99)");

    const GateResult ref = extract_gate(p, PulseParams{3.8e-4, omega1(p), 1e-8});
    const double angle =
        effective_rabi_frequency(p, PulseParams{3.8e-4, omega1(p), 1e-8},
                                 computing_basis(p)[2], computing_basis(p)[3]) *
        1e-8;
    info("reference drive setting (3.8 G, 1e-8 s) reaches Rabi angle " + sci(angle) +
         " rad (not pi); truth-table fidelity = " + sci(ref.truth_table_fidelity) +
         ", phase-aware = " + sci(ref.phase_aware_fidelity) +
         " -- documented as-is, not a gate failure");
}

void criterion_7_frequency_selectivity() {
    ModelParams p;
    p.jxy_kelvin = 0.0;
    const double b_cal = calibrate_pi_pulse(p, 1e-8);
    const GateResult at_w2 = extract_gate(p, PulseParams{b_cal, omega2(p), 1e-8});
    const GateResult at_w1 = extract_gate(p, PulseParams{b_cal, omega1(p), 1e-8});
    const double leak_wrong = at_w2.leakage_per_state[0];
    const double leak_right = at_w1.leakage_per_state[0];
    line(7, "frequency-selectivity", leak_wrong > 0.1 && leak_right < 1e-3,
         "(9/2,9/2) leakage: " + sci(leak_wrong) + " when driven at w2 (> 0.1) vs " +
             sci(leak_right) + " at w1 (< 1e-3)");
}

void criterion_8_exchange_mixing() {
    const ModelParams p;  // jxy = 0.1 K
    const double c_radps = 0.5 * p.jxy_kelvin * 9.0 * kKB / kHbar;  // 4.5 Jxy in rad/s
    const double expect_freq = 2.0 * c_radps;
    const int b_idx = state_index(p.s, 4.5, 3.5);
    const int partner_idx = state_index(p.s, 3.5, 4.5);

    const double duration = 2.5 * 2.0 * kPi / expect_freq;
    const PulseParams pulse{0.0, omega1(p), duration};
    Vector psi0 = Vector::Zero(100);
    psi0[b_idx] = Complex(1.0, 0.0);
    PropagateOptions opts;
    opts.samples = 4001;
    const PropagationResult res = propagate(p, pulse, psi0, opts);

    double max_transfer = 0.0;
    for (int j = 0; j < opts.samples; ++j)
        max_transfer = std::max(max_transfer, res.populations(j, partner_idx));

    // Successive minima of the survival probability, parabolic refinement.
    std::vector<double> minima;
    for (int j = 1; j + 1 < opts.samples; ++j) {
        const double pm = res.populations(j - 1, b_idx);
        const double pc = res.populations(j, b_idx);
        const double pp = res.populations(j + 1, b_idx);
        if (pc < pm && pc <= pp) {
            const double denom = pm - 2.0 * pc + pp;
            const double dt = res.times[1] - res.times[0];
            minima.push_back(res.times[j] + 0.5 * dt * (pm - pp) / denom);
        }
    }
    bool pass = minima.size() >= 2 && max_transfer >= 0.999;
    double freq = 0.0;
    if (minima.size() >= 2) {
        const double spacing = (minima.back() - minima.front()) / (minima.size() - 1);
        freq = 2.0 * kPi / spacing;
        pass = pass && std::abs(freq / expect_freq - 1.0) <= 0.01;
    }

    // Faithful first-order formula evaluation against the independent oracle.
    const ProductState b_st = product_state(p.s, 4.5, 3.5);
    const ProductState partner_st = product_state(p.s, 3.5, 4.5);
    const double lib_rate = exchange_rate(p, 1e-8, b_st, partner_st);
    const double local_rate = std::pow(0.45 * (kKB / kHbar) * 1e-8, 2) / 1e-8;
    pass = pass && std::abs(lib_rate / local_rate - 1.0) <= 1e-12;

    line(8, "exchange-mixing", pass,
         "population oscillation at " + sci(freq) + " rad/s vs 2*(4.5 Jxy kB/hbar) = " +
             sci(expect_freq) + " (tol 1%), peak transfer = " + sci(max_transfer) +
             " (>= 0.999); degenerate-pair formula evaluation matches the independent "
             "oracle to " +
             sci(std::abs(lib_rate / local_rate - 1.0)));
    info("quoted reference exchange rates (8.9e-13, 3.8e-21, 1.3e-20 1/s at T = 1e-8 s) "
         "are not reproducible from the stated first-order formula, which evaluates to " +
         sci(lib_rate) + ", " + sci(exchange_rate(p, 1e-8, product_state(p.s, -4.5, 4.5),
                                                  product_state(p.s, -3.5, 3.5))) +
         ", " + sci(exchange_rate(p, 1e-8, product_state(p.s, -4.5, 3.5),
                                  product_state(p.s, -3.5, 2.5))) +
         " 1/s -- a 16-to-26 order-of-magnitude discrepancy, recorded here and not gated");
}

void criterion_9_frame_equivalence() {
    ModelParams p;
    p.jxy_kelvin = 0.0;
    const double b_cal = calibrate_pi_pulse(p, 1e-8);
    const PulseParams pulse{b_cal, omega1(p), 1e-8};
    Vector psi0 = Vector::Zero(100);
    psi0[90] = Complex(1.0, 0.0);

    PropagateOptions opts;
    opts.samples = 41;
    opts.frame = Frame::rotating;
    const PropagationResult rot = propagate(p, pulse, psi0, opts);

    const auto t0 = std::chrono::steady_clock::now();
    opts.frame = Frame::lab;
    const PropagationResult lab = propagate(p, pulse, psi0, opts);
    const double lab_secs = seconds_since(t0);

    const double max_diff = (rot.populations - lab.populations).cwiseAbs().maxCoeff();
    const double elapsed = seconds_since(t0_total);
    line(9, "frame-equivalence", max_diff <= 1e-7 && elapsed < 120.0,
         "max |rotating - lab| population difference = " + sci(max_diff) +
             " (tol 1e-7) on the calibrated gate pulse, " +
             std::to_string(lab.steps_taken) + " lab steps in " + sci(lab_secs) +
             " s; acceptance elapsed " + sci(elapsed) + " s (limit 120 s)");
}

void criterion_10_cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "dimersim_acceptance";
    fs::create_directories(dir);
    const fs::path cfg = dir / "params.conf";
    {
        std::ofstream out(cfg);
        out << "d_kelvin = -0.72\ng_factor = 2.0\nbz_tesla = 0.5\njz_kelvin = 0.1\n"
               "jxy_kelvin = 0.0\nb_perp_gauss = 5.953977917855475\n"
               "omega_mode = omega1\nduration_s = 1e-8\nframe = rotating\n";
    }
    const std::vector<std::string> commands = {
        "gaps --config \"" + cfg.string() + "\"",
        "rates",
        "spectrum --sweep-points 11",
        "evolve --samples 9 --duration-s 1e-9",
        "gate --jxy-kelvin 0",
        "calibrate",
    };

    bool pass = true;
    std::string first_failure;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::array<std::string, 2> payload;
        for (int run = 0; run < 2; ++run) {
            const fs::path out = dir / ("out_" + std::to_string(i) + "_" +
                                        std::to_string(run) + ".txt");
            const std::string cmd = std::string("\"") + DIMERSIM_BIN + "\" " +
                                    commands[i] + " -o \"" + out.string() +
                                    "\" 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                pass = false;
                if (first_failure.empty()) first_failure = "nonzero exit: " + commands[i];
                break;
            }
            std::ifstream in(out, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            payload[run] = ss.str();
        }
        if (pass && (payload[0].empty() || payload[0] != payload[1])) {
            pass = false;
            if (first_failure.empty()) first_failure = "outputs differ: " + commands[i];
        }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    line(10, "cli-determinism", pass,
         pass ? "6 subcommands x 2 runs each, byte-identical outputs (config file and "
                "flag paths)"
              : first_failure);
}

}  // namespace

int main() {
    std::printf("acceptance gate: exchange-coupled spin-9/2 dimer simulator\n");
    criterion_1_spectrum();
    criterion_2_resonant_rates();
    criterion_3_detuned_rates();
    criterion_4_splitting_identity();
    criterion_5_rabi_crosscheck();
    criterion_6_gate_quality();
    criterion_7_frequency_selectivity();
    criterion_8_exchange_mixing();
    criterion_9_frame_equivalence();
    criterion_10_cli_determinism();
    std::printf("RESULT  %d/10 criteria passed, total elapsed %s s\n", 10 - failures,
                sci(seconds_since(t0_total)).c_str());
    return failures;
}
