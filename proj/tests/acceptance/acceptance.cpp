// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include "ltp/cases.hpp"
#include "ltp/hss_analysis.hpp"
#include "ltp/pss_solver.hpp"
#include "ltp/sweep.hpp"
#include "ltp/td_oracle.hpp"
#include "support.hpp"

#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace ltp;

namespace {

constexpr double kWaveformRms = 0.01;        // per state, per unit
constexpr double kNegativeSequence = 0.02;   // |I-| / |I+|
constexpr double kOracleStep = 50e-6;
constexpr double kOracleHorizonPeriods = 100;
constexpr double kStableUpTo = 25.0;          // Hz
constexpr double kHighPll = 50.0;             // Hz
constexpr double kHighUnbalance = 0.4;        // p.u.
constexpr double kMinConvergedFraction = 0.95;
constexpr double kCriticalRe = 0.065;
constexpr double kCriticalReBand = 0.05;
constexpr double kCriticalReCeiling = 5.0;
constexpr double kSpectralTol = 1e-10;
constexpr double kJacobianTol = 1e-5;
constexpr double kConjugateTol = 1e-10;
constexpr double kShiftCopyTol = 1e-9;
constexpr double kSuperlinearRatio = 0.5;

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& text) {
    std::printf("   info: %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

using Overrides = std::vector<std::pair<std::string, double>>;

cases::CaseModels build(const std::string& name, const Overrides& set) {
    auto p = cases::case_defaults(name);
    for (const auto& [k, v] : set) p.set(k, v);
    return cases::build_case(name, p);
}

// Largest per-state RMS error between the solver waveform and the oracle's last period from a zero start.
double oracle_mismatch(const SystemModel& model, const SolverResult& r) {
    const double T = model.period();
    const auto traj =
        oracle::integrate(model, CVector::Zero(model.n_states), 0.0, kOracleHorizonPeriods * T, kOracleStep);
    return oracle::compare_waveforms(r.waveforms, oracle::last_period(traj, T)).rms.maxCoeff();
}

void waveform_scenarios(const char* id, const std::string& name, const std::vector<std::pair<std::string, Overrides>>& runs,
                        bool check_balance) {
    bool pass = true;
    std::string detail;
    for (const auto& [label, set] : runs) {
        const auto models = build(name, set);
        const SolverResult r = solve_pss(models.closed_loop, SolverConfig{});
        const double rms = oracle_mismatch(models.closed_loop, r);
        bool ok = r.converged && rms <= kWaveformRms;
        detail += label + ": rms " + fmt("%.2e", rms);
        if (check_balance) {
            const int ic = models.closed_loop.state_index("i_c");
            const double ratio = std::abs(r.X.at(-1, ic)) / std::abs(r.X.at(1, ic));
            ok = ok && ratio < kNegativeSequence;
            detail += fmt(", |I-|/|I+| %.2e", ratio);
        }
        detail += "; ";
        pass = pass && ok;
    }
    report(id, pass, detail);
}

void a1() {
    waveform_scenarios("A1", "case1",
                       {{"k_sym_c=0.1", {{"k_sym_c", 0.1}}},
                        {"k_sym_g=0.1", {{"k_sym_g", 0.1}}},
                        {"|U_gb|=0.5", {{"u_gbeta_mag", 0.5}}}},
                       false);
}

void a2() {
    waveform_scenarios("A2", "case2", {{"balanced", {}}, {"|U_gb|=0.5", {{"u_gbeta_mag", 0.5}}}}, true);
}

void a3() {
    SweepSpec spec;
    spec.axis1 = {"alpha_pll", "Hz", {}};
    spec.axis2 = {"u_gbeta_mag", "pu", {}};
    for (int i = 0; i < 23; ++i) spec.axis1.values.push_back(5.0 + 2.5 * i);
    for (int j = 0; j < 11; ++j) spec.axis2.values.push_back(0.05 * j);
    spec.base_params = cases::case1_defaults();
    const SweepResult r = run_sweep([](const ParameterSet& p) { return cases::build_case1(p).closed_loop; }, spec);

    int low_unstable = 0, high_cells = 0, high_unstable = 0;
    double onset = std::numeric_limits<double>::infinity();
    for (const auto& c : r.cells) {
        if (!c.converged) continue;
        const bool unstable = c.re_weakest > 0.0;
        if (c.param1 <= kStableUpTo && unstable) ++low_unstable;
        if (c.param1 >= kHighPll && c.param2 >= kHighUnbalance) {
            ++high_cells;
            high_unstable += unstable ? 1 : 0;
        }
        if (unstable) onset = std::min(onset, c.param1);
    }
    const double converged = static_cast<double>(r.converged_count()) / static_cast<double>(r.cells.size());
    const bool pass = converged >= kMinConvergedFraction && low_unstable == 0 && high_cells > 0 &&
                      high_unstable == high_cells;
    report("A3", pass,
           std::to_string(r.rows) + "x" + std::to_string(r.cols) + " grid, converged " +
               std::to_string(r.converged_count()) + "/" + std::to_string(r.cells.size()) +
               ", unstable cells with alpha_pll <= 25 Hz: " + std::to_string(low_unstable) +
               ", unstable at alpha_pll >= 50 Hz and |U_gb| >= 0.4: " + std::to_string(high_unstable) + "/" +
               std::to_string(high_cells));
    info(fmt("lowest unstable alpha_pll on the grid: %.1f Hz", onset));
}

struct Probe {
    double re_solver = 0.0;
    double rate = 0.0;
    bool agree = false;
};

Probe probe_case2(double alpha_c, double k_sym_g) {
    const auto models = build("case2", {{"alpha_c", alpha_c}, {"k_sym_g", k_sym_g}});
    const SolverResult r = solve_pss(models.closed_loop, SolverConfig{});
    Probe p;
    p.re_solver = analyze_modes(r.hss).weakest.real();
    oracle::ProbeConfig cfg;
    cfg.state = models.closed_loop.state_index("i_c");
    p.rate = oracle::perturbation_growth(models.closed_loop, r.waveforms.col(0), cfg).rate;
    p.agree = (p.rate > 0.0) == (p.re_solver > 0.0);
    return p;
}

void a4() {
    const Probe critical = probe_case2(170.0, 2.8);
    const Probe defaults = probe_case2(200.0, 1.0);
    const Probe inside = probe_case2(160.0, 2.8);
    const bool pass = critical.agree && defaults.agree && inside.agree && defaults.rate < 0.0 && inside.rate > 0.0;
    report("A4", pass,
           fmt("sign agreement: (170, 2.8) solver %+.3f oracle %+.3f; ", critical.re_solver, critical.rate) +
               fmt("(200, 1) solver %+.3f oracle %+.3f; ", defaults.re_solver, defaults.rate) +
               fmt("(160, 2.8) solver %+.3f oracle %+.3f", inside.re_solver, inside.rate));
    const bool positive = critical.re_solver > 0.0 && critical.re_solver < kCriticalReCeiling;
    info(std::string("Re at (170, 2.8) positive and below 5: ") + (positive ? "yes" : "NO") +
         fmt(" (%.4f)", critical.re_solver));
    info(std::string("Re at (170, 2.8) within 0.065 +- 0.05: ") +
         (std::abs(critical.re_solver - kCriticalRe) <= kCriticalReBand ? "yes" : "NO"));
    info("(160, 2.8) is the unstable side of the boundary on this model");
}

void a5() {
    const SolverResult r1 = solve_pss(build("case1", {}).closed_loop, SolverConfig{});
    const SolverResult r2 = solve_pss(build("case2", {}).closed_loop, SolverConfig{});
    const int d1 = r1.hss.dimension(), d2 = r2.hss.dimension();
    report("A5", d1 == 54 && d2 == 162, "dimensions " + std::to_string(d1) + " and " + std::to_string(d2));
}

double nearest(const std::vector<Complex>& set, Complex z) {
    double best = std::numeric_limits<double>::infinity();
    for (Complex e : set) best = std::min(best, std::abs(e - z));
    return best;
}

void a6() {
    test::Gen gen(2024);
    std::vector<std::string> failed;

    // spectral round trip and convolution
    double spectral = 0.0;
    const HarmonicGrid grid(0.02, 50e-6, 8);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralVector a = gen.spectrum(8, 2, 4), b = gen.spectrum(8, 2, 4);
        const CMatrix sa = spectrum_to_samples(a, grid), sb = spectrum_to_samples(b, grid);
        spectral = std::max(spectral, (samples_to_spectrum(sa, grid, 8).stacked() - a.stacked()).cwiseAbs().maxCoeff());
        const SpectralVector prod = samples_to_spectrum(CMatrix(sa.cwiseProduct(sb)), grid, 8);
        for (int k = -8; k <= 8; ++k) {
            CVector conv = CVector::Zero(2);
            for (int l = -4; l <= 4; ++l)
                if (std::abs(k - l) <= 4) conv += a.coeff(l).cwiseProduct(b.coeff(k - l));
            spectral = std::max(spectral, (prod.coeff(k) - conv).cwiseAbs().maxCoeff());
        }
    }
    if (spectral > kSpectralTol) failed.push_back("spectral");

    // Jacobians against central differences
    double jac = 0.0;
    for (const std::string name : {"case1", "case2"}) {
        const auto models = build(name, {{"k_sym_c", 0.4}, {"k_sym_g", 1.7}});
        for (const SystemModel* m : {&models.closed_loop, &models.open_loop}) {
            for (int trial = 0; trial < 20; ++trial) {
                const double t = gen.uniform(0.0, 0.02);
                const CVector x = gen.paired_state(*m, 1.2);
                CVector u(2);
                u(0) = gen.complex(1.2);
                u(1) = std::conj(u(0));
                const Jacobians J = eval_jacobians(*m, t, x, u);
                const CMatrix fd = fd_jacobian(*m, t, x, u, 1e-6);
                jac = std::max(jac, (J.A - fd).cwiseAbs().maxCoeff() / (1.0 + J.A.cwiseAbs().maxCoeff()));
            }
        }
    }
    if (jac > kJacobianTol) failed.push_back("jacobian");

    // conjugate pairs through Newton iterates
    double conj = 0.0;
    for (const std::string name : {"case1", "case2"}) {
        const SystemModel m = build(name, {{"k_sym_c", 0.3}, {"u_gbeta_mag", 0.6}}).closed_loop;
        SpectralVector X = initial_guess(m, 4);
        for (int it = 0; it < 8; ++it) {
            const NewtonStep s = newton_step(m, X, SolverConfig{}.grid());
            X.stacked() += s.delta.stacked();
            conj = std::max(conj, X.conjugate_defect(m.conjugate_pairs));
            if (s.step_norm < 1e-9) break;
        }
    }
    if (conj > kConjugateTol) failed.push_back("conjugate");

    // LTI shift copies
    double shift = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix M = gen.matrix(3, 3, 80.0);
        const SystemModel m = test::lti(M, CMatrix::Zero(3, 1));
        const HarmonicGrid g(0.02, 50e-6, 3);
        const auto eig = hss_eigenvalues(linearize(m, CMatrix::Zero(3, g.samples()), g, 3));
        Eigen::ComplexEigenSolver<CMatrix> es(M);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (int k = -3; k <= 3; ++k)
                shift = std::max(shift, nearest(eig, es.eigenvalues()(i) + Complex(0, k * test::kOmega50)));
    }
    if (shift > kShiftCopyTol) failed.push_back("shift-copies");

    // superlinear final steps
    double ratio = 0.0;
    const std::vector<std::pair<std::string, Overrides>> bench = {{"case1", {{"k_sym_c", 0.1}}},
                                                                  {"case1", {{"k_sym_g", 0.1}}},
                                                                  {"case1", {{"u_gbeta_mag", 0.5}}},
                                                                  {"case2", {}},
                                                                  {"case2", {{"u_gbeta_mag", 0.5}}}};
    for (const auto& [name, set] : bench) {
        const auto& h = solve_pss(build(name, set).closed_loop, SolverConfig{}).residual_history;
        ratio = std::max(ratio, h.size() < 2 ? 1.0 : h.back() / h[h.size() - 2]);
    }
    if (!(ratio < kSuperlinearRatio)) failed.push_back("superlinear");

    // sweep determinism
    SweepSpec spec;
    spec.axis1 = {"alpha_pll", "Hz", {15.0, 35.0, 55.0}};
    spec.axis2 = {"u_gbeta_mag", "pu", {0.0, 0.25, 0.5}};
    spec.base_params = cases::case1_defaults();
    auto trait = [&](int workers) {
        spec.workers = workers;
        std::ostringstream os;
        write_trait_csv(os, run_sweep([](const ParameterSet& p) { return cases::build_case1(p).closed_loop; }, spec));
        return os.str();
    };
    const std::string first = trait(1);
    const bool deterministic = first == trait(1) && first == trait(3);
    if (!deterministic) failed.push_back("determinism");

    std::string detail = fmt("spectral %.1e, jacobian %.1e, ", spectral, jac) + fmt("conjugate %.1e, shift %.1e, ", conj, shift) +
                         fmt("step ratio %.2e, sweep ", ratio) + (deterministic ? "identical" : "differs");
    if (!failed.empty()) {
        detail += "; failed:";
        for (const auto& f : failed) detail += " " + f;
    }
    report("A6", failed.empty(), detail);
}

void a7() {
    const auto models = build("case1", {{"alpha_pll", 50.0}});
    const SolverConfig cfg;
    const SolverResult r = solve_pss(models.closed_loop, cfg);
    const ModeSet modes = analyze_modes(r.hss);
    const double nx = r.hss.nblk.diagonal().cwiseProduct(r.X.stacked()).cwiseAbs().maxCoeff();
    const double bound = cfg.tolerance * (1.0 + nx);

    // same orbit again from a bare current reference instead of the locked start
    SpectralVector bare(cfg.N, models.closed_loop.n_states);
    bare.at(1, models.closed_loop.state_index("i_c")) = 1.0;
    bare.at(-1, models.closed_loop.state_index("i_c_conj")) = 1.0;
    const SolverResult far = solve_pss(models.closed_loop, cfg, bare);
    const double gap = (far.X.stacked() - r.X.stacked()).cwiseAbs().maxCoeff();

    const bool pass = r.converged && modes.verdict == Verdict::Unstable && r.fixed_point_residual <= bound &&
                      far.converged && far.fixed_point_residual <= bound && gap <= cfg.tolerance;
    report("A7", pass,
           fmt("alpha_pll = 50 Hz: Re %+.3f, ", modes.weakest.real()) +
               fmt("fixed-point residual %.2e <= %.2e", r.fixed_point_residual, bound) +
               "; bare start: " + std::to_string(far.iterations) + " iterations" +
               fmt(", residual %.2e", far.fixed_point_residual) +
               fmt(", orbit gap %.1e", gap));
}

template <class F>
void guarded(const char* id, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded("A1", a1);
    guarded("A2", a2);
    guarded("A3", a3);
    guarded("A4", a4);
    guarded("A5", a5);
    guarded("A6", a6);
    guarded("A7", a7);
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
