#include "ltp/cases.hpp"

#include <cmath>

namespace ltp::cases {

const TransformSet& transforms() {
    static const TransformSet set = [] {
        TransformSet t;
        const double r3 = std::sqrt(3.0) / 2.0;
        Eigen::Matrix<double, 2, 3> clarke;
        clarke << 1.0, -0.5, -0.5, 0.0, r3, -r3;
        t.abc_to_ab = (2.0 / 3.0) * clarke;
        t.ab_to_abc = clarke.transpose();
        t.ab_to_c << Complex(1, 0), Complex(0, 1), Complex(1, 0), Complex(0, -1);
        t.c_to_ab = t.ab_to_c.inverse();
        return t;
    }();
    return set;
}

Eigen::Matrix2cd asymmetric_inductance_matrix(double La, double Lb, double Lc) {
    if (!(La > 0.0) || !(Lb > 0.0) || !(Lc > 0.0)) {
        throw UsageError("asymmetric_inductance_matrix: inductances must be > 0");
    }
    const auto& t = transforms();
    const Eigen::Vector3d diag(La, Lb, Lc);
    const Eigen::Matrix2d l_ab = t.abc_to_ab * diag.asDiagonal() * t.ab_to_abc;
    return t.ab_to_c * l_ab.cast<Complex>() * t.c_to_ab;
}

std::array<Complex, 3> unbalanced_grid_phasors(Complex U_alpha, Complex U_beta) {
    const auto& t = transforms();
    std::array<Complex, 3> abc{};
    for (int p = 0; p < 3; ++p) abc[p] = t.ab_to_abc(p, 0) * U_alpha + t.ab_to_abc(p, 1) * U_beta;
    return abc;
}

Complex axis_phasors_to_space_vector(Complex U_alpha, Complex U_beta, double omega, double t) {
    const Complex rot = std::polar(1.0, omega * t);
    return Complex((U_alpha * rot).real(), (U_beta * rot).real());
}

double per_unit(double value, double base) {
    if (base == 0.0) throw UsageError("per_unit: zero base value");
    return value / base;
}

double from_per_unit(double value, double base) {
    if (base == 0.0) throw UsageError("from_per_unit: zero base value");
    return value * base;
}

ControllerGains pi_gains_from_bandwidth(const Bandwidths& bw, double l_f, double u_n, double power_scale,
                                        double rad_scale) {
    if (!(bw.alpha_c_hz > 0.0) || !(bw.alpha_pll_hz > 0.0) || bw.alpha_s_hz < 0.0) {
        throw UsageError("pi_gains_from_bandwidth: bandwidths must be > 0");
    }
    if (!(rad_scale > 0.0) || !(power_scale > 0.0) || !(u_n > 0.0)) {
        throw UsageError("pi_gains_from_bandwidth: scales and U_N must be > 0");
    }
    const double a_c = rad_scale * bw.alpha_c_hz;
    const double a_pll = rad_scale * bw.alpha_pll_hz;
    const double a_s = rad_scale * bw.alpha_s_hz;
    ControllerGains g;
    g.k_pc = 2.0 * a_c * l_f;
    g.k_ic = 2.0 * a_c * a_c * l_f;
    g.k_ppll = 2.0 * a_pll / u_n;
    g.k_ipll = 2.0 * a_pll * a_pll / u_n;
    g.k_ps = a_s / (power_scale * u_n * a_c);
    g.k_is = a_s / (power_scale * u_n);
    return g;
}

BaseValues base_values(const ParameterSet& params) {
    BaseValues b{params.get("s_base"), params.get("u_base"), params.get("i_base"), params.get("f_base")};
    if (!(b.s_base > 0) || !(b.u_base > 0) || !(b.i_base > 0) || !(b.f_base > 0)) {
        throw UsageError("base values must be > 0");
    }
    return b;
}

ParameterSet case_defaults(const std::string& name) {
    if (name == "case1") return case1_defaults();
    if (name == "case2") return case2_defaults();
    throw UsageError("unknown case '" + name + "'");
}

CaseModels build_case(const std::string& name, const ParameterSet& params) {
    if (name == "case1") return build_case1(params);
    if (name == "case2") return build_case2(params);
    throw UsageError("unknown case '" + name + "'");
}

OpenLoopPoint open_loop_at(const CaseModels& models, const SolverResult& pss, const HarmonicGrid& grid) {
    const SystemModel& cl = models.closed_loop;
    const int M = grid.samples();
    if (pss.waveforms.cols() != M) throw UsageError("open_loop_at: PSS waveform does not match the grid");

    CMatrix poc(2, M);
    for (int m = 0; m < M; ++m) {
        const double t = grid.time(m);
        poc.col(m) = models.poc_voltage(t, pss.waveforms.col(m), cl.input_fn(t));
    }
    // Full grid bandwidth so the bound input reproduces the sampled voltage.
    const SpectralVector poc_spec = samples_to_spectrum(poc, grid, (M - 1) / 2);

    OpenLoopPoint point;
    point.model = models.open_loop;
    const double w = cl.omega1;
    point.model.input_fn = [poc_spec, w](double t) { return spectrum_at(poc_spec, w, t); };
    point.waveform.resize(static_cast<Eigen::Index>(models.open_loop_states.size()), M);
    for (std::size_t r = 0; r < models.open_loop_states.size(); ++r) {
        point.waveform.row(static_cast<Eigen::Index>(r)) = pss.waveforms.row(models.open_loop_states[r]);
    }
    return point;
}

HssMatrices open_loop_hss(const CaseModels& models, const SolverResult& pss, const SolverConfig& config) {
    const HarmonicGrid grid = config.grid();
    const OpenLoopPoint point = open_loop_at(models, pss, grid);
    return linearize(point.model, point.waveform, grid, config.N);
}

}  // namespace ltp::cases
