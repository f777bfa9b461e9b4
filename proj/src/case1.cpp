// Case system I: grid-following converter behind an L filter and an inductive
// grid, dq current control with decoupling, SRF-PLL. Six states:
//   [i_c, i_c*, x_cdq, x_cdq*, delta_pll, x_pll]

#include "ltp/cases.hpp"

#include "case_seed.hpp"
#include "signal_term.hpp"

#include <memory>

namespace ltp::cases {

using detail::Term;
using detail::TermSpace;

ParameterSet case1_defaults() {
    return ParameterSet({
        {"s_base", 2e6},       {"u_base", 563.0},     {"i_base", 2368.0},   {"f_base", 50.0},
        {"s_n", 2e6},          {"u_n", 690.0},        {"f_sw", 6000.0},     {"l_fa", 7.58e-5},
        {"l_ga", 1.89e-4},     {"k_sym_c", 1.0},      {"k_sym_g", 1.0},     {"i_dq_ref_re", 1.0},
        {"i_dq_ref_im", 0.0},  {"alpha_c", 200.0},    {"alpha_pll", 20.0},  {"u_ga_mag", 1.0},
        {"u_ga_deg", 0.0},     {"u_gbeta_mag", 1.0},  {"u_gbeta_deg", -90.0}, {"bandwidth_scale", 1.0}, {"power_scale", 1.5},
    });
}

namespace {

enum Case1State { IC = 0, ICc, XC, XCc, DELTA, XPLL, kCase1States };

struct Case1Plant {
    double w1 = 0;
    double l_f = 0;  // L_fa in p.u. seconds, decoupling term
    Complex i_ref{};
    ControllerGains k;
    Eigen::Matrix2cd W;   // inverse of the series inductance (closed loop) or of L_f (open loop)
    Eigen::Matrix2cd G;   // L_g W (closed loop only)
    bool open_loop = false;

    struct Eval {
        CVector f;
        CMatrix A, B;
        Complex u_poc, u_poc_c;
    };

    // Closed loop: u = (u_g, u_g*). Open loop: u = (u_poc, u_poc*).
    Eval evaluate(double t, const CVector& x, const CVector& u, bool grad) const {
        const TermSpace sp{kCase1States, 2, grad};
        const double wt = w1 * t;
        const Term e = sp.rotation(wt, x, DELTA, +1.0);
        const Term ec = sp.rotation(wt, x, DELTA, -1.0);
        const Term ic = sp.state(x, IC), icc = sp.state(x, ICc);
        const Term xc = sp.state(x, XC), xcc = sp.state(x, XCc);

        // Converter voltage reference (current PI in the PLL frame plus decoupling).
        const Term uc = k.k_pc * (i_ref * e - ic) + xc * e + Complex(0.0, w1 * l_f) * ic;
        const Term ucc = k.k_pc * (std::conj(i_ref) * ec - icc) + xcc * ec - Complex(0.0, w1 * l_f) * icc;

        // Voltage across the inductance seen by i_c: to the grid source (closed
        // loop) or to the point of connection (open loop).
        const Term ug = sp.input(u, 0), ugc = sp.input(u, 1);
        const Term v0 = uc - ug;
        const Term v1 = ucc - ugc;
        const Term di0 = W(0, 0) * v0 + W(0, 1) * v1;
        const Term di1 = W(1, 0) * v0 + W(1, 1) * v1;

        Term poc = ug, pocc = ugc;
        if (!open_loop) {
            poc = ug + (G(0, 0) * v0 + G(0, 1) * v1);
            pocc = ugc + (G(1, 0) * v0 + G(1, 1) * v1);
        }
        // q-axis POC voltage in the PLL frame.
        const Term uq = Complex(0.0, -0.5) * (ec * poc - e * pocc);

        const Term dxc = k.k_ic * (sp.constant(i_ref) - ec * ic);
        const Term dxcc = k.k_ic * (sp.constant(std::conj(i_ref)) - e * icc);
        const Term ddelta = k.k_ppll * uq + sp.state(x, XPLL);
        const Term dxpll = k.k_ipll * uq;

        const Term* rows[kCase1States] = {&di0, &di1, &dxc, &dxcc, &ddelta, &dxpll};
        Eval out;
        out.f.resize(kCase1States);
        if (grad) {
            out.A.resize(kCase1States, kCase1States);
            out.B.resize(kCase1States, 2);
        }
        for (int r = 0; r < kCase1States; ++r) {
            out.f(r) = rows[r]->v;
            if (grad) {
                out.A.row(r) = rows[r]->dx;
                out.B.row(r) = rows[r]->du;
            }
        }
        out.u_poc = poc.v;
        out.u_poc_c = pocc.v;
        return out;
    }
};

SystemModel make_model(std::shared_ptr<const Case1Plant> plant, const std::string& name, InputFunction input_fn,
                       std::vector<HarmonicSeed> seeds) {
    SystemModel m;
    m.name = name;
    m.n_states = kCase1States;
    m.n_inputs = 2;
    m.n_outputs = 2;
    m.omega1 = plant->w1;
    m.state_labels = {"i_c", "i_c_conj", "x_cdq", "x_cdq_conj", "delta_pll", "x_pll"};
    m.conjugate_pairs = {{IC, ICc}, {XC, XCc}, {DELTA, DELTA}, {XPLL, XPLL}};
    m.dynamics = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, false).f; };
    m.jac_state = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, true).A; };
    m.jac_input = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, true).B; };
    m.output = [](double, const CVector& x, const CVector&) { return CVector(x.head(2)); };
    m.out_jac_state = [](double, const CVector&, const CVector&) {
        CMatrix C = CMatrix::Zero(2, kCase1States);
        C(0, IC) = 1.0;
        C(1, ICc) = 1.0;
        return C;
    };
    m.out_jac_input = [](double, const CVector&, const CVector&) { return CMatrix(CMatrix::Zero(2, 2)); };
    m.input_fn = std::move(input_fn);
    m.reference_seeds = std::move(seeds);
    return m;
}

}  // namespace

CaseModels build_case1(const ParameterSet& params) {
    params.require_positive({"bandwidth_scale", "power_scale", "l_fa", "l_ga", "k_sym_c", "k_sym_g", "alpha_c", "alpha_pll", "u_n"});
    const BaseValues base = base_values(params);
    const double z = base.z_base();
    const double w1 = base.omega_base();

    const double l_fa = params.get("l_fa") / z;
    const double l_ga = params.get("l_ga") / z;
    const Eigen::Matrix2cd L_f = asymmetric_inductance_matrix(l_fa, l_fa, params.get("k_sym_c") * l_fa);
    const Eigen::Matrix2cd L_g = asymmetric_inductance_matrix(l_ga, l_ga, params.get("k_sym_g") * l_ga);

    // Nominal phase-peak voltage in p.u.
    const double u_n = params.get("u_n") * std::sqrt(2.0 / 3.0) / base.u_base;
    const ControllerGains gains =
        pi_gains_from_bandwidth({params.get("alpha_c"), params.get("alpha_pll"), 0.0}, l_fa, u_n,
                                params.get("power_scale"), params.get("bandwidth_scale"));
    const Complex i_ref(params.get("i_dq_ref_re"), params.get("i_dq_ref_im"));

    auto closed = std::make_shared<Case1Plant>();
    closed->w1 = w1;
    closed->l_f = l_fa;
    closed->i_ref = i_ref;
    closed->k = gains;
    closed->W = (L_f + L_g).inverse();
    closed->G = L_g * closed->W;

    auto open = std::make_shared<Case1Plant>(*closed);
    open->open_loop = true;
    open->W = L_f.inverse();
    open->G.setZero();

    const Complex U_a = std::polar(params.get("u_ga_mag"), params.get("u_ga_deg") * kPi / 180.0);
    const Complex U_b = std::polar(params.get("u_gbeta_mag"), params.get("u_gbeta_deg") * kPi / 180.0);
    InputFunction grid_voltage = [U_a, U_b, w1](double t) {
        const Complex ug = axis_phasors_to_space_vector(U_a, U_b, w1, t);
        CVector u(2);
        u << ug, std::conj(ug);
        return u;
    };

    const Complex g_pos = 0.5 * (U_a + kJ * U_b);
    const detail::LockEstimate lock = detail::lock_estimate(g_pos, w1 * L_g(0, 0).real(), i_ref);
    const Complex i_ab = i_ref * std::polar(1.0, lock.delta);
    const std::vector<HarmonicSeed> seeds = {{IC, +1, i_ab},          {ICc, -1, std::conj(i_ab)},
                                             {XC, 0, lock.u_poc_dq},  {XCc, 0, std::conj(lock.u_poc_dq)},
                                             {DELTA, 0, lock.delta}};

    CaseModels models;
    models.closed_loop = make_model(closed, "case1", grid_voltage, seeds);
    models.open_loop = make_model(open, "case1-open-loop", nullptr, seeds);
    models.open_loop.input_fn = [](double) -> CVector {
        throw UsageError("case1 open-loop model: input not bound to a steady state");
    };
    models.poc_voltage = [closed](double t, const CVector& x, const CVector& u) {
        const auto e = closed->evaluate(t, x, u, false);
        CVector poc(2);
        poc << e.u_poc, e.u_poc_c;
        return poc;
    };
    models.open_loop_states = {IC, ICc, XC, XCc, DELTA, XPLL};
    return models;
}

}  // namespace ltp::cases
