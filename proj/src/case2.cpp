// Case system II: LC-filtered grid-following converter with a dual-SOGI
// sequence extractor, positive-sequence SRF-PLL, dual-frame current control
// (negative-sequence reference zero) and PQ power control. 18 states.

#include "ltp/cases.hpp"

#include "case_seed.hpp"
#include "signal_term.hpp"

#include <memory>

namespace ltp::cases {

using detail::Term;
using detail::TermSpace;

ParameterSet case2_defaults() {
    return ParameterSet({
        {"s_base", 2e6},      {"u_base", 563.0},    {"i_base", 2368.0},     {"f_base", 50.0},
        {"s_n", 2e6},         {"u_n", 690.0},       {"f_sw", 6000.0},       {"l_fa", 7.58e-5},
        {"l_ga", 1.89e-4},    {"k_sym_c", 1.0},     {"k_sym_g", 1.0},       {"c_f", 500e-6},
        {"r_cf", 0.01},       {"p_ref", 0.5},       {"q_ref", 0.0},         {"alpha_c", 200.0},
        {"alpha_pll", 20.0},  {"alpha_s", 20.0},    {"k_sogi", 1.414},      {"u_ga_mag", 1.0},
        {"u_ga_deg", 0.0},    {"u_gbeta_mag", 1.0}, {"u_gbeta_deg", -90.0}, {"bandwidth_scale", 1.0}, {"power_scale", 1.5},
    });
}

namespace {

enum Case2State {
    IC = 0, ICc, XP, XPc, XN, XNc, UF, UFc, IG, IGc, XS, XSc, XQ, XQc, XPLL, DELTA, XSD, XSDc, kCase2States
};

// Index of each signal inside the model's state vector; -1 when the signal is
// not a state of that model (the open loop has no filter capacitor or grid current).
struct Layout {
    int ic, icc, xp, xpc, xn, xnc, uf, ufc, ig, igc, xs, xsc, xq, xqc, xpll, delta, xsd, xsdc;
    int n;
};

constexpr Layout kClosedLayout{IC, ICc, XP, XPc, XN, XNc, UF, UFc, IG, IGc, XS,
                               XSc, XQ, XQc, XPLL, DELTA, XSD, XSDc, kCase2States};
constexpr Layout kOpenLayout{0, 1, 2, 3, 4, 5, -1, -1, -1, -1, 6, 7, 8, 9, 10, 11, 12, 13, 14};

const std::vector<std::string> kLabels = {
    "i_c",       "i_c_conj",  "x_cdq_p",   "x_cdq_p_conj", "x_cdq_n", "x_cdq_n_conj", "u_fc",  "u_fc_conj",
    "i_g",       "i_g_conj",  "x_sogi",    "x_sogi_conj",  "x_sogi_q", "x_sogi_q_conj", "x_pll", "delta_pll",
    "x_s_dq",    "x_s_dq_conj"};

struct Case2Plant {
    Layout at = kClosedLayout;
    double w1 = 0;
    double l_f = 0;  // decoupling inductance, p.u. seconds
    double c_f = 0;  // p.u. seconds
    double r_cf = 0;
    double k_sogi = 0;
    Complex s_ref{};
    ControllerGains k;
    Eigen::Matrix2cd Wf;  // L_f^-1
    Eigen::Matrix2cd Wg;  // L_g^-1

    struct Eval {
        CVector f;
        CMatrix A, B;
        Complex u_poc, u_poc_c;
    };

    Eval evaluate(double t, const CVector& x, const CVector& u, bool grad) const {
        const bool closed = at.uf >= 0;
        const TermSpace sp{at.n, 2, grad};
        const double wt = w1 * t;
        const Term e = sp.rotation(wt, x, at.delta, +1.0);
        const Term ec = sp.rotation(wt, x, at.delta, -1.0);
        const Term ic = sp.state(x, at.ic), icc = sp.state(x, at.icc);

        Term poc = sp.input(u, 0), pocc = sp.input(u, 1);
        Term ig, igc;
        if (closed) {
            ig = sp.state(x, at.ig);
            igc = sp.state(x, at.igc);
            poc = sp.state(x, at.uf) + r_cf * (ic - ig);
            pocc = sp.state(x, at.ufc) + r_cf * (icc - igc);
        }

        // Sequence extraction.
        const Term xs = sp.state(x, at.xs), xsc = sp.state(x, at.xsc);
        const Term xq = sp.state(x, at.xq), xqc = sp.state(x, at.xqc);
        const Term dxs = (w1 * k_sogi) * (poc - xs) - (w1 * w1) * xq;
        const Term dxsc = (w1 * k_sogi) * (pocc - xsc) - (w1 * w1) * xqc;
        const Term up = 0.5 * (xs + Complex(0.0, w1) * xq);
        const Term upc = 0.5 * (xsc - Complex(0.0, w1) * xqc);

        // PLL on the positive sequence.
        const Term uq = Complex(0.0, -0.5) * (ec * up - e * upc);
        const Term dxpll = k.k_ipll * uq;
        const Term ddelta = k.k_ppll * uq + sp.state(x, at.xpll);

        // Power control: s = u_p i_c* in p.u.
        const Term s = up * icc;
        const Term sc = upc * ic;
        const Term xsd = sp.state(x, at.xsd), xsdc = sp.state(x, at.xsdc);
        const Term err = sp.constant(std::conj(s_ref)) - sc;
        const Term errc = sp.constant(s_ref) - s;
        const Term dxsd = k.k_is * err;
        const Term dxsdc = k.k_is * errc;
        const Term iref = k.k_ps * err + xsd;
        const Term irefc = k.k_ps * errc + xsdc;

        // Positive-sequence current control.
        const Term xp = sp.state(x, at.xp), xpc = sp.state(x, at.xpc);
        const Term dxp = k.k_ic * (iref - ec * ic);
        const Term dxpc = k.k_ic * (irefc - e * icc);
        const Term ucp = k.k_pc * (iref * e - ic) + xp * e + Complex(0.0, w1 * l_f) * ic;
        const Term ucpc = k.k_pc * (irefc * ec - icc) + xpc * ec - Complex(0.0, w1 * l_f) * icc;

        // Negative-sequence current control, zero reference.
        const Term xn = sp.state(x, at.xn), xnc = sp.state(x, at.xnc);
        const Term dxn = (-k.k_ic) * (e * ic);
        const Term dxnc = (-k.k_ic) * (ec * icc);
        const Term ucn = xn * ec - k.k_pc * ic;
        const Term ucnc = xnc * e - k.k_pc * icc;

        const Term v0 = (ucp + ucn) - poc;
        const Term v1 = (ucpc + ucnc) - pocc;
        const Term dic = Wf(0, 0) * v0 + Wf(0, 1) * v1;
        const Term dicc = Wf(1, 0) * v0 + Wf(1, 1) * v1;

        Eval out;
        out.f.resize(at.n);
        if (grad) {
            out.A.resize(at.n, at.n);
            out.B.resize(at.n, 2);
        }
        auto put = [&](int r, const Term& term) {
            out.f(r) = term.v;
            if (grad) {
                out.A.row(r) = term.dx;
                out.B.row(r) = term.du;
            }
        };
        put(at.ic, dic);
        put(at.icc, dicc);
        put(at.xp, dxp);
        put(at.xpc, dxpc);
        put(at.xn, dxn);
        put(at.xnc, dxnc);
        put(at.xs, dxs);
        put(at.xsc, dxsc);
        put(at.xq, xs);
        put(at.xqc, xsc);
        put(at.xpll, dxpll);
        put(at.delta, ddelta);
        put(at.xsd, dxsd);
        put(at.xsdc, dxsdc);
        if (closed) {
            const Term ug = sp.input(u, 0), ugc = sp.input(u, 1);
            const Term w0 = poc - ug;
            const Term w1v = pocc - ugc;
            put(at.ig, Wg(0, 0) * w0 + Wg(0, 1) * w1v);
            put(at.igc, Wg(1, 0) * w0 + Wg(1, 1) * w1v);
            put(at.uf, (1.0 / c_f) * (ic - ig));
            put(at.ufc, (1.0 / c_f) * (icc - igc));
        }
        out.u_poc = poc.v;
        out.u_poc_c = pocc.v;
        return out;
    }
};

// g_pos, g_neg: harmonics +1 and -1 of the grid voltage space vector.
SystemModel make_model(std::shared_ptr<const Case2Plant> plant, const std::string& name, InputFunction input_fn,
                       Complex g_pos, Complex g_neg, double x_g) {
    const Layout& at = plant->at;
    SystemModel m;
    m.name = name;
    m.n_states = at.n;
    m.n_inputs = 2;
    m.n_outputs = 2;
    m.omega1 = plant->w1;
    m.state_labels.resize(static_cast<std::size_t>(at.n));
    const int idx[kCase2States] = {at.ic, at.icc, at.xp, at.xpc, at.xn, at.xnc, at.uf, at.ufc, at.ig,
                                   at.igc, at.xs, at.xsc, at.xq, at.xqc, at.xpll, at.delta, at.xsd, at.xsdc};
    for (int s = 0; s < kCase2States; ++s) {
        if (idx[s] >= 0) m.state_labels[static_cast<std::size_t>(idx[s])] = kLabels[static_cast<std::size_t>(s)];
    }
    m.conjugate_pairs = {{at.ic, at.icc}, {at.xp, at.xpc}, {at.xn, at.xnc}, {at.xs, at.xsc},
                         {at.xq, at.xqc}, {at.xpll, at.xpll}, {at.delta, at.delta}, {at.xsd, at.xsdc}};
    if (at.uf >= 0) {
        m.conjugate_pairs.push_back({at.uf, at.ufc});
        m.conjugate_pairs.push_back({at.ig, at.igc});
    }
    const int ic = at.ic;
    const int icc = at.icc;
    m.dynamics = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, false).f; };
    m.jac_state = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, true).A; };
    m.jac_input = [plant](double t, const CVector& x, const CVector& u) { return plant->evaluate(t, x, u, true).B; };
    m.output = [ic, icc](double, const CVector& x, const CVector&) {
        CVector y(2);
        y << x(ic), x(icc);
        return y;
    };
    const int n = at.n;
    m.out_jac_state = [ic, icc, n](double, const CVector&, const CVector&) {
        CMatrix C = CMatrix::Zero(2, n);
        C(0, ic) = 1.0;
        C(1, icc) = 1.0;
        return C;
    };
    m.out_jac_input = [](double, const CVector&, const CVector&) { return CMatrix(CMatrix::Zero(2, 2)); };
    m.input_fn = std::move(input_fn);

    // Locked operating point: currents in phase with the power reference, integrators at their steady values.
    const double u_mag = std::abs(g_pos) > 0.0 ? std::abs(g_pos) : 1.0;
    const Complex i_dq = std::conj(plant->s_ref) / u_mag;
    const detail::LockEstimate lock = detail::lock_estimate(g_pos, x_g, i_dq);
    const Complex i0 = i_dq * std::polar(1.0, lock.delta);
    const Complex xn0 = g_neg * std::polar(1.0, lock.delta);
    m.reference_seeds = {{at.ic, +1, i0},
                         {at.icc, -1, std::conj(i0)},
                         {at.xsd, 0, i_dq},
                         {at.xsdc, 0, std::conj(i_dq)},
                         {at.xp, 0, lock.u_poc_dq},
                         {at.xpc, 0, std::conj(lock.u_poc_dq)},
                         {at.xn, 0, xn0},
                         {at.xnc, 0, std::conj(xn0)},
                         {at.delta, 0, lock.delta}};
    if (at.ig >= 0) {
        m.reference_seeds.push_back({at.ig, +1, i0});
        m.reference_seeds.push_back({at.igc, -1, std::conj(i0)});
    }
    // Voltage-carrying states start at the grid voltage so that the PLL has a signal to lock to.
    auto seed_pair = [&](int i, int ic_, Complex scale_pos, Complex scale_neg) {
        if (i < 0) return;
        m.reference_seeds.push_back({i, +1, g_pos * scale_pos});
        m.reference_seeds.push_back({i, -1, g_neg * scale_neg});
        m.reference_seeds.push_back({ic_, +1, std::conj(g_neg * scale_neg)});
        m.reference_seeds.push_back({ic_, -1, std::conj(g_pos * scale_pos)});
    };
    const double w = plant->w1;
    seed_pair(at.uf, at.ufc, 1.0, 1.0);
    seed_pair(at.xs, at.xsc, 1.0, 1.0);
    seed_pair(at.xq, at.xqc, 1.0 / Complex(0.0, w), 1.0 / Complex(0.0, -w));
    return m;
}

}  // namespace

CaseModels build_case2(const ParameterSet& params) {
    params.require_positive(
        {"bandwidth_scale", "power_scale", "l_fa", "l_ga", "k_sym_c", "k_sym_g", "c_f", "alpha_c", "alpha_pll", "alpha_s", "k_sogi", "u_n"});
    if (params.get("r_cf") < 0.0) throw UsageError("parameter 'r_cf' must be >= 0");
    const BaseValues base = base_values(params);
    const double z = base.z_base();
    const double w1 = base.omega_base();

    const double l_fa = params.get("l_fa") / z;
    const double l_ga = params.get("l_ga") / z;
    const Eigen::Matrix2cd L_f = asymmetric_inductance_matrix(l_fa, l_fa, params.get("k_sym_c") * l_fa);
    const Eigen::Matrix2cd L_g = asymmetric_inductance_matrix(l_ga, l_ga, params.get("k_sym_g") * l_ga);
    const double u_n = params.get("u_n") * std::sqrt(2.0 / 3.0) / base.u_base;

    auto closed = std::make_shared<Case2Plant>();
    closed->w1 = w1;
    closed->l_f = l_fa;
    closed->c_f = params.get("c_f") * z;
    closed->r_cf = params.get("r_cf") / z;
    closed->k_sogi = params.get("k_sogi");
    closed->s_ref = Complex(params.get("p_ref"), params.get("q_ref"));
    closed->k = pi_gains_from_bandwidth({params.get("alpha_c"), params.get("alpha_pll"), params.get("alpha_s")}, l_fa,
                                        u_n, params.get("power_scale"), params.get("bandwidth_scale"));
    closed->Wf = L_f.inverse();
    closed->Wg = L_g.inverse();

    auto open = std::make_shared<Case2Plant>(*closed);
    open->at = kOpenLayout;

    const Complex U_a = std::polar(params.get("u_ga_mag"), params.get("u_ga_deg") * kPi / 180.0);
    const Complex U_b = std::polar(params.get("u_gbeta_mag"), params.get("u_gbeta_deg") * kPi / 180.0);
    InputFunction grid_voltage = [U_a, U_b, w1](double t) {
        const Complex ug = axis_phasors_to_space_vector(U_a, U_b, w1, t);
        CVector u(2);
        u << ug, std::conj(ug);
        return u;
    };

    const Complex g_pos = 0.5 * (U_a + kJ * U_b);
    const Complex g_neg = 0.5 * (std::conj(U_a) + kJ * std::conj(U_b));
    CaseModels models;
    const double x_g = w1 * L_g(0, 0).real();
    models.closed_loop = make_model(closed, "case2", grid_voltage, g_pos, g_neg, x_g);
    models.open_loop = make_model(
        open, "case2-open-loop",
        [](double) -> CVector { throw UsageError("case2 open-loop model: input not bound to a steady state"); }, g_pos,
        g_neg, x_g);
    models.poc_voltage = [closed](double t, const CVector& x, const CVector& u) {
        const auto e = closed->evaluate(t, x, u, false);
        CVector poc(2);
        poc << e.u_poc, e.u_poc_c;
        return poc;
    };
    models.open_loop_states = {IC, ICc, XP, XPc, XN, XNc, XS, XSc, XQ, XQc, XPLL, DELTA, XSD, XSDc};
    return models;
}

}  // namespace ltp::cases
