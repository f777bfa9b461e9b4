#pragma once

#include "ltp/model.hpp"
#include "ltp/pss_solver.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace ltp::cases {

// =============================================================================
// Frame transformations and per-unit helpers
// =============================================================================

struct TransformSet {
    Eigen::Matrix<double, 2, 3> abc_to_ab;   ///< (2/3) Clarke
    Eigen::Matrix<double, 3, 2> ab_to_abc;   ///< pseudo-inverse of abc_to_ab
    Eigen::Matrix2cd ab_to_c;                ///< [[1, j], [1, -j]]: (a, b) -> (v, v*)
    Eigen::Matrix2cd c_to_ab;
};

const TransformSet& transforms();

/// Complex-vector-frame inductance T_ab/C T_abc/ab diag(La, Lb, Lc) T_ab/abc T_C/ab.
Eigen::Matrix2cd asymmetric_inductance_matrix(double La, double Lb, double Lc);

/// Phase phasors (a, b, c) of a grid specified by its alpha/beta axis phasors.
std::array<Complex, 3> unbalanced_grid_phasors(Complex U_alpha, Complex U_beta);

/// Space vector u_a + j u_b at time t for axis phasors (x(t) = Re{X e^{j w t}}).
Complex axis_phasors_to_space_vector(Complex U_alpha, Complex U_beta, double omega, double t);

double per_unit(double value, double base);
double from_per_unit(double value, double base);

struct ControllerGains {
    double k_pc = 0, k_ic = 0;      ///< current control PI
    double k_ppll = 0, k_ipll = 0;  ///< PLL PI
    double k_ps = 0, k_is = 0;      ///< power control PI
};

struct Bandwidths {
    double alpha_c_hz = 0;
    double alpha_pll_hz = 0;
    double alpha_s_hz = 0;  ///< 0 when there is no power loop
};

/// Bandwidth-to-PI mapping. Each bandwidth is first multiplied by `rad_scale`
/// (2 pi: values in Hz; 1: values already taken as rad/s), then
///   k_pc = 2 a_c L_f,  k_ic = 2 a_c^2 L_f,  k_ppll = 2 a_pll / U_N,  k_ipll = 2 a_pll^2 / U_N,
///   k_ps = a_s / (P U_N a_c),  k_is = a_s / (P U_N)
/// where P is `power_scale` (3/2 with physical power s = 3/2 u i*, 1 when power is per-unit).
ControllerGains pi_gains_from_bandwidth(const Bandwidths& bw, double l_f, double u_n, double power_scale = 1.5,
                                        double rad_scale = 2.0 * kPi);

// =============================================================================
// Benchmark systems
// =============================================================================

/// Both case parameter sets carry `bandwidth_scale` (the rad_scale of the gain
/// mapping) and `power_scale`.
/// Defaults for the single-L grid-following converter (6 states).
ParameterSet case1_defaults();
/// Defaults for the LC-filtered converter with SOGI, dual-frame current control and PQ control (18 states).
ParameterSet case2_defaults();

struct BaseValues {
    double s_base, u_base, i_base, f_base;
    [[nodiscard]] double z_base() const { return u_base / i_base; }
    [[nodiscard]] double omega_base() const { return 2.0 * kPi * f_base; }
};
BaseValues base_values(const ParameterSet& params);

/// Point-of-connection voltage pair (u_poc, u_poc*) of the closed-loop model.
using PocVoltageFn = std::function<CVector(double t, const CVector& x, const CVector& u)>;

struct CaseModels {
    SystemModel closed_loop;
    /// Converter seen from the point of connection: input (u_poc, u_poc*), output (i_c, i_c*).
    /// Its input_fn is unbound until open_loop_hss() attaches a steady state.
    SystemModel open_loop;
    PocVoltageFn poc_voltage;
    /// closed-loop index of every open-loop state, in open-loop order
    std::vector<int> open_loop_states;
};

CaseModels build_case1(const ParameterSet& params);
CaseModels build_case2(const ParameterSet& params);

/// Dispatch by name: "case1" or "case2".
CaseModels build_case(const std::string& name, const ParameterSet& params);
ParameterSet case_defaults(const std::string& name);

/// Open-loop model with input_fn bound to the PSS point-of-connection voltage, and its
/// state waveform extracted from the closed-loop PSS.
struct OpenLoopPoint {
    SystemModel model;
    CMatrix waveform;
};
OpenLoopPoint open_loop_at(const CaseModels& models, const SolverResult& pss, const HarmonicGrid& grid);

/// HSS matrices of the open-loop model about the closed-loop PSS.
HssMatrices open_loop_hss(const CaseModels& models, const SolverResult& pss, const SolverConfig& config);

// =============================================================================
// Linear time-invariant models from file
// =============================================================================

/// Reads an LTI model  dx/dt = A x + B u,  y = C x + D u  with u a sum of harmonics, from JSON:
///   { "omega1": ..., "A": [[re, ...]] or [[[re, im], ...]], "B": ..., "C": ..., "D": ...,
///     "input_harmonics": [ { "input": 0, "k": 1, "re": 1.0, "im": 0.0 }, ... ],
///     "state_labels": [...] (optional), "conjugate_pairs": [[i, j], ...] (optional) }
SystemModel load_linear_model(const std::string& path);
SystemModel make_linear_model(CMatrix A, CMatrix B, CMatrix C, CMatrix D, double omega1,
                              std::vector<HarmonicSeed> input_harmonics);

}  // namespace ltp::cases
