#pragma once

#include "ltp/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ltp {

using VectorField = std::function<CVector(double t, const CVector& x, const CVector& u)>;
using MatrixField = std::function<CMatrix(double t, const CVector& x, const CVector& u)>;
using InputFunction = std::function<CVector(double t)>;

/// Value placed at harmonic `k` of state `state` by the initial guess.
struct HarmonicSeed {
    int state = 0;
    int k = 0;
    Complex value{};
};

/// A periodically driven nonlinear state-space system
///
///     dx/dt = f(t, x, u),   y = g(t, x, u),   u = input_fn(t)  (T-periodic)
///
/// States are complex. A pair (i, j) in `conjugate_pairs` declares state j to
/// be the complex conjugate of state i; a pair (i, i) declares a real state.
/// All Jacobians treat x and x* as independent coordinates.
struct SystemModel {
    std::string name;
    int n_states = 0;
    int n_inputs = 0;
    int n_outputs = 0;
    double omega1 = 0.0;
    std::vector<std::string> state_labels;
    std::vector<std::pair<int, int>> conjugate_pairs;

    VectorField dynamics;
    VectorField output;
    MatrixField jac_state;
    MatrixField jac_input;
    MatrixField out_jac_state;
    MatrixField out_jac_input;
    InputFunction input_fn;

    /// Control references used to build the Newton starting point.
    std::vector<HarmonicSeed> reference_seeds;

    [[nodiscard]] double period() const { return 2.0 * kPi / omega1; }
    [[nodiscard]] int state_index(const std::string& label) const;
};

struct Jacobians {
    CMatrix A, B, C, D;
};

/// Named scalar parameters with a fixed key set; unknown keys are rejected.
class ParameterSet {
public:
    ParameterSet() = default;
    explicit ParameterSet(std::map<std::string, double> defaults) : values_(std::move(defaults)) {}

    [[nodiscard]] double get(const std::string& key) const;
    void set(const std::string& key, double value);
    [[nodiscard]] bool contains(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] const std::map<std::string, double>& values() const noexcept { return values_; }

    /// Throws UsageError naming the first key whose value is not strictly positive.
    void require_positive(const std::vector<std::string>& keys) const;

private:
    std::map<std::string, double> values_;
};

CVector eval_dynamics(const SystemModel& model, double t, const CVector& x, const CVector& u);
CVector eval_output(const SystemModel& model, double t, const CVector& x, const CVector& u);
Jacobians eval_jacobians(const SystemModel& model, double t, const CVector& x, const CVector& u);

/// Central-difference estimate of df/dx, every complex coordinate perturbed on its own.
CMatrix fd_jacobian(const SystemModel& model, double t, const CVector& x, const CVector& u, double step);
/// Central-difference estimate of df/du.
CMatrix fd_input_jacobian(const SystemModel& model, double t, const CVector& x, const CVector& u, double step);

/// Maximum violation of X[j] = conj(X[i]) over the model's conjugate pairs.
double conjugate_defect(const SystemModel& model, const CVector& x);

}  // namespace ltp
