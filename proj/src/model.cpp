#include "ltp/model.hpp"

#include <algorithm>
#include <cmath>

namespace ltp {

namespace {

void check_dims(const SystemModel& model, const CVector& x, const CVector& u) {
    if (x.size() != model.n_states) {
        throw UsageError(model.name + ": state vector has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(model.n_states));
    }
    if (u.size() != model.n_inputs) {
        throw UsageError(model.name + ": input vector has length " + std::to_string(u.size()) + ", expected " +
                         std::to_string(model.n_inputs));
    }
}

}  // namespace

int SystemModel::state_index(const std::string& label) const {
    auto it = std::find(state_labels.begin(), state_labels.end(), label);
    if (it == state_labels.end()) {
        throw UsageError(name + ": no state labelled '" + label + "'");
    }
    return static_cast<int>(it - state_labels.begin());
}

double ParameterSet::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw UsageError("unknown parameter '" + key + "'");
    }
    return it->second;
}

void ParameterSet::set(const std::string& key, double value) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw UsageError("unknown parameter '" + key + "'");
    }
    it->second = value;
}

void ParameterSet::require_positive(const std::vector<std::string>& keys) const {
    for (const auto& key : keys) {
        double v = get(key);
        if (!(v > 0.0)) {
            throw UsageError("parameter '" + key + "' must be > 0 (got " + std::to_string(v) + ")");
        }
    }
}

CVector eval_dynamics(const SystemModel& model, double t, const CVector& x, const CVector& u) {
    check_dims(model, x, u);
    return model.dynamics(t, x, u);
}

CVector eval_output(const SystemModel& model, double t, const CVector& x, const CVector& u) {
    check_dims(model, x, u);
    return model.output(t, x, u);
}

Jacobians eval_jacobians(const SystemModel& model, double t, const CVector& x, const CVector& u) {
    check_dims(model, x, u);
    return Jacobians{model.jac_state(t, x, u), model.jac_input(t, x, u), model.out_jac_state(t, x, u),
                     model.out_jac_input(t, x, u)};
}

CMatrix fd_jacobian(const SystemModel& model, double t, const CVector& x, const CVector& u, double step) {
    if (!(step > 0.0)) throw UsageError("fd_jacobian: step must be > 0");
    check_dims(model, x, u);
    CMatrix J(model.n_states, model.n_states);
    CVector xp = x;
    for (int c = 0; c < model.n_states; ++c) {
        const Complex saved = xp(c);
        xp(c) = saved + step;
        CVector fp = model.dynamics(t, xp, u);
        xp(c) = saved - step;
        CVector fm = model.dynamics(t, xp, u);
        xp(c) = saved;
        J.col(c) = (fp - fm) / (2.0 * step);
    }
    return J;
}

CMatrix fd_input_jacobian(const SystemModel& model, double t, const CVector& x, const CVector& u, double step) {
    if (!(step > 0.0)) throw UsageError("fd_input_jacobian: step must be > 0");
    check_dims(model, x, u);
    CMatrix J(model.n_states, model.n_inputs);
    CVector up = u;
    for (int c = 0; c < model.n_inputs; ++c) {
        const Complex saved = up(c);
        up(c) = saved + step;
        CVector fp = model.dynamics(t, x, up);
        up(c) = saved - step;
        CVector fm = model.dynamics(t, x, up);
        up(c) = saved;
        J.col(c) = (fp - fm) / (2.0 * step);
    }
    return J;
}

double conjugate_defect(const SystemModel& model, const CVector& x) {
    double worst = 0.0;
    for (auto [i, j] : model.conjugate_pairs) {
        worst = std::max(worst, std::abs(x(j) - std::conj(x(i))));
    }
    return worst;
}

}  // namespace ltp
