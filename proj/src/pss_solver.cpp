#include "ltp/pss_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ltp {

void SolverConfig::validate() const {
    if (N < 0) throw UsageError("solver: N must be >= 0");
    if (!(h > 0.0) || !(T > 0.0)) throw UsageError("solver: h and T must be > 0");
    if (!(tolerance > 0.0)) throw UsageError("solver: tolerance must be > 0");
    if (max_iterations < 1) throw UsageError("solver: max_iterations must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw UsageError("solver: damping must lie in (0, 1]");
    if (max_halvings < 0) throw UsageError("solver: max_halvings must be >= 0");
}

SpectralVector initial_guess(const SystemModel& model, int truncation) {
    SpectralVector X(truncation, model.n_states);
    for (const auto& seed : model.reference_seeds) {
        if (std::abs(seed.k) <= truncation) X.at(seed.k, seed.state) = seed.value;
    }
    return X;
}

double residual_norm(const SpectralVector& dX) {
    const CVector& v = dX.stacked();
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

NewtonStep newton_step(const SystemModel& model, const SpectralVector& X, const HarmonicGrid& grid) {
    const int N = X.truncation();
    const int n = model.n_states;
    const int M = grid.samples();
    if (!X.stacked().allFinite()) throw DivergedTrajectory("newton_step: non-finite spectral iterate");

    const CMatrix x = spectrum_to_samples(X, grid);
    CMatrix f(n, M);
    std::vector<CMatrix> a(M);
    for (int m = 0; m < M; ++m) {
        const double t = grid.time(m);
        const CVector xm = x.col(m);
        const CVector u = model.input_fn(t);
        f.col(m) = model.dynamics(t, xm, u);
        a[m] = model.jac_state(t, xm, u);
    }
    if (!f.allFinite()) throw DivergedTrajectory("newton_step: non-finite dynamics along the iterate");

    NewtonStep step;
    step.F = samples_to_spectrum(f, grid, N);
    step.A_tp = build_toeplitz(a, grid, N);

    const CVector nd = build_nblk(n, N, model.omega1).diagonal();
    const CVector nx = nd.cwiseProduct(X.stacked());
    const CVector rhs = step.F.stacked() - nx;
    step.fixed_point_residual = rhs.cwiseAbs().maxCoeff();

    // (N_blk - A) dX = F - N_blk X
    CMatrix lhs = -step.A_tp.dense();
    lhs.diagonal() += nd;
    Eigen::PartialPivLU<CMatrix> lu(lhs);
    // rcond() misses exact zero pivots, so the pivot spread bounds the condition as well.
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double spread = pivots.size() == 0 ? 1.0 : pivots.minCoeff() / pivots.maxCoeff();
    const double rcond = std::min(lu.rcond(), spread);
    if (!(rcond > 1e-12)) {
        throw SingularIterationMatrix(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    }
    CVector dx = lu.solve(rhs);
    if (!dx.allFinite()) throw DivergedTrajectory("newton_step: non-finite Newton update");
    step.delta = SpectralVector(N, n, std::move(dx));
    step.step_norm = residual_norm(step.delta);
    return step;
}

SolverResult solve_pss(const SystemModel& model, const SolverConfig& config,
                       const std::optional<SpectralVector>& start) {
    config.validate();
    if (std::abs(config.T * model.omega1 - 2.0 * kPi) > 1e-9 * 2.0 * kPi) {
        throw UsageError("solve_pss: configured period T does not match the model's fundamental");
    }
    const HarmonicGrid grid = config.grid();
    SpectralVector X = start ? *start : initial_guess(model, config.N);
    if (X.truncation() != config.N || X.n_states() != model.n_states) {
        throw UsageError("solve_pss: starting spectral vector has the wrong shape");
    }

    SolverResult result;
    NewtonStep step = newton_step(model, X, grid);
    while (true) {
        result.residual_history.push_back(step.step_norm);
        if (step.step_norm <= config.tolerance) {
            X.stacked() += step.delta.stacked();
            result.converged = true;
            break;
        }
        if (result.iterations >= config.max_iterations) break;
        ++result.iterations;

        // Damped update: shrink while the next Newton step is larger than this one.
        double lambda = config.damping;
        SpectralVector trial;
        std::optional<NewtonStep> next;
        for (int halving = 0;; ++halving) {
            trial = SpectralVector(config.N, model.n_states, X.stacked() + lambda * step.delta.stacked());
            try {
                next = newton_step(model, trial, grid);
            } catch (const NumericError&) {
                if (halving >= config.max_halvings) throw;
                lambda *= 0.5;
                continue;
            }
            if (next->step_norm <= step.step_norm || halving >= config.max_halvings) break;
            lambda *= 0.5;
        }
        X = std::move(trial);
        step = std::move(*next);
    }

    result.X = X;
    result.waveforms = spectrum_to_samples(X, grid);
    if (!result.converged) {
        result.fixed_point_residual = step.fixed_point_residual;
        throw PssNotConverged(std::move(result));
    }
    ++result.iterations;
    result.hss = linearize(model, result.waveforms, grid, config.N);

    // Fixed-point check at the returned X.
    const int M = grid.samples();
    CMatrix f(model.n_states, M);
    for (int m = 0; m < M; ++m) {
        const double t = grid.time(m);
        f.col(m) = model.dynamics(t, result.waveforms.col(m), model.input_fn(t));
    }
    const SpectralVector F = samples_to_spectrum(f, grid, config.N);
    const CVector nd = result.hss.nblk.diagonal();
    result.fixed_point_residual = (nd.cwiseProduct(X.stacked()) - F.stacked()).cwiseAbs().maxCoeff();
    return result;
}

}  // namespace ltp
