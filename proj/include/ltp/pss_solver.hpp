#pragma once

#include "ltp/hss_analysis.hpp"
#include "ltp/model.hpp"
#include "ltp/spectral.hpp"

#include <optional>
#include <vector>

namespace ltp {

struct SolverConfig {
    int N = 4;                  ///< harmonic truncation order
    double h = 50e-6;           ///< sampling step (s)
    double T = 0.02;            ///< period (s)
    double tolerance = 1e-3;    ///< epsilon on ||dX||_inf
    int max_iterations = 50;
    double damping = 1.0;       ///< initial fraction of the Newton step, in (0, 1]
    int max_halvings = 4;       ///< step halvings per iteration when the step norm grows

    void validate() const;
    [[nodiscard]] HarmonicGrid grid() const { return HarmonicGrid(T, h, N); }
};

struct SolverResult {
    SpectralVector X;
    CMatrix waveforms;  ///< n_states x M, one period on the solver grid
    HssMatrices hss;
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    double fixed_point_residual = 0.0;  ///< ||N_blk X - F||_inf at the returned X
};

/// Thrown by solve_pss when max_iterations is reached; keeps the last iterate.
class PssNotConverged : public MaxIterationsExceeded {
public:
    explicit PssNotConverged(SolverResult partial)
        : MaxIterationsExceeded(partial.residual_history), partial_(std::move(partial)) {}
    [[nodiscard]] const SolverResult& partial() const noexcept { return partial_; }

private:
    SolverResult partial_;
};

struct NewtonStep {
    SpectralVector delta;
    double step_norm = 0.0;
    BlockToeplitz A_tp;     ///< Toeplitz of A(t) along the current iterate
    SpectralVector F;       ///< spectrum of f along the current iterate
    double fixed_point_residual = 0.0;
};

/// References at their harmonics, everything else zero.
SpectralVector initial_guess(const SystemModel& model, int truncation);

NewtonStep newton_step(const SystemModel& model, const SpectralVector& X, const HarmonicGrid& grid);

SolverResult solve_pss(const SystemModel& model, const SolverConfig& config,
                       const std::optional<SpectralVector>& start = std::nullopt);

/// max |entry| over all complex coefficients.
double residual_norm(const SpectralVector& dX);

}  // namespace ltp
