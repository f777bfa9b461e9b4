#pragma once

// Fixed-step time-domain integration of a SystemModel, used to cross-check
// steady states and eigenvalue predictions.

#include "ltp/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ltp::oracle {

struct Trajectory {
    std::vector<double> t;
    CMatrix x;  ///< n_states x samples
    double step = 0.0;
    std::string model_name;
    std::vector<std::string> state_labels;
    bool diverged = false;

    [[nodiscard]] Eigen::Index samples() const { return x.cols(); }
};

/// Additive perturbation applied once, at the first step that starts at or after `time`.
/// The conjugate partner of `state` receives the conjugate kick.
struct Kick {
    int state = 0;
    Complex magnitude{1e-3, 0.0};
    double time = 0.0;
};

/// Non-finite state during integration; carries everything computed before it.
class TrajectoryDiverged : public DivergedTrajectory {
public:
    explicit TrajectoryDiverged(Trajectory partial)
        : DivergedTrajectory("time-domain integration diverged", partial.t.empty() ? 0.0 : partial.t.back()),
          partial_(std::move(partial)) {}
    [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Classical RK4 with the model's input_fn, from t0 over `duration` seconds.
Trajectory integrate(const SystemModel& model, const CVector& x0, double t0, double duration, double step,
                     const std::optional<Kick>& kick = std::nullopt);

/// Final full period of the trajectory, starting at a sample with t mod T = 0.
CMatrix last_period(const Trajectory& traj, double period);

struct WaveformError {
    Eigen::VectorXd rms;
    Eigen::VectorXd max;
};

/// Per-state |a - b| statistics. When the sample counts differ, b is
/// resampled onto a's grid by Fourier interpolation over one period.
WaveformError compare_waveforms(const CMatrix& a, const CMatrix& b);

struct GrowthFit {
    double rate = 0.0;        ///< fitted exponential rate (1/s)
    bool floor_hit = false;   ///< residual envelope sank below the numeric floor
    int periods_used = 0;
    std::vector<double> envelope;  ///< per-period RMS of the residual
};

/// Exponential rate of the deviation between a perturbed trajectory and an
/// unperturbed reference on the same grid: per-period RMS envelope of the
/// difference in `state` after `onset` (skipping `skip_periods` periods),
/// least-squares fit of log(envelope) against time.
GrowthFit growth_rate_fit(const Trajectory& perturbed, const Trajectory& reference, int state, double onset,
                          double period, int skip_periods = 2, double floor = 1e-13);

struct ProbeConfig {
    int state = 0;
    double magnitude = 1e-3;
    double settle_periods = 10;
    double horizon_periods = 100;
    double step = 50e-6;
    int skip_periods = 2;
};

/// Integrates an unperturbed and a kicked twin from x0 and fits the growth rate.
GrowthFit perturbation_growth(const SystemModel& model, const CVector& x0, const ProbeConfig& probe);

/// CSV with columns t, then re_<label>, im_<label> per state.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace ltp::oracle
