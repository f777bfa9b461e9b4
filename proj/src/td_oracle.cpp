#include "ltp/td_oracle.hpp"

#include "ltp/csv.hpp"

#include <cmath>
#include <ostream>

namespace ltp::oracle {

namespace {

int conjugate_partner(const SystemModel& model, int state) {
    for (const auto& [i, j] : model.conjugate_pairs) {
        if (i == state) return j;
        if (j == state) return i;
    }
    return -1;
}

int whole_samples(double span, double step, const char* what) {
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-6 * std::max(1.0, rounded)) {
        throw UsageError(std::string(what) + " is not a whole number of steps");
    }
    return static_cast<int>(rounded);
}

}  // namespace

Trajectory integrate(const SystemModel& model, const CVector& x0, double t0, double duration, double step,
                     const std::optional<Kick>& kick) {
    if (!(step > 0.0)) throw UsageError("integrate: step must be > 0");
    if (!(duration > 0.0)) throw UsageError("integrate: duration must be > 0");
    if (x0.size() != model.n_states) throw UsageError("integrate: initial state has wrong size");
    const int steps = whole_samples(duration, step, "integration span");

    Trajectory traj;
    traj.step = step;
    traj.model_name = model.name;
    traj.state_labels = model.state_labels;
    traj.t.resize(static_cast<std::size_t>(steps) + 1);
    traj.x.resize(model.n_states, steps + 1);

    const int kick_partner = kick ? conjugate_partner(model, kick->state) : -1;
    bool kicked = !kick.has_value();
    CVector x = x0;
    traj.t[0] = t0;
    traj.x.col(0) = x;
    const double h = step;
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        if (!kicked && t >= kick->time - 1e-9 * h) {
            x(kick->state) += kick->magnitude;
            if (kick_partner >= 0 && kick_partner != kick->state) x(kick_partner) += std::conj(kick->magnitude);
            kicked = true;
        }
        const CVector u0 = model.input_fn(t);
        const CVector um = model.input_fn(t + 0.5 * h);
        const CVector u1 = model.input_fn(t + h);
        const CVector k1 = model.dynamics(t, x, u0);
        const CVector k2 = model.dynamics(t + 0.5 * h, x + (0.5 * h) * k1, um);
        const CVector k3 = model.dynamics(t + 0.5 * h, x + (0.5 * h) * k2, um);
        const CVector k4 = model.dynamics(t + h, x + h * k3, u1);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            traj.diverged = true;
            traj.t.resize(static_cast<std::size_t>(s) + 1);
            traj.x.conservativeResize(Eigen::NoChange, s + 1);
            throw TrajectoryDiverged(std::move(traj));
        }
        traj.t[static_cast<std::size_t>(s) + 1] = t0 + (s + 1) * h;
        traj.x.col(s + 1) = x;
    }
    return traj;
}

CMatrix last_period(const Trajectory& traj, double period) {
    const int M = whole_samples(period, traj.step, "period");
    const Eigen::Index n = traj.samples();
    if (n < M + 1) throw UsageError("last_period: trajectory shorter than one period");
    // Latest start index whose time is a multiple of the period and leaves M samples.
    for (Eigen::Index start = n - M; start >= 0; --start) {
        const double phase = traj.t[static_cast<std::size_t>(start)] / period;
        if (std::abs(phase - std::round(phase)) * M < 1e-6) return traj.x.middleCols(start, M);
    }
    throw UsageError("last_period: trajectory never crosses phase 0");
}

WaveformError compare_waveforms(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows()) throw UsageError("compare_waveforms: state counts differ");
    if (a.cols() == 0 || b.cols() == 0) throw UsageError("compare_waveforms: empty waveform");
    CMatrix bb = b;
    if (b.cols() != a.cols()) {
        // Trigonometric interpolation of b, evaluated at a's sample phases.
        const Eigen::Index Mb = b.cols();
        const Eigen::Index Ma = a.cols();
        const Eigen::Index K = (Mb - 1) / 2;
        bb.resize(b.rows(), Ma);
        CMatrix coeff(b.rows(), 2 * K + 1);
        for (Eigen::Index k = -K; k <= K; ++k) {
            CVector c = CVector::Zero(b.rows());
            for (Eigen::Index m = 0; m < Mb; ++m) {
                c += b.col(m) * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * m) / static_cast<double>(Mb));
            }
            coeff.col(k + K) = c / static_cast<double>(Mb);
        }
        for (Eigen::Index m = 0; m < Ma; ++m) {
            CVector v = CVector::Zero(b.rows());
            for (Eigen::Index k = -K; k <= K; ++k) {
                v += coeff.col(k + K) * std::polar(1.0, 2.0 * kPi * static_cast<double>(k * m) / static_cast<double>(Ma));
            }
            bb.col(m) = v;
        }
    }
    const Eigen::MatrixXd diff = (a - bb).cwiseAbs();
    WaveformError err;
    err.rms = (diff.array().square().rowwise().sum() / static_cast<double>(a.cols())).sqrt();
    err.max = diff.rowwise().maxCoeff();
    return err;
}

GrowthFit growth_rate_fit(const Trajectory& perturbed, const Trajectory& reference, int state, double onset,
                          double period, int skip_periods, double floor) {
    if (perturbed.samples() != reference.samples() || perturbed.step != reference.step) {
        throw UsageError("growth_rate_fit: trajectories are on different grids");
    }
    if (state < 0 || state >= perturbed.x.rows()) throw UsageError("growth_rate_fit: state index out of range");
    const int M = whole_samples(period, perturbed.step, "period");

    Eigen::Index first = 0;
    while (first < perturbed.samples() && perturbed.t[static_cast<std::size_t>(first)] < onset - 1e-9 * perturbed.step) {
        ++first;
    }
    first += static_cast<Eigen::Index>(skip_periods) * M;

    GrowthFit fit;
    std::vector<double> times;
    for (Eigen::Index s = first; s + M <= perturbed.samples(); s += M) {
        double acc = 0.0;
        for (Eigen::Index m = s; m < s + M; ++m) acc += std::norm(perturbed.x(state, m) - reference.x(state, m));
        fit.envelope.push_back(std::sqrt(acc / M));
        times.push_back(perturbed.t[static_cast<std::size_t>(s)] + 0.5 * period);
    }

    // Least-squares slope of log(envelope) over the periods above the floor.
    double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t p = 0; p < fit.envelope.size(); ++p) {
        if (!(fit.envelope[p] > floor)) {
            fit.floor_hit = true;
            break;
        }
        const double y = std::log(fit.envelope[p]);
        sw += 1;
        st += times[p];
        sy += y;
        stt += times[p] * times[p];
        sty += times[p] * y;
        ++fit.periods_used;
    }
    if (fit.periods_used < 3) {
        fit.floor_hit = true;
        fit.rate = -1e6;
        return fit;
    }
    fit.rate = (sw * sty - st * sy) / (sw * stt - st * st);
    return fit;
}

GrowthFit perturbation_growth(const SystemModel& model, const CVector& x0, const ProbeConfig& probe) {
    const double T = model.period();
    const double onset = std::round(probe.settle_periods) * T;
    const double horizon = std::round(probe.horizon_periods) * T;
    if (!(horizon > onset)) throw UsageError("perturbation probe: horizon must exceed the settling time");
    if (probe.state < 0 || probe.state >= model.n_states) throw UsageError("perturbation probe: bad state index");
    const Trajectory reference = integrate(model, x0, 0.0, horizon, probe.step);
    const Trajectory kicked =
        integrate(model, x0, 0.0, horizon, probe.step, Kick{probe.state, Complex(probe.magnitude, 0.0), onset});
    return growth_rate_fit(kicked, reference, probe.state, onset, T, probe.skip_periods);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << 't';
    for (Eigen::Index i = 0; i < traj.x.rows(); ++i) {
        const std::string label =
            static_cast<std::size_t>(i) < traj.state_labels.size() ? traj.state_labels[static_cast<std::size_t>(i)]
                                                                   : "x" + std::to_string(i);
        os << ",re_" << label << ",im_" << label;
    }
    os << '\n';
    for (Eigen::Index s = 0; s < traj.samples(); ++s) {
        os << csv::number(traj.t[static_cast<std::size_t>(s)]);
        for (Eigen::Index i = 0; i < traj.x.rows(); ++i) {
            os << ',' << csv::number(traj.x(i, s).real()) << ',' << csv::number(traj.x(i, s).imag());
        }
        os << '\n';
    }
}

}  // namespace ltp::oracle
