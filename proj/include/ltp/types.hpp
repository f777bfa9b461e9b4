#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using CRow = Eigen::RowVectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kJ{0.0, 1.0};

// =============================================================================
// Errors
// =============================================================================

/// Bad arguments or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Generic numerical failure (eigen-solver breakdown and similar).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The Newton iteration matrix (N_blk - A) is numerically singular.
class SingularIterationMatrix : public NumericError {
public:
    explicit SingularIterationMatrix(double condition)
        : NumericError("singular iteration matrix (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}
    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A trajectory (Fourier iterate or time integration) produced NaN/Inf.
class DivergedTrajectory : public NumericError {
public:
    explicit DivergedTrajectory(const std::string& what, double time = 0.0)
        : NumericError(what), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class MaxIterationsExceeded : public NumericError {
public:
    explicit MaxIterationsExceeded(std::vector<double> history)
        : NumericError("maximum Newton iterations exceeded"), history_(std::move(history)) {}
    [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// s lies on (or numerically next to) an eigenvalue of A - N_blk.
class SingularAtFrequency : public NumericError {
public:
    explicit SingularAtFrequency(Complex s)
        : NumericError("harmonic transfer function singular at s = (" + std::to_string(s.real()) + ", " +
                       std::to_string(s.imag()) + ")"),
          s_(s) {}
    [[nodiscard]] Complex s() const noexcept { return s_; }

private:
    Complex s_;
};

}  // namespace ltp
