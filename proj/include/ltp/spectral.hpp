#pragma once

#include "ltp/types.hpp"

#include <utility>
#include <vector>

namespace ltp {

/// Uniform sampling of exactly one period: t_m = m*h, m = 0..M-1, M*h = T.
class HarmonicGrid {
public:
    HarmonicGrid(double period, double step, int truncation);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] int samples() const noexcept { return samples_; }
    [[nodiscard]] double omega1() const noexcept { return 2.0 * kPi / period_; }
    [[nodiscard]] double time(int m) const noexcept { return m * step_; }

    /// e^{j k omega1 t_m}; exact table lookup on the grid.
    [[nodiscard]] Complex phasor(int k, int m) const;

private:
    double period_;
    double step_;
    int samples_;
    std::vector<Complex> roots_;  // e^{j 2 pi m / M}
};

/// Stacked Fourier coefficients [X_(-N); ...; X_(0); ...; X_(+N)], each of length n.
class SpectralVector {
public:
    SpectralVector() = default;
    SpectralVector(int truncation, int n_states);
    SpectralVector(int truncation, int n_states, CVector stacked);

    [[nodiscard]] int truncation() const noexcept { return N_; }
    [[nodiscard]] int n_states() const noexcept { return n_; }
    [[nodiscard]] int harmonics() const noexcept { return 2 * N_ + 1; }

    [[nodiscard]] auto coeff(int k) { return data_.segment(offset(k), n_); }
    [[nodiscard]] auto coeff(int k) const { return data_.segment(offset(k), n_); }
    [[nodiscard]] Complex& at(int k, int state) { return data_(offset(k) + state); }
    [[nodiscard]] Complex at(int k, int state) const { return data_(offset(k) + state); }

    [[nodiscard]] CVector& stacked() noexcept { return data_; }
    [[nodiscard]] const CVector& stacked() const noexcept { return data_; }

    /// max |X_k[j] - conj(X_-k[i])| over the given pairs and all k.
    [[nodiscard]] double conjugate_defect(const std::vector<std::pair<int, int>>& pairs) const;

private:
    [[nodiscard]] Eigen::Index offset(int k) const;

    int N_ = 0;
    int n_ = 0;
    CVector data_;
};

/// Block-Toeplitz operator of a T-periodic matrix: block (k, m) = A_{k-m}, |k|,|m| <= N.
class BlockToeplitz {
public:
    BlockToeplitz() = default;
    BlockToeplitz(int truncation, std::vector<CMatrix> blocks);

    [[nodiscard]] int truncation() const noexcept { return N_; }
    [[nodiscard]] Eigen::Index block_rows() const { return blocks_.front().rows(); }
    [[nodiscard]] Eigen::Index block_cols() const { return blocks_.front().cols(); }
    /// Fourier block A_m, m = -2N..2N.
    [[nodiscard]] const CMatrix& block(int m) const;
    [[nodiscard]] CMatrix dense() const;

private:
    int N_ = 0;
    std::vector<CMatrix> blocks_;
};

/// diag(jk omega1 I_n), k = -N..N.
class ModulationMatrix {
public:
    ModulationMatrix() = default;
    ModulationMatrix(int n, int truncation, double omega1);

    [[nodiscard]] Eigen::Index dimension() const { return static_cast<Eigen::Index>(n_) * (2 * N_ + 1); }
    [[nodiscard]] CVector diagonal() const;
    [[nodiscard]] CMatrix dense() const;
    [[nodiscard]] double omega1() const noexcept { return omega1_; }

private:
    int n_ = 0;
    int N_ = 0;
    double omega1_ = 0.0;
};

/// Columns of `samples` are x(t_m) over one period of `grid`.
SpectralVector samples_to_spectrum(const CMatrix& samples, const HarmonicGrid& grid, int truncation);
CMatrix spectrum_to_samples(const SpectralVector& spectrum, const HarmonicGrid& grid);
/// Single-time reconstruction sum_k X_k e^{jk omega1 t}.
CVector spectrum_at(const SpectralVector& spectrum, double omega1, double t);

BlockToeplitz build_toeplitz(const std::vector<CMatrix>& matrix_samples, const HarmonicGrid& grid, int truncation);
ModulationMatrix build_nblk(int n, int truncation, double omega1);

}  // namespace ltp
