#include "ltp/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ltp {

HarmonicGrid::HarmonicGrid(double period, double step, int truncation) : period_(period), step_(step) {
    if (!(period > 0.0) || !(step > 0.0)) {
        throw UsageError("harmonic grid: period and step must be > 0");
    }
    if (truncation < 0) throw UsageError("harmonic grid: truncation order must be >= 0");
    const double ratio = period / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw UsageError("harmonic grid: period is not an integer multiple of the step");
    }
    samples_ = static_cast<int>(rounded);
    if (samples_ < 2 * (2 * truncation + 1)) {
        throw UsageError("harmonic grid: " + std::to_string(samples_) + " samples cannot resolve truncation order " +
                         std::to_string(truncation));
    }
    roots_.resize(samples_);
    for (int m = 0; m < samples_; ++m) {
        const double angle = 2.0 * kPi * m / samples_;
        roots_[m] = Complex(std::cos(angle), std::sin(angle));
    }
}

Complex HarmonicGrid::phasor(int k, int m) const {
    long idx = (static_cast<long>(k) * m) % samples_;
    if (idx < 0) idx += samples_;
    return roots_[static_cast<std::size_t>(idx)];
}

SpectralVector::SpectralVector(int truncation, int n_states)
    : N_(truncation), n_(n_states), data_(CVector::Zero(static_cast<Eigen::Index>(2 * truncation + 1) * n_states)) {}

SpectralVector::SpectralVector(int truncation, int n_states, CVector stacked)
    : N_(truncation), n_(n_states), data_(std::move(stacked)) {
    if (data_.size() != static_cast<Eigen::Index>(2 * N_ + 1) * n_) {
        throw UsageError("spectral vector: stacked length does not match (2N+1)n");
    }
}

Eigen::Index SpectralVector::offset(int k) const {
    if (k < -N_ || k > N_) {
        throw UsageError("spectral vector: harmonic " + std::to_string(k) + " outside [-N, N]");
    }
    return static_cast<Eigen::Index>(k + N_) * n_;
}

double SpectralVector::conjugate_defect(const std::vector<std::pair<int, int>>& pairs) const {
    double worst = 0.0;
    for (int k = -N_; k <= N_; ++k) {
        for (auto [i, j] : pairs) {
            worst = std::max(worst, std::abs(at(k, j) - std::conj(at(-k, i))));
        }
    }
    return worst;
}

BlockToeplitz::BlockToeplitz(int truncation, std::vector<CMatrix> blocks) : N_(truncation), blocks_(std::move(blocks)) {
    if (blocks_.size() != static_cast<std::size_t>(4 * N_ + 1)) {
        throw UsageError("block Toeplitz: expected 4N+1 Fourier blocks");
    }
}

const CMatrix& BlockToeplitz::block(int m) const {
    if (m < -2 * N_ || m > 2 * N_) throw UsageError("block Toeplitz: block index outside [-2N, 2N]");
    return blocks_[static_cast<std::size_t>(m + 2 * N_)];
}

CMatrix BlockToeplitz::dense() const {
    const Eigen::Index r = block_rows();
    const Eigen::Index c = block_cols();
    const int H = 2 * N_ + 1;
    CMatrix out(H * r, H * c);
    for (int k = -N_; k <= N_; ++k) {
        for (int m = -N_; m <= N_; ++m) {
            out.block((k + N_) * r, (m + N_) * c, r, c) = block(k - m);
        }
    }
    return out;
}

ModulationMatrix::ModulationMatrix(int n, int truncation, double omega1) : n_(n), N_(truncation), omega1_(omega1) {
    if (n < 1) throw UsageError("modulation matrix: n must be >= 1");
    if (truncation < 0) throw UsageError("modulation matrix: N must be >= 0");
}

CVector ModulationMatrix::diagonal() const {
    CVector d(dimension());
    for (int k = -N_; k <= N_; ++k) {
        d.segment(static_cast<Eigen::Index>(k + N_) * n_, n_).setConstant(Complex(0.0, k * omega1_));
    }
    return d;
}

CMatrix ModulationMatrix::dense() const { return diagonal().asDiagonal(); }

SpectralVector samples_to_spectrum(const CMatrix& samples, const HarmonicGrid& grid, int truncation) {
    const int M = grid.samples();
    if (samples.cols() != M) {
        throw UsageError("samples_to_spectrum: got " + std::to_string(samples.cols()) +
                         " samples, grid holds exactly one period of " + std::to_string(M));
    }
    const int n = static_cast<int>(samples.rows());
    SpectralVector X(truncation, n);
    for (int k = -truncation; k <= truncation; ++k) {
        CVector acc = CVector::Zero(n);
        for (int m = 0; m < M; ++m) {
            acc.noalias() += samples.col(m) * std::conj(grid.phasor(k, m));
        }
        X.coeff(k) = acc / static_cast<double>(M);
    }
    return X;
}

CMatrix spectrum_to_samples(const SpectralVector& spectrum, const HarmonicGrid& grid) {
    const int M = grid.samples();
    const int N = spectrum.truncation();
    CMatrix out = CMatrix::Zero(spectrum.n_states(), M);
    for (int m = 0; m < M; ++m) {
        for (int k = -N; k <= N; ++k) {
            out.col(m).noalias() += spectrum.coeff(k) * grid.phasor(k, m);
        }
    }
    return out;
}

CVector spectrum_at(const SpectralVector& spectrum, double omega1, double t) {
    const int N = spectrum.truncation();
    CVector out = CVector::Zero(spectrum.n_states());
    for (int k = -N; k <= N; ++k) {
        out.noalias() += spectrum.coeff(k) * std::polar(1.0, k * omega1 * t);
    }
    return out;
}

BlockToeplitz build_toeplitz(const std::vector<CMatrix>& matrix_samples, const HarmonicGrid& grid, int truncation) {
    const int M = grid.samples();
    if (static_cast<int>(matrix_samples.size()) != M) {
        throw UsageError("build_toeplitz: expected one full period of matrix samples");
    }
    const Eigen::Index r = matrix_samples.front().rows();
    const Eigen::Index c = matrix_samples.front().cols();
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(4 * truncation + 1));
    for (int k = -2 * truncation; k <= 2 * truncation; ++k) {
        CMatrix acc = CMatrix::Zero(r, c);
        for (int m = 0; m < M; ++m) {
            acc.noalias() += matrix_samples[static_cast<std::size_t>(m)] * std::conj(grid.phasor(k, m));
        }
        blocks.push_back(acc / static_cast<double>(M));
    }
    return BlockToeplitz(truncation, std::move(blocks));
}

ModulationMatrix build_nblk(int n, int truncation, double omega1) { return ModulationMatrix(n, truncation, omega1); }

}  // namespace ltp
