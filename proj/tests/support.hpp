#pragma once

// Deterministic random generators and small reference systems shared by the tests.

#include "ltp/cases.hpp"
#include "ltp/model.hpp"
#include "ltp/spectral.hpp"

#include <cstdint>
#include <random>

namespace ltp::test {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Complex complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

    CVector vector(Eigen::Index n, double scale = 1.0) {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = complex(scale);
        return v;
    }

    CMatrix matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex(scale);
        return m;
    }

    /// Random spectrum of a signal band-limited to `band` harmonics, stored at truncation N.
    SpectralVector spectrum(int N, int n, int band, double scale = 1.0) {
        SpectralVector X(N, n);
        for (int k = -band; k <= band; ++k) X.coeff(k) = vector(n, scale);
        return X;
    }

    /// State consistent with the model's conjugate pairs; real states get zero imaginary part.
    CVector paired_state(const SystemModel& model, double scale = 1.0) {
        CVector x = vector(model.n_states, scale);
        for (const auto& [i, j] : model.conjugate_pairs) {
            if (i == j) x(i) = x(i).real();
            else x(j) = std::conj(x(i));
        }
        return x;
    }

private:
    std::mt19937_64 rng_;
};

inline constexpr double kOmega50 = 2.0 * kPi * 50.0;

/// dx/dt = M x + B u with real states and a single forcing harmonic per input.
inline SystemModel lti(const CMatrix& M, const CMatrix& B, std::vector<HarmonicSeed> forcing = {}) {
    const Eigen::Index n = M.rows();
    return cases::make_linear_model(M, B, CMatrix::Identity(n, n), CMatrix::Zero(n, B.cols()), kOmega50,
                                    std::move(forcing));
}

/// max |a - b| over all entries.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace ltp::test
