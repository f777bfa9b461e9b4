#pragma once

#include "ltp/model.hpp"
#include "ltp/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ltp {

/// Harmonic state-space form of an LTP system:
///     (s I + N_blk) X = A X + B U,   Y = C X + D U
struct HssMatrices {
    BlockToeplitz A_tp, B_tp, C_tp, D_tp;
    ModulationMatrix nblk;
    int N = 0;
    int n = 0, m = 0, p = 0;

    [[nodiscard]] Eigen::Index dimension() const { return static_cast<Eigen::Index>(2 * N + 1) * n; }
    /// Dense A - N_blk.
    [[nodiscard]] CMatrix state_matrix() const;
};

/// Evaluates A(t), B(t), C(t), D(t) along one period of `waveform` (columns x(t_m))
/// with u = model.input_fn(t_m) and assembles the Toeplitz operators.
HssMatrices linearize(const SystemModel& model, const CMatrix& waveform, const HarmonicGrid& grid, int truncation);

enum class Verdict { Stable, Unstable, Marginal };
std::string to_string(Verdict v);

struct ModeSet {
    std::vector<Complex> eigenvalues;
    /// Principal copies (see hss_modes); the weakest mode is taken from these.
    std::vector<Complex> principal;
    Complex weakest{};
    Verdict verdict = Verdict::Stable;
    double marginal_band = 0.0;
};

/// Full spectrum of A - N_blk.
std::vector<Complex> hss_eigenvalues(const HssMatrices& hss);

/// Eigenvalue with the harmonic distribution of its eigenvector.
struct HssMode {
    Complex value{};
    double centroid = 0.0;       ///< energy-weighted mean harmonic index
    double tail_fraction = 0.0;  ///< eigenvector energy in the harmonics +-N
};

/// Eigenvalues of A - N_blk with eigenvector diagnostics, ordered like hss_eigenvalues.
/// Every Floquet exponent appears as copies lambda + j k omega1 whose centroids
/// differ by one, so exactly one copy is centred (|centroid| <= 1/2). Modes
/// created by cutting the harmonic coupling at +-N sit at the truncation edge
/// (|centroid| near N) and have no centred copy.
std::vector<HssMode> hss_modes(const HssMatrices& hss);

/// Maximum real part; ties go to the smallest |Im|, then to Im >= 0.
Complex weakest_mode(const std::vector<Complex>& eigenvalues);

Verdict classify_stability(Complex weakest, double marginal_band = 0.0);

/// Bound on |centroid| for the principal copy of a mode.
inline constexpr double kPrincipalCentroid = 0.5;

/// Weakest mode and verdict over the principal copies.
ModeSet analyze_modes(const HssMatrices& hss, double marginal_band = 0.0);

/// H(s) = C (sI + N_blk - A)^-1 B + D, dimension (2N+1)p x (2N+1)m.
CMatrix harmonic_transfer_function(const HssMatrices& hss, Complex s);
/// Same, with the singularity test done against precomputed eigenvalues of A - N_blk.
CMatrix harmonic_transfer_function(const HssMatrices& hss, Complex s, const std::vector<Complex>& eigenvalues);

struct ScanPoint {
    double f_hz = 0.0;
    bool singular = false;
    Complex diag{};          ///< output harmonic 0 <- input harmonic 0
    Complex mirror_plus{};   ///< output harmonic +2 <- mirror input harmonic 0
    Complex mirror_minus{};  ///< output harmonic -2 <- mirror input harmonic 0
};

/// Transfer entries of one output channel at s = j 2 pi f. The mirror entries are
/// read from `mirror_input_index` (default: the same input). With conjugate
/// input pairs (u, u*), mirror-frequency coupling appears in the u* column.
std::vector<ScanPoint> frequency_scan(const HssMatrices& hss, const std::vector<double>& freqs_hz, int input_index,
                                      int output_index, int mirror_input_index = -1);
void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& scan);

}  // namespace ltp
