#include "ltp/hss_analysis.hpp"

#include "ltp/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ltp {

CMatrix HssMatrices::state_matrix() const {
    CMatrix M = A_tp.dense();
    M.diagonal() -= nblk.diagonal();
    return M;
}

HssMatrices linearize(const SystemModel& model, const CMatrix& waveform, const HarmonicGrid& grid, int truncation) {
    const int M = grid.samples();
    if (waveform.cols() != M || waveform.rows() != model.n_states) {
        throw UsageError("linearize: waveform must be n_states x one period of samples");
    }
    std::vector<CMatrix> a(M), b(M), c(M), d(M);
    for (int m = 0; m < M; ++m) {
        const double t = grid.time(m);
        const CVector x = waveform.col(m);
        const CVector u = model.input_fn(t);
        Jacobians J = eval_jacobians(model, t, x, u);
        a[m] = std::move(J.A);
        b[m] = std::move(J.B);
        c[m] = std::move(J.C);
        d[m] = std::move(J.D);
    }
    HssMatrices hss;
    hss.A_tp = build_toeplitz(a, grid, truncation);
    hss.B_tp = build_toeplitz(b, grid, truncation);
    hss.C_tp = build_toeplitz(c, grid, truncation);
    hss.D_tp = build_toeplitz(d, grid, truncation);
    hss.nblk = build_nblk(model.n_states, truncation, model.omega1);
    hss.N = truncation;
    hss.n = model.n_states;
    hss.m = model.n_inputs;
    hss.p = model.n_outputs;
    return hss;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::Unstable: return "Unstable";
        case Verdict::Marginal: return "Marginal";
    }
    return "?";
}

namespace {

void sort_by_real_part(std::vector<Complex>& v) {
    // Deterministic order: by real part descending, then imaginary part.
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
}

[[noreturn]] void eigen_failure(const CMatrix& M) {
    Eigen::JacobiSVD<CMatrix> svd(M);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    throw NumericError("eigenvalue computation failed (dimension " + std::to_string(M.rows()) + ", condition " +
                       std::to_string(cond) + ")");
}

}  // namespace

std::vector<Complex> hss_eigenvalues(const HssMatrices& hss) {
    const CMatrix M = hss.state_matrix();
    Eigen::ComplexEigenSolver<CMatrix> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) eigen_failure(M);
    const CVector& ev = solver.eigenvalues();
    std::vector<Complex> out(ev.data(), ev.data() + ev.size());
    sort_by_real_part(out);
    return out;
}

std::vector<HssMode> hss_modes(const HssMatrices& hss) {
    const CMatrix M = hss.state_matrix();
    Eigen::ComplexEigenSolver<CMatrix> solver(M, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) eigen_failure(M);
    const int N = hss.N;
    const Eigen::Index n = hss.n;
    std::vector<HssMode> modes;
    modes.reserve(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const auto v = solver.eigenvectors().col(i);
        const double total = v.squaredNorm();
        HssMode mode;
        mode.value = solver.eigenvalues()(i);
        double tail = 0.0;
        for (int k = -N; k <= N; ++k) {
            const double e = v.segment(static_cast<Eigen::Index>(k + N) * n, n).squaredNorm();
            mode.centroid += k * e;
            if (N > 0 && std::abs(k) == N) tail += e;
        }
        if (total > 0.0) {
            mode.centroid /= total;
            mode.tail_fraction = tail / total;
        }
        modes.push_back(mode);
    }
    std::sort(modes.begin(), modes.end(), [](const HssMode& a, const HssMode& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return modes;
}

Complex weakest_mode(const std::vector<Complex>& eigenvalues) {
    if (eigenvalues.empty()) throw UsageError("weakest_mode: empty eigenvalue list");
    Complex best = eigenvalues.front();
    for (Complex e : eigenvalues) {
        if (e.real() > best.real()) {
            best = e;
        } else if (e.real() == best.real()) {
            const double ae = std::abs(e.imag());
            const double ab = std::abs(best.imag());
            if (ae < ab || (ae == ab && e.imag() >= 0.0 && best.imag() < 0.0)) best = e;
        }
    }
    return best;
}

Verdict classify_stability(Complex weakest, double marginal_band) {
    if (marginal_band < 0.0) throw UsageError("classify_stability: marginal band must be >= 0");
    const double re = weakest.real();
    if (re > marginal_band) return Verdict::Unstable;
    if (re < -marginal_band) return Verdict::Stable;
    return Verdict::Marginal;
}

ModeSet analyze_modes(const HssMatrices& hss, double marginal_band) {
    ModeSet modes;
    for (const HssMode& m : hss_modes(hss)) {
        modes.eigenvalues.push_back(m.value);
        if (std::abs(m.centroid) <= kPrincipalCentroid + 1e-9) modes.principal.push_back(m.value);
    }
    modes.weakest = weakest_mode(modes.principal.empty() ? modes.eigenvalues : modes.principal);
    modes.verdict = classify_stability(modes.weakest, marginal_band);
    modes.marginal_band = marginal_band;
    return modes;
}

CMatrix harmonic_transfer_function(const HssMatrices& hss, Complex s, const std::vector<Complex>& eigenvalues) {
    const double guard = 1e-8 * hss.nblk.omega1();
    for (Complex e : eigenvalues) {
        if (std::abs(s - e) <= guard) throw SingularAtFrequency(s);
    }
    CMatrix K = -hss.state_matrix();
    K.diagonal().array() += s;
    Eigen::PartialPivLU<CMatrix> lu(K);
    CMatrix X = lu.solve(hss.B_tp.dense());
    return hss.C_tp.dense() * X + hss.D_tp.dense();
}

CMatrix harmonic_transfer_function(const HssMatrices& hss, Complex s) {
    if (hss.n == 0) return hss.D_tp.dense();
    return harmonic_transfer_function(hss, s, hss_eigenvalues(hss));
}

std::vector<ScanPoint> frequency_scan(const HssMatrices& hss, const std::vector<double>& freqs_hz, int input_index,
                                      int output_index, int mirror_input_index) {
    if (mirror_input_index < 0) mirror_input_index = input_index;
    if (input_index < 0 || input_index >= hss.m || output_index < 0 || output_index >= hss.p ||
        mirror_input_index >= hss.m) {
        throw UsageError("frequency_scan: input/output index out of range");
    }
    const std::vector<Complex> eigs = hss.n > 0 ? hss_eigenvalues(hss) : std::vector<Complex>{};
    const int N = hss.N;
    auto row = [&](int k) { return static_cast<Eigen::Index>(k + N) * hss.p + output_index; };
    const Eigen::Index col = static_cast<Eigen::Index>(N) * hss.m + input_index;
    const Eigen::Index mirror_col = static_cast<Eigen::Index>(N) * hss.m + mirror_input_index;

    std::vector<ScanPoint> scan;
    scan.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        ScanPoint pt;
        pt.f_hz = f;
        try {
            const CMatrix H = harmonic_transfer_function(hss, Complex(0.0, 2.0 * kPi * f), eigs);
            pt.diag = H(row(0), col);
            if (N >= 2) {
                pt.mirror_plus = H(row(2), mirror_col);
                pt.mirror_minus = H(row(-2), mirror_col);
            }
        } catch (const SingularAtFrequency&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            pt.singular = true;
            pt.diag = pt.mirror_plus = pt.mirror_minus = Complex(nan, nan);
        }
        scan.push_back(pt);
    }
    return scan;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& scan) {
    os << "f_hz,re_diag,im_diag,re_mirror_plus,im_mirror_plus,re_mirror_minus,im_mirror_minus,singular\n";
    for (const auto& pt : scan) {
        csv::field(os, pt.f_hz);
        csv::field(os, pt.diag.real());
        csv::field(os, pt.diag.imag());
        csv::field(os, pt.mirror_plus.real());
        csv::field(os, pt.mirror_plus.imag());
        csv::field(os, pt.mirror_minus.real());
        csv::field(os, pt.mirror_minus.imag());
        os << (pt.singular ? 1 : 0) << '\n';
    }
}

}  // namespace ltp
