#include "ltp/hss_analysis.hpp"

#include "ltp/cases.hpp"
#include "ltp/pss_solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace ltp;
using ltp::test::Gen;

namespace {

HssMatrices lti_hss(const SystemModel& m, int N) {
    const HarmonicGrid grid(0.02, 50e-6, N);
    const CMatrix zero = CMatrix::Zero(m.n_states, grid.samples());
    return linearize(m, zero, grid, N);
}

// Distance from z to the nearest member of the set.
double nearest(const std::vector<Complex>& set, Complex z) {
    double best = std::numeric_limits<double>::infinity();
    for (Complex e : set) best = std::min(best, std::abs(e - z));
    return best;
}

std::vector<Complex> eigenvalues_of(const CMatrix& M) {
    Eigen::ComplexEigenSolver<CMatrix> es(M);
    const CVector v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

cases::CaseModels case2_at(double alpha_c, double k_sym_g) {
    auto p = cases::case2_defaults();
    p.set("alpha_c", alpha_c);
    p.set("k_sym_g", k_sym_g);
    return cases::build_case2(p);
}

}  // namespace

TEST_CASE("scalar decay at N = 1 gives three shifted copies") {
    const double a = 7.0;
    const HssMatrices hss = lti_hss(test::lti(CMatrix::Constant(1, 1, -a), CMatrix::Zero(1, 1)), 1);
    const auto eig = hss_eigenvalues(hss);
    REQUIRE(eig.size() == 3);
    for (int k = -1; k <= 1; ++k) CHECK(nearest(eig, Complex(-a, k * test::kOmega50)) < 1e-12);
}

TEST_CASE("LTI spectrum is the exact set of shifted copies (property)") {
    Gen gen(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = gen.integer(1, 5);
        const int N = gen.integer(0, 5);
        const CMatrix M = gen.matrix(n, n, 80.0);
        const auto base = eigenvalues_of(M);
        const auto eig = hss_eigenvalues(lti_hss(test::lti(M, CMatrix::Zero(n, 1)), N));
        REQUIRE(eig.size() == static_cast<std::size_t>(n * (2 * N + 1)));
        for (Complex l : base)
            for (int k = -N; k <= N; ++k) CHECK(nearest(eig, l + Complex(0, k * test::kOmega50)) < 1e-9);
    }
}

TEST_CASE("centred copies of an LTI system are its own eigenvalues") {
    Gen gen(42);
    const CMatrix M = gen.matrix(3, 3, 50.0);
    const HssMatrices hss = lti_hss(test::lti(M, CMatrix::Zero(3, 1)), 4);
    for (const HssMode& mode : hss_modes(hss)) {
        CHECK(std::abs(mode.centroid - std::round(mode.centroid)) < 1e-9);
        CHECK(mode.tail_fraction == doctest::Approx(std::abs(mode.centroid) == 4.0 ? 1.0 : 0.0).epsilon(1e-9));
    }
    const ModeSet modes = analyze_modes(hss);
    REQUIRE(modes.principal.size() == 3);
    for (Complex l : eigenvalues_of(M)) CHECK(nearest(modes.principal, l) < 1e-9);
}

TEST_CASE("weakest mode tie rule") {
    CHECK(weakest_mode({{-1, 1}, {-1, -1}, {-5, 0}}) == Complex(-1, 1));
    CHECK(weakest_mode({{-1, 3}, {-1, -2}, {-5, 0}}) == Complex(-1, -2));
    CHECK(weakest_mode({{0.2, 400}, {0.1, 0}}) == Complex(0.2, 400));
}

TEST_CASE("stability classification with and without a marginal band") {
    CHECK(classify_stability({-3, 0}) == Verdict::Stable);
    CHECK(classify_stability({0.065, 10}) == Verdict::Unstable);
    CHECK(classify_stability({0.01, 0}, 0.05) == Verdict::Marginal);
    CHECK(classify_stability({-0.05, 0}, 0.05) == Verdict::Marginal);
    CHECK(classify_stability({0.0, 0}) == Verdict::Marginal);
    CHECK(to_string(Verdict::Unstable) == "Unstable");
    CHECK_THROWS_AS(classify_stability({0, 0}, -1.0), UsageError);
}

TEST_CASE("LTI transfer function: classical central block, zero off-diagonal blocks") {
    Gen gen(43);
    CMatrix M(2, 2);
    M << -40.0, 300.0, -300.0, -60.0;
    const CMatrix B = gen.matrix(2, 1), C = gen.matrix(1, 2), D = gen.matrix(1, 1);
    const SystemModel m = cases::make_linear_model(M, B, C, D, test::kOmega50, {});
    const HssMatrices hss = lti_hss(m, 3);
    const Complex s(3.0, 2.0 * kPi * 17.0);
    const CMatrix H = harmonic_transfer_function(hss, s);
    REQUIRE(H.rows() == 7);
    for (int k = -3; k <= 3; ++k) {
        const Complex sk = s + Complex(0, k * test::kOmega50);
        const CMatrix classical = C * (sk * CMatrix::Identity(2, 2) - M).inverse() * B + D;
        for (int l = -3; l <= 3; ++l) {
            const Complex expect = k == l ? classical(0, 0) : Complex(0.0);
            CHECK(std::abs(H(k + 3, l + 3) - expect) < 1e-12);
        }
    }
}

TEST_CASE("static map transfer function is the feedthrough") {
    CMatrix D(2, 1);
    D << Complex(0.5, 0.1), Complex(-2.0, 0.0);
    HssMatrices hss;
    hss.N = 2;
    hss.n = 0;
    hss.m = 1;
    hss.p = 2;
    std::vector<CMatrix> blocks(9, CMatrix::Zero(2, 1));
    blocks[4] = D;
    hss.D_tp = BlockToeplitz(2, blocks);
    for (double f : {0.0, 10.0, 333.0}) {
        const CMatrix H = harmonic_transfer_function(hss, Complex(0, 2 * kPi * f));
        CHECK(test::max_abs_diff(H, hss.D_tp.dense()) == 0.0);
        CHECK(H(2 * 2, 2) == D(0, 0));
    }
}

TEST_CASE("transfer function refuses eigenvalue frequencies and the scan flags them") {
    const double w = 2.0 * kPi * 10.0;
    CMatrix M(2, 2);
    M << 0.0, w, -w, 0.0;
    const SystemModel m = test::lti(M, CMatrix::Identity(2, 2));
    const HssMatrices hss = lti_hss(m, 2);
    CHECK_THROWS_AS(harmonic_transfer_function(hss, Complex(0, w)), SingularAtFrequency);
    const auto scan = frequency_scan(hss, {5.0, 10.0, 20.0}, 0, 0);
    CHECK_FALSE(scan[0].singular);
    CHECK(scan[1].singular);
    CHECK_FALSE(scan[2].singular);
    for (const auto& pt : scan) {
        if (pt.singular) continue;
        CHECK(std::abs(pt.mirror_plus) < 1e-15);
        CHECK(std::abs(pt.mirror_minus) < 1e-15);
    }
    std::ostringstream os;
    write_scan_csv(os, scan);
    CHECK(os.str().rfind("f_hz,re_diag,im_diag,re_mirror_plus,im_mirror_plus,re_mirror_minus,im_mirror_minus", 0) == 0);
    CHECK_THROWS_AS(frequency_scan(hss, {1.0}, 5, 0), UsageError);
}

TEST_CASE("single-L converter at an unbalanced grid: dimension and interior shift copies") {
    auto p = cases::case1_defaults();
    p.set("u_gbeta_mag", 0.5);
    const SolverResult r = solve_pss(cases::build_case1(p).closed_loop, SolverConfig{});
    REQUIRE(r.converged);
    CHECK(r.hss.dimension() == 54);
    const auto modes = hss_modes(r.hss);
    std::vector<Complex> all;
    for (const auto& m : modes) all.push_back(m.value);
    int interior = 0;
    for (const auto& m : modes) {
        if (std::abs(m.centroid) > 1.0 || m.tail_fraction > 0.01) continue;
        ++interior;
        CHECK(nearest(all, m.value + Complex(0, test::kOmega50)) < 1e-3 * test::kOmega50);
        CHECK(nearest(all, m.value - Complex(0, test::kOmega50)) < 1e-3 * test::kOmega50);
    }
    CHECK(interior >= 6);
    const ModeSet set = analyze_modes(r.hss);
    CHECK(set.principal.size() >= 6);
    CHECK(set.verdict == Verdict::Stable);
}

TEST_CASE("principal weakest mode does not depend on the truncation order") {
    const auto models = case2_at(170.0, 2.8);
    std::vector<double> re;
    for (int N : {4, 6}) {
        SolverConfig c;
        c.N = N;
        const SolverResult r = solve_pss(models.closed_loop, c);
        REQUIRE(r.converged);
        re.push_back(analyze_modes(r.hss).weakest.real());
    }
    CHECK(std::abs(re[0] - re[1]) < 1e-3);
}

TEST_CASE("LC converter HSS dimension") {
    const SolverResult r = solve_pss(cases::build_case2(cases::case2_defaults()).closed_loop, SolverConfig{});
    REQUIRE(r.converged);
    CHECK(r.hss.dimension() == 162);
    CHECK(analyze_modes(r.hss).verdict == Verdict::Stable);
}

TEST_CASE("mirror-frequency coupling comes from the PLL") {
    auto mirror_level = [](double alpha_pll) {
        auto p = cases::case1_defaults();
        p.set("alpha_pll", alpha_pll);
        const auto models = cases::build_case1(p);
        const SolverConfig c;
        const SolverResult r = solve_pss(models.closed_loop, c);
        const HssMatrices open = open_loop_hss(models, r, c);
        double worst = 0.0;
        for (const auto& pt : frequency_scan(open, {3.0, 10.0, 37.0, 80.0}, 0, 0, 1)) {
            REQUIRE_FALSE(pt.singular);
            worst = std::max({worst, std::abs(pt.mirror_plus), std::abs(pt.mirror_minus)});
        }
        return worst;
    };
    const double active = mirror_level(20.0);
    const double slow = mirror_level(0.2);
    CHECK(active > 1e-3);
    CHECK(slow < 0.05 * active);
}

TEST_CASE("closed-loop transfer function grows without bound near an HSS eigenvalue") {
    const SolverResult r = solve_pss(cases::build_case1(cases::case1_defaults()).closed_loop, SolverConfig{});
    const ModeSet modes = analyze_modes(r.hss);
    const Complex pole = modes.weakest;
    const double far = harmonic_transfer_function(r.hss, pole + Complex(0, 1.0)).cwiseAbs().maxCoeff();
    const double near = harmonic_transfer_function(r.hss, pole + Complex(0, 1e-4)).cwiseAbs().maxCoeff();
    CHECK(near > 1e3 * far);
}
