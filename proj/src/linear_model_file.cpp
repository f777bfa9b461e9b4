#include "ltp/cases.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace ltp::cases {

namespace {

using nlohmann::json;

Complex parse_entry(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw UsageError("linear model: bad matrix entry in '" + where + "'");
}

CMatrix parse_matrix(const json& doc, const std::string& key, Eigen::Index rows, Eigen::Index cols) {
    if (!doc.contains(key)) {
        if (rows >= 0 && cols >= 0) return CMatrix::Zero(rows, cols);
        throw UsageError("linear model: missing matrix '" + key + "'");
    }
    const json& m = doc.at(key);
    if (!m.is_array()) throw UsageError("linear model: '" + key + "' must be an array of rows");
    const auto r = static_cast<Eigen::Index>(m.size());
    const Eigen::Index c = r > 0 && m[0].is_array() ? static_cast<Eigen::Index>(m[0].size()) : 0;
    if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
        throw UsageError("linear model: matrix '" + key + "' has wrong dimensions");
    }
    CMatrix out(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = m[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw UsageError("linear model: ragged matrix '" + key + "'");
        }
        for (Eigen::Index j = 0; j < c; ++j) out(i, j) = parse_entry(row[static_cast<std::size_t>(j)], key);
    }
    return out;
}

}  // namespace

SystemModel make_linear_model(CMatrix A, CMatrix B, CMatrix C, CMatrix D, double omega1,
                              std::vector<HarmonicSeed> input_harmonics) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols()) {
        throw UsageError("linear model: inconsistent A/B/C/D dimensions");
    }
    if (!(omega1 > 0.0)) throw UsageError("linear model: omega1 must be > 0");
    for (const auto& h : input_harmonics) {
        if (h.state < 0 || h.state >= B.cols()) throw UsageError("linear model: input harmonic index out of range");
    }

    SystemModel m;
    m.name = "linear";
    m.n_states = static_cast<int>(n);
    m.n_inputs = static_cast<int>(B.cols());
    m.n_outputs = static_cast<int>(C.rows());
    m.omega1 = omega1;
    for (Eigen::Index i = 0; i < n; ++i) {
        m.state_labels.push_back("x" + std::to_string(i));
        m.conjugate_pairs.emplace_back(static_cast<int>(i), static_cast<int>(i));
    }
    m.dynamics = [A, B](double, const CVector& x, const CVector& u) { return CVector(A * x + B * u); };
    m.output = [C, D](double, const CVector& x, const CVector& u) { return CVector(C * x + D * u); };
    m.jac_state = [A](double, const CVector&, const CVector&) { return A; };
    m.jac_input = [B](double, const CVector&, const CVector&) { return B; };
    m.out_jac_state = [C](double, const CVector&, const CVector&) { return C; };
    m.out_jac_input = [D](double, const CVector&, const CVector&) { return D; };
    const int n_in = m.n_inputs;
    m.input_fn = [input_harmonics, omega1, n_in](double t) {
        CVector u = CVector::Zero(n_in);
        for (const auto& h : input_harmonics) u(h.state) += h.value * std::polar(1.0, h.k * omega1 * t);
        return u;
    };
    return m;
}

SystemModel load_linear_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("model file '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw UsageError("model file '" + path + "': expected a JSON object");
    for (const auto& [key, _] : doc.items()) {
        static const std::vector<std::string> known = {"omega1", "A", "B", "C", "D", "input_harmonics",
                                                       "state_labels", "conjugate_pairs", "name"};
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw UsageError("model file: unknown key '" + key + "'");
        }
    }
    if (!doc.contains("omega1") || !doc["omega1"].is_number()) {
        throw UsageError("model file: missing numeric 'omega1'");
    }
    const CMatrix A = parse_matrix(doc, "A", -1, -1);
    const Eigen::Index n = A.rows();
    const CMatrix B = parse_matrix(doc, "B", n, -1);
    const CMatrix C = doc.contains("C") ? parse_matrix(doc, "C", -1, n) : CMatrix(CMatrix::Identity(n, n));
    const CMatrix D = parse_matrix(doc, "D", C.rows(), B.cols());

    std::vector<HarmonicSeed> harmonics;
    if (doc.contains("input_harmonics")) {
        for (const auto& h : doc["input_harmonics"]) {
            harmonics.push_back({h.value("input", 0), h.value("k", 0), Complex(h.value("re", 0.0), h.value("im", 0.0))});
        }
    }
    SystemModel m = make_linear_model(A, B, C, D, doc["omega1"].get<double>(), std::move(harmonics));
    if (doc.contains("name")) m.name = doc["name"].get<std::string>();
    if (doc.contains("state_labels")) {
        auto labels = doc["state_labels"].get<std::vector<std::string>>();
        if (static_cast<Eigen::Index>(labels.size()) != n) throw UsageError("model file: state_labels size mismatch");
        m.state_labels = std::move(labels);
    }
    if (doc.contains("conjugate_pairs")) {
        m.conjugate_pairs.clear();
        for (const auto& p : doc["conjugate_pairs"]) {
            const int i = p.at(0).get<int>();
            const int j = p.at(1).get<int>();
            if (i < 0 || j < 0 || i >= n || j >= n) throw UsageError("model file: conjugate pair out of range");
            m.conjugate_pairs.emplace_back(i, j);
        }
    }
    return m;
}

}  // namespace ltp::cases
