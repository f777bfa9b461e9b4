#pragma once

// Scalar intermediate signal of a case model together with its exact partial
// derivatives with respect to the state vector and the input vector. Rows are
// left empty when only values are needed (integration), so the value path does
// not allocate.

#include "ltp/types.hpp"

namespace ltp::cases::detail {

struct Term {
    Complex v{};
    CRow dx;  // d/dx, length n (or 0)
    CRow du;  // d/du, length m (or 0)
};

struct TermSpace {
    int n = 0;
    int m = 0;
    bool grad = false;

    [[nodiscard]] Term constant(Complex c) const {
        Term t{c, CRow(), CRow()};
        if (grad) {
            t.dx = CRow::Zero(n);
            t.du = CRow::Zero(m);
        }
        return t;
    }
    [[nodiscard]] Term state(const CVector& x, int i) const {
        Term t = constant(x(i));
        if (grad) t.dx(i) = 1.0;
        return t;
    }
    [[nodiscard]] Term input(const CVector& u, int i) const {
        Term t = constant(u(i));
        if (grad) t.du(i) = 1.0;
        return t;
    }
    /// e^{s j (w t + delta)} with delta = x(i_delta), s = +1 or -1.
    [[nodiscard]] Term rotation(double wt, const CVector& x, int i_delta, double sign) const {
        const Complex e = std::exp(Complex(0.0, sign) * (wt + x(i_delta)));
        Term t = constant(e);
        if (grad) t.dx(i_delta) = Complex(0.0, sign) * e;
        return t;
    }
};

inline Term operator+(Term a, const Term& b) {
    a.v += b.v;
    if (a.dx.size()) {
        a.dx += b.dx;
        a.du += b.du;
    }
    return a;
}

inline Term operator-(Term a, const Term& b) {
    a.v -= b.v;
    if (a.dx.size()) {
        a.dx -= b.dx;
        a.du -= b.du;
    }
    return a;
}

inline Term operator*(Complex c, Term a) {
    a.v *= c;
    if (a.dx.size()) {
        a.dx *= c;
        a.du *= c;
    }
    return a;
}

inline Term operator*(double c, Term a) { return Complex(c, 0.0) * std::move(a); }

/// Product rule.
inline Term operator*(const Term& a, const Term& b) {
    Term t{a.v * b.v, CRow(), CRow()};
    if (a.dx.size()) {
        t.dx = a.v * b.dx + b.v * a.dx;
        t.du = a.v * b.du + b.v * a.du;
    }
    return t;
}

}  // namespace ltp::cases::detail
