#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace hessmfg {

// Symmetric d x d matrix, d in {1, 2}, stored as (m11, m22, m12).
// For d = 1 only m11 is meaningful; the other entries stay zero.
struct SymMatrix {
    int d = 1;
    std::array<double, 3> v{0.0, 0.0, 0.0};  // m11, m22, m12

    static SymMatrix scalar(double z) {
        SymMatrix m;
        m.d = 1;
        m.v[0] = z;
        return m;
    }

    static SymMatrix of2(double m11, double m22, double m12) {
        SymMatrix m;
        m.d = 2;
        m.v = {m11, m22, m12};
        return m;
    }

    static SymMatrix zero(int d) {
        SymMatrix m;
        m.d = d;
        return m;
    }

    static SymMatrix identity(int d) {
        SymMatrix m;
        m.d = d;
        m.v[0] = 1.0;
        if (d == 2) m.v[1] = 1.0;
        return m;
    }

    double m11() const { return v[0]; }
    double m22() const { return v[1]; }
    double m12() const { return v[2]; }

    double trace() const { return d == 1 ? v[0] : v[0] + v[1]; }

    // Frobenius norm: sqrt(sum of squared entries), off-diagonal counted twice.
    double frobenius_norm() const {
        if (d == 1) return std::abs(v[0]);
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + 2.0 * v[2] * v[2]);
    }

    // Full entrywise inner product sum_ij A_ij B_ij (off-diagonal twice).
    double dot(const SymMatrix& o) const {
        if (d == 1) return v[0] * o.v[0];
        return v[0] * o.v[0] + v[1] * o.v[1] + 2.0 * v[2] * o.v[2];
    }

    SymMatrix operator+(const SymMatrix& o) const {
        SymMatrix r = *this;
        for (int k = 0; k < 3; ++k) r.v[k] += o.v[k];
        return r;
    }

    SymMatrix operator-(const SymMatrix& o) const {
        SymMatrix r = *this;
        for (int k = 0; k < 3; ++k) r.v[k] -= o.v[k];
        return r;
    }

    SymMatrix operator*(double s) const {
        SymMatrix r = *this;
        for (int k = 0; k < 3; ++k) r.v[k] *= s;
        return r;
    }

    // Smallest eigenvalue (d = 2) or the single entry (d = 1).
    double min_eigenvalue() const {
        if (d == 1) return v[0];
        const double tr = v[0] + v[1];
        const double diff = v[0] - v[1];
        const double disc = std::sqrt(diff * diff + 4.0 * v[2] * v[2]);
        return 0.5 * (tr - disc);
    }

    bool is_psd(double tol = 0.0) const { return min_eigenvalue() >= -tol; }
};

inline SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

}  // namespace hessmfg
