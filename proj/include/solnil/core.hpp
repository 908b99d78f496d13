#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "solnil/errors.hpp"

namespace solnil {

using Vec = std::vector<double>;
using Vec3 = std::array<double, 3>;

// Dense square matrix, row-major. Dimensions here are tiny (2..5), so no
// attempt at blocking or expression templates.
struct SquareMat {
    int n = 0;
    std::vector<double> a;

    SquareMat() = default;
    explicit SquareMat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static SquareMat identity(int n_) {
        SquareMat m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }
};

// Rank-3 array, e.g. Christoffel symbols gamma(k,i,j) = Γ^k_{ij} or metric
// partials dg(k,i,j) = ∂_k g_{ij}.
struct Tensor3 {
    int n = 0;
    std::vector<double> a;

    Tensor3() = default;
    explicit Tensor3(int n_) : n(n_), a(static_cast<size_t>(n_) * n_ * n_, 0.0) {}

    double& operator()(int k, int i, int j) {
        return a[(static_cast<size_t>(k) * n + i) * n + j];
    }
    double operator()(int k, int i, int j) const {
        return a[(static_cast<size_t>(k) * n + i) * n + j];
    }
};

// Rank-4 array: curvature rm(l,k,i,j) = R^l_{kij}, Christoffel partials
// dgamma(m,k,i,j) = ∂_m Γ^k_{ij}, or frame curvature rf(a,b,c,d).
struct Tensor4 {
    int n = 0;
    std::vector<double> a;

    Tensor4() = default;
    explicit Tensor4(int n_) : n(n_), a(static_cast<size_t>(n_) * n_ * n_ * n_, 0.0) {}

    double& operator()(int l, int k, int i, int j) {
        return a[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
    }
    double operator()(int l, int k, int i, int j) const {
        return a[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
    }
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double dot3(const Vec3& x, const Vec3& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

inline double norm3(const Vec3& x) { return std::sqrt(dot3(x, x)); }

inline Vec3 cross3(const Vec3& x, const Vec3& y) {
    return {x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0]};
}

inline double one_norm(const SquareMat& m) {
    double best = 0.0;
    for (int j = 0; j < m.n; ++j) {
        double col = 0.0;
        for (int i = 0; i < m.n; ++i) col += std::abs(m(i, j));
        best = std::max(best, col);
    }
    return best;
}

// LU inverse with partial pivoting. Throws SingularMetric when the 1-norm
// condition estimate exceeds cond_limit (or a pivot vanishes outright).
inline SquareMat inverse(const SquareMat& m, double cond_limit = 1e12) {
    const int n = m.n;
    SquareMat lu = m;
    SquareMat inv = SquareMat::identity(n);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
        if (lu(piv, col) == 0.0) throw SingularMetric("matrix has zero pivot");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(lu.a[static_cast<size_t>(col) * n + j], lu.a[static_cast<size_t>(piv) * n + j]);
                std::swap(inv.a[static_cast<size_t>(col) * n + j], inv.a[static_cast<size_t>(piv) * n + j]);
            }
        }
        const double d = lu(col, col);
        for (int j = 0; j < n; ++j) {
            lu(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = lu(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                lu(r, j) -= f * lu(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    if (one_norm(m) * one_norm(inv) > cond_limit)
        throw SingularMetric("matrix condition estimate exceeds " + std::to_string(cond_limit));
    return inv;
}

// --- finite-difference stencils on uniformly sampled functions of s ---
//
// Interior points use 4th-order central stencils; the two samples at each
// end fall back to 2nd-order one-sided/short stencils. Residual sup-norms
// exclude those boundary samples, so the lower order there never dominates.

inline std::vector<double> derivative_samples(const std::vector<double>& f, double h) {
    const size_t n = f.size();
    if (n < 5) throw InsufficientSamples("need at least 5 samples for derivative stencils");
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    for (size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

inline std::vector<double> second_derivative_samples(const std::vector<double>& f, double h) {
    const size_t n = f.size();
    if (n < 5) throw InsufficientSamples("need at least 5 samples for second-derivative stencil");
    const double h2 = h * h;
    std::vector<double> d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    for (size_t i = 2; i + 2 < n; ++i)
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
    d[n - 2] = (f[n - 3] - 2.0 * f[n - 2] + f[n - 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

// --- deterministic pseudo-random streams ---
//
// splitmix64 gives a reproducible stream from (seed, index) with no state
// shared between corpus entries, so parallel evaluation order cannot change
// the generated values.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double unit_double(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi) from a named substream.
inline double uniform_stream(uint64_t seed, uint64_t index, uint64_t slot, double lo, double hi) {
    uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1)) ^ (0x8CB92BA72F3D8DD7ULL * (slot + 1));
    return lo + (hi - lo) * unit_double(splitmix64(s));
}

} // namespace solnil
