#pragma once

#include <cmath>

#include "solnil/chart.hpp"
#include "solnil/core.hpp"

namespace solnil {

inline SquareMat metric_at(const ChartMetric& chart, const Vec& p) {
    check_domain(chart, p);
    return chart.g(p);
}

inline SquareMat metric_inverse_at(const ChartMetric& chart, const Vec& p) {
    return inverse(metric_at(chart, p));
}

/// Levi-Civita connection coefficients Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} - ∂_l g_{ij}).
inline Tensor3 christoffel_at(const ChartMetric& chart, const Vec& p) {
    check_domain(chart, p);
    const int n = chart.dim;
    const Tensor3 dg = chart.dg(p);
    const SquareMat ginv = inverse(chart.g(p));
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                gamma(k, i, j) = 0.5 * s;
                gamma(k, j, i) = gamma(k, i, j);
            }
    return gamma;
}

/// ∂_m Γ^k_{ij}, assembled from the closed-form metric partials via
/// ∂ g^{-1} = -g^{-1} (∂g) g^{-1}.
inline Tensor4 christoffel_partials_at(const ChartMetric& chart, const Vec& p) {
    check_domain(chart, p);
    const int n = chart.dim;
    const Tensor3 dg = chart.dg(p);
    const Tensor4 ddg = chart.ddg(p);
    const SquareMat ginv = inverse(chart.g(p));

    // dginv(m,k,l) = ∂_m g^{kl}
    Tensor3 dginv(n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        s -= ginv(k, a) * dg(m, a, b) * ginv(b, l);
                dginv(m, k, l) = s;
            }

    Tensor4 dgamma(n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        s += dginv(m, k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                        s += ginv(k, l) * (ddg(m, i, j, l) + ddg(m, j, i, l) - ddg(m, l, i, j));
                    }
                    dgamma(m, k, i, j) = 0.5 * s;
                    dgamma(m, k, j, i) = dgamma(m, k, i, j);
                }
    return dgamma;
}

/// Mixed curvature components, R^l_{kij} = ∂_i Γ^l_{kj} - ∂_j Γ^l_{ki}
/// + Γ^l_{it} Γ^t_{kj} - Γ^l_{jt} Γ^t_{ki}, so that R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l.
inline Tensor4 riemann_mixed_at(const ChartMetric& chart, const Vec& p) {
    const int n = chart.dim;
    const Tensor3 gamma = christoffel_at(chart, p);
    const Tensor4 dgamma = christoffel_partials_at(chart, p);
    Tensor4 rm(n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double s = dgamma(i, l, k, j) - dgamma(j, l, k, i);
                    for (int t = 0; t < n; ++t)
                        s += gamma(l, i, t) * gamma(t, k, j) - gamma(l, j, t) * gamma(t, k, i);
                    rm(l, k, i, j) = s;
                    rm(l, k, j, i) = -s;
                }
    return rm;
}

inline void require_orthonormal(const ChartMetric& chart, const FrameField& frame, const Vec& p,
                                double tol = 1e-8) {
    const int n = chart.dim;
    const SquareMat g = metric_at(chart, p);
    const SquareMat e = frame.vectors(p);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m)
                    s += g(k, m) * e(k, a) * e(m, b);
            const double target = (a == b) ? 1.0 : 0.0;
            if (std::abs(s - target) > tol)
                throw NonOrthonormalFrame("frame fails g(e_a,e_b) = delta_ab at tolerance " +
                                          std::to_string(tol));
        }
}

/// Curvature contracted against an orthonormal frame, under the convention
/// R(X,Y,Z,W) = -g(R(X,Y)Z, W): rf(a,b,c,d) = -g(R(e_a,e_b)e_c, e_d).
/// For Sol's built-in frame this reproduces R_1212 = 1, R_1313 = R_2323 = -1.
inline Tensor4 riemann_frame_at(const ChartMetric& chart, const FrameField& frame, const Vec& p) {
    require_orthonormal(chart, frame, p);
    const int n = chart.dim;
    const Tensor4 rm = riemann_mixed_at(chart, p);
    const SquareMat g = chart.g(p);
    const SquareMat e = frame.vectors(p);

    // lower the upper index first: rlow(k,i,j,m) = g_{lm} R^l_{kij}
    Tensor4 rlow(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += g(l, m) * rm(l, k, i, j);
                    rlow(k, i, j, m) = s;
                }

    Tensor4 rf(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k)
                                for (int m = 0; m < n; ++m)
                                    s += e(i, a) * e(j, b) * e(k, c) * e(m, d) * rlow(k, i, j, m);
                    rf(a, b, c, d) = -s;
                }
    return rf;
}

/// Christoffels from central finite differences of metric_at only. This is
/// the independent O(h^2) oracle against the closed-form dg path.
inline Tensor3 fd_oracle_christoffel(const ChartMetric& chart, const Vec& p, double h) {
    if (!(h > 0.0)) throw Error("fd_oracle_christoffel: h must be positive");
    const int n = chart.dim;
    Tensor3 dg(n);
    Vec q = p;
    for (int k = 0; k < n; ++k) {
        q[k] = p[k] + h;
        const SquareMat gp = metric_at(chart, q);
        q[k] = p[k] - h;
        const SquareMat gm = metric_at(chart, q);
        q[k] = p[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dg(k, i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
    }
    const SquareMat ginv = inverse(metric_at(chart, p));
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                gamma(k, i, j) = 0.5 * s;
                gamma(k, j, i) = gamma(k, i, j);
            }
    return gamma;
}

/// Frame connection coefficients omega(c,a,b) = g(∇_{e_a} e_b, e_c).
/// Metric compatibility makes these skew in (c,b); that is what keeps the
/// integrated frames orthonormal up to integrator error.
inline Tensor3 frame_connection_at(const ChartMetric& chart, const FrameField& frame, const Vec& p) {
    const int n = chart.dim;
    const SquareMat g = metric_at(chart, p);
    const SquareMat e = frame.vectors(p);
    const Tensor3 gamma = christoffel_at(chart, p);

    Tensor3 de(n);
    if (frame.derivatives) {
        de = frame.derivatives(p);
    } else {
        // fallback for frames given without partials
        const double h = 1e-6;
        Vec q = p;
        for (int i = 0; i < n; ++i) {
            q[i] = p[i] + h;
            const SquareMat ep = frame.vectors(q);
            q[i] = p[i] - h;
            const SquareMat em = frame.vectors(q);
            q[i] = p[i];
            for (int k = 0; k < n; ++k)
                for (int a = 0; a < n; ++a)
                    de(i, k, a) = (ep(k, a) - em(k, a)) / (2.0 * h);
        }
    }

    Tensor3 omega(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            // v^k = (∇_{e_a} e_b)^k
            Vec v(n, 0.0);
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    double inner = de(i, k, b);
                    for (int j = 0; j < n; ++j) inner += gamma(k, i, j) * e(j, b);
                    s += e(i, a) * inner;
                }
                v[k] = s;
            }
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    for (int m = 0; m < n; ++m) s += g(k, m) * v[k] * e(m, c);
                omega(c, a, b) = s;
            }
        }
    return omega;
}

} // namespace solnil
