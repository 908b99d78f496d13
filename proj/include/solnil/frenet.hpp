#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "solnil/chart.hpp"
#include "solnil/core.hpp"
#include "solnil/geometry.hpp"

namespace solnil {

/// One arc-length sample of a framed curve. T, N, B are components in the
/// chart's orthonormal frame {e_1, e_2, e_3}, with B = T x N (positively
/// oriented, so B_3 = T_1 N_2 - T_2 N_1).
struct FrenetState {
    double s = 0.0;
    Vec3 position{0.0, 0.0, 0.0};
    Vec3 T{0.0, 0.0, 0.0};
    Vec3 N{0.0, 0.0, 0.0};
    Vec3 B{0.0, 0.0, 0.0};
    double curvature = 0.0;
    double torsion = 0.0;
    bool degenerate = false;   // curvature below k_min: N, B undefined here
};

struct CurveTrajectory {
    ChartMetric chart;
    FrameField frame;
    double ds = 0.0;
    std::vector<FrenetState> samples;
    double max_frame_drift = 0.0;   // max pre-correction |Gram - I| seen while integrating
};

struct FrenetInitial {
    Vec3 position{0.0, 0.0, 0.0};
    Vec3 T{1.0, 0.0, 0.0};
    Vec3 N{0.0, 1.0, 0.0};
    Vec3 B{0.0, 0.0, 1.0};
};

namespace detail {

inline double gram_drift(const Vec3& T, const Vec3& N, const Vec3& B) {
    const Vec3* v[3] = {&T, &N, &B};
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const double target = (a == b) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot3(*v[a], *v[b]) - target));
        }
    return worst;
}

inline void mgs_orthonormalize(Vec3& T, Vec3& N, Vec3& B) {
    double nt = norm3(T);
    for (auto& c : T) c /= nt;
    double p = dot3(N, T);
    for (int i = 0; i < 3; ++i) N[i] -= p * T[i];
    double nn = norm3(N);
    for (auto& c : N) c /= nn;
    double q1 = dot3(B, T), q2 = dot3(B, N);
    for (int i = 0; i < 3; ++i) B[i] -= q1 * T[i] + q2 * N[i];
    double nb = norm3(B);
    for (auto& c : B) c /= nb;
}

// State layout for the Frenet ODE: position(3) | T(3) | N(3) | B(3).
using FrenetVec = std::array<double, 12>;

struct FrenetRhs {
    const ChartMetric& chart;
    const FrameField& frame;
    const Tensor3* fixed_omega;   // non-null when the frame connection is constant
    double k = 0.0;
    double tau = 0.0;

    void operator()(const FrenetVec& y, FrenetVec& dy) const {
        const Vec p{y[0], y[1], y[2]};
        const SquareMat e = frame.vectors(p);
        Tensor3 local;
        const Tensor3& omega = fixed_omega ? *fixed_omega : (local = frame_connection_at(chart, frame, p));

        const double* T = &y[3];
        const double* N = &y[6];
        const double* B = &y[9];

        // position: dγ/ds = Σ_a T_a e_a
        for (int kk = 0; kk < 3; ++kk)
            dy[kk] = T[0] * e(kk, 0) + T[1] * e(kk, 1) + T[2] * e(kk, 2);

        // frame components: V_c' = (∇_T V)_c - Σ_{a,b} T_a V_b ω(c,a,b)
        for (int c = 0; c < 3; ++c) {
            double corrT = 0.0, corrN = 0.0, corrB = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const double w = T[a] * omega(c, a, b);
                    corrT += w * T[b];
                    corrN += w * N[b];
                    corrB += w * B[b];
                }
            dy[3 + c] = k * N[c] - corrT;
            dy[6 + c] = -k * T[c] + tau * B[c] - corrN;
            dy[9 + c] = -tau * N[c] - corrB;
        }
    }
};

} // namespace detail

/// Integrate the Frenet system γ' = T, ∇_T T = k N, ∇_T N = -k T + τ B,
/// ∇_T B = -τ N with prescribed curvature/torsion profiles. Classical RK4
/// with fixed arc-length step; modified Gram-Schmidt applied to the frame
/// every `reortho_interval` steps (0 disables correction), with the drift
/// recorded before each correction.
inline CurveTrajectory integrate_frenet_system(const ChartMetric& chart, const FrameField& frame,
                                               const std::function<double(double)>& k_fn,
                                               const std::function<double(double)>& tau_fn,
                                               const FrenetInitial& initial, double s_max, int steps,
                                               int reortho_interval = 100) {
    if (chart.dim != 3) throw WrongChart("curve integration requires a 3-dimensional chart");
    if (steps < 2) throw Error("integrate: steps must be >= 2");
    if (!(s_max > 0.0)) throw Error("integrate: s_max must be positive");
    if (detail::gram_drift(initial.T, initial.N, initial.B) > 1e-8)
        throw NonOrthonormalFrame("initial (T,N,B) is not orthonormal to 1e-8");

    Vec p0{initial.position[0], initial.position[1], initial.position[2]};
    check_domain(chart, p0);
    require_orthonormal(chart, frame, p0);

    Tensor3 omega0;
    const Tensor3* fixed = nullptr;
    if (frame.constant_connection) {
        omega0 = frame_connection_at(chart, frame, p0);
        fixed = &omega0;
    }

    const double h = s_max / steps;
    detail::FrenetRhs rhs{chart, frame, fixed, 0.0, 0.0};

    detail::FrenetVec y{};
    for (int i = 0; i < 3; ++i) {
        y[i] = initial.position[i];
        y[3 + i] = initial.T[i];
        y[6 + i] = initial.N[i];
        y[9 + i] = initial.B[i];
    }

    CurveTrajectory traj;
    traj.chart = chart;
    traj.frame = frame;
    traj.ds = h;
    traj.samples.reserve(static_cast<size_t>(steps) + 1);

    auto record = [&](double s) {
        FrenetState st;
        st.s = s;
        for (int i = 0; i < 3; ++i) {
            st.position[i] = y[i];
            st.T[i] = y[3 + i];
            st.N[i] = y[6 + i];
            st.B[i] = y[9 + i];
        }
        st.curvature = k_fn(s);
        st.torsion = tau_fn(s);
        traj.samples.push_back(st);
    };
    record(0.0);

    detail::FrenetVec k1, k2, k3, k4, tmp;
    for (int step = 0; step < steps; ++step) {
        const double s = step * h;
        auto stage = [&](double at, const detail::FrenetVec& yy, detail::FrenetVec& out) {
            rhs.k = k_fn(at);
            rhs.tau = tau_fn(at);
            rhs(yy, out);
        };
        stage(s, y, k1);
        for (int i = 0; i < 12; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        stage(s + 0.5 * h, tmp, k2);
        for (int i = 0; i < 12; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        stage(s + 0.5 * h, tmp, k3);
        for (int i = 0; i < 12; ++i) tmp[i] = y[i] + h * k3[i];
        stage(s + h, tmp, k4);
        for (int i = 0; i < 12; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        for (int i = 0; i < 3; ++i)
            if (!(std::abs(y[i]) <= chart.domain_bound))
                throw DomainExceeded("curve left |y| <= " + std::to_string(chart.domain_bound) +
                                     " at s = " + std::to_string(s + h));

        Vec3 T{y[3], y[4], y[5]}, N{y[6], y[7], y[8]}, B{y[9], y[10], y[11]};
        const double drift = detail::gram_drift(T, N, B);
        traj.max_frame_drift = std::max(traj.max_frame_drift, drift);
        // Correct only when the drift is actually visible: the MGS jump is of
        // the drift's size, and downstream stencils divide by Δs^3, so
        // machine-level corrections would inject more noise than they remove.
        if (reortho_interval > 0 && (step + 1) % reortho_interval == 0 && drift > 1e-10) {
            detail::mgs_orthonormalize(T, N, B);
            for (int i = 0; i < 3; ++i) {
                y[3 + i] = T[i];
                y[6 + i] = N[i];
                y[9 + i] = B[i];
            }
        }
        record((step + 1) * h);
    }
    return traj;
}

/// Helix: constant prescribed curvature and torsion.
inline CurveTrajectory integrate_helix(const ChartMetric& chart, double k, double tau,
                                       const FrenetInitial& initial, double s_max, int steps,
                                       int reortho_interval = 100) {
    if (k < 0.0) throw Error("integrate_helix: curvature must be nonnegative");
    const FrameField frame = builtin_frame(chart);
    return integrate_frenet_system(
        chart, frame, [k](double) { return k; }, [tau](double) { return tau; }, initial, s_max, steps,
        reortho_interval);
}

/// Initial orthonormal triple from angles: T points along
/// (sin a cos b, sin a sin b, cos a) in the frame basis, and c rotates (N, B)
/// about T.
inline FrenetInitial frame_from_angles(double alpha, double beta, double gamma,
                                       const Vec3& position = {0.0, 0.0, 0.0}) {
    const double sa = std::sin(alpha), ca = std::cos(alpha);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double sc = std::sin(gamma), cc = std::cos(gamma);
    FrenetInitial init;
    init.position = position;
    init.T = {sa * cb, sa * sb, ca};
    const Vec3 u{ca * cb, ca * sb, -sa};
    const Vec3 v{-sb, cb, 0.0};
    for (int i = 0; i < 3; ++i) init.N[i] = cc * u[i] + sc * v[i];
    init.B = cross3(init.T, init.N);
    detail::mgs_orthonormalize(init.T, init.N, init.B);
    return init;
}

/// Recover the Frenet apparatus from position samples alone: T = dγ/ds,
/// k = |∇_T T|, N = ∇_T T / k, B = T x N, and τ = g(∇_T N, B). Samples where
/// k < k_min are flagged degenerate instead of raising; a geodesic is
/// degenerate everywhere.
inline CurveTrajectory frenet_apparatus(const ChartMetric& chart, const std::vector<Vec3>& positions,
                                        double ds, double k_min = 1e-7) {
    if (chart.dim != 3) throw WrongChart("frenet_apparatus requires a 3-dimensional chart");
    if (positions.size() < 5) throw InsufficientSamples("frenet_apparatus needs at least 5 samples");
    if (!(ds > 0.0)) throw Error("frenet_apparatus: ds must be positive");
    const FrameField frame = builtin_frame(chart);
    const size_t n = positions.size();

    // velocity by arc-length stencils, per coordinate
    std::vector<double> coord(n);
    std::vector<Vec3> T(n);
    for (int k = 0; k < 3; ++k) {
        for (size_t i = 0; i < n; ++i) coord[i] = positions[i][k];
        std::vector<double> d = derivative_samples(coord, ds);
        for (size_t i = 0; i < n; ++i) T[i][k] = d[i];
    }
    std::vector<Vec3> dT(n), dN(n);
    {
        std::vector<double> comp(n);
        for (int k = 0; k < 3; ++k) {
            for (size_t i = 0; i < n; ++i) comp[i] = T[i][k];
            std::vector<double> d = derivative_samples(comp, ds);
            for (size_t i = 0; i < n; ++i) dT[i][k] = d[i];
        }
    }

    CurveTrajectory traj;
    traj.chart = chart;
    traj.frame = frame;
    traj.ds = ds;
    traj.samples.resize(n);

    std::vector<Vec3> Ncoord(n);
    std::vector<SquareMat> gs(n), es(n);
    std::vector<Tensor3> gammas(n);

    for (size_t i = 0; i < n; ++i) {
        const Vec p{positions[i][0], positions[i][1], positions[i][2]};
        gs[i] = metric_at(chart, p);
        es[i] = frame.vectors(p);
        gammas[i] = christoffel_at(chart, p);

        // arc-length check: |T|_g must be 1
        double speed2 = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) speed2 += gs[i](a, b) * T[i][a] * T[i][b];
        if (std::abs(std::sqrt(speed2) - 1.0) > 1e-4)
            throw Error("frenet_apparatus: input is not arc-length parametrized (|dγ/ds| = " +
                        std::to_string(std::sqrt(speed2)) + ")");

        // acceleration A = ∇_T T in coordinates
        Vec3 A;
        for (int k = 0; k < 3; ++k) {
            double s = dT[i][k];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += gammas[i](k, a, b) * T[i][a] * T[i][b];
            A[k] = s;
        }
        double k2 = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) k2 += gs[i](a, b) * A[a] * A[b];
        const double kcur = std::sqrt(std::max(k2, 0.0));

        FrenetState& st = traj.samples[i];
        st.s = static_cast<double>(i) * ds;
        st.position = positions[i];
        st.curvature = kcur;

        // frame components of T: [T]_a = g(T, e_a)
        auto to_frame = [&](const Vec3& v) {
            Vec3 out{0.0, 0.0, 0.0};
            for (int a = 0; a < 3; ++a) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    for (int mcol = 0; mcol < 3; ++mcol) s += gs[i](k, mcol) * v[k] * es[i](mcol, a);
                out[a] = s;
            }
            return out;
        };
        st.T = to_frame(T[i]);
        if (kcur < k_min) {
            st.degenerate = true;
            Ncoord[i] = {0.0, 0.0, 0.0};
            continue;
        }
        Vec3 Nc{A[0] / kcur, A[1] / kcur, A[2] / kcur};
        Ncoord[i] = Nc;
        st.N = to_frame(Nc);
        st.B = cross3(st.T, st.N);
    }

    // torsion: τ = g(∇_T N, B); needs dN/ds, so a second stencil pass
    {
        std::vector<double> comp(n);
        for (int k = 0; k < 3; ++k) {
            for (size_t i = 0; i < n; ++i) comp[i] = Ncoord[i][k];
            std::vector<double> d = derivative_samples(comp, ds);
            for (size_t i = 0; i < n; ++i) dN[i][k] = d[i];
        }
    }
    for (size_t i = 0; i < n; ++i) {
        FrenetState& st = traj.samples[i];
        if (st.degenerate) continue;
        Vec3 covN;
        for (int k = 0; k < 3; ++k) {
            double s = dN[i][k];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += gammas[i](k, a, b) * T[i][a] * Ncoord[i][b];
            covN[k] = s;
        }
        // B back to coordinates: B^k = Σ_a [B]_a E^k_a
        Vec3 Bc{0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            for (int a = 0; a < 3; ++a) Bc[k] += st.B[a] * es[i](k, a);
        double tau = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) tau += gs[i](a, b) * covN[a] * Bc[b];
        st.torsion = tau;
    }
    return traj;
}

} // namespace solnil
