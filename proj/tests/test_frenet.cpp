#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "solnil/frenet.hpp"
#include "solnil/geometry.hpp"

using namespace solnil;

namespace {

FrenetInitial axis_z_initial() {
    FrenetInitial init;
    init.T = {0.0, 0.0, 1.0};
    init.N = {1.0, 0.0, 0.0};
    init.B = {0.0, 1.0, 0.0};
    return init;
}

} // namespace

TEST_CASE("sol frame connection reproduces the connection table") {
    const ChartMetric sol = sol_chart();
    const FrameField frame = sol_frame();
    for (const Vec& p : {Vec{0.0, 0.0, 0.0}, Vec{2.0, -1.0, 1.5}}) {
        const Tensor3 w = frame_connection_at(sol, frame, p);
        Tensor3 expect(3);
        expect(2, 0, 0) = -1.0;   // ∇_{e1} e1 = -e3
        expect(0, 0, 2) = 1.0;    // ∇_{e1} e3 =  e1
        expect(2, 1, 1) = 1.0;    // ∇_{e2} e2 =  e3
        expect(1, 1, 2) = -1.0;   // ∇_{e2} e3 = -e2
        for (size_t i = 0; i < w.a.size(); ++i)
            REQUIRE(w.a[i] == Catch::Approx(expect.a[i]).margin(1e-12));
    }
    const Tensor3 we = frame_connection_at(euclidean_chart(3), euclidean_frame(3), {0.0, 0.0, 0.0});
    for (double v : we.a) REQUIRE(v == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("frame connection is metric-compatible (skew in the value slots)") {
    const ChartMetric nil = nil_chart();
    const FrameField frame = nil_frame();
    for (uint64_t t = 0; t < 10; ++t) {
        Vec p(3);
        for (int i = 0; i < 3; ++i) p[i] = uniform_stream(3, t, i, -2.0, 2.0);
        const Tensor3 w = frame_connection_at(nil, frame, p);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    REQUIRE(w(c, a, b) == Catch::Approx(-w(b, a, c)).margin(1e-10));
    }
}

TEST_CASE("straight-line geodesic along e3 in Sol") {
    const ChartMetric sol = sol_chart();
    const CurveTrajectory traj = integrate_helix(sol, 0.0, 0.0, axis_z_initial(), 5.0, 2000);
    REQUIRE(traj.samples.size() == 2001);
    for (const auto& st : traj.samples) {
        REQUIRE(st.position[0] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(st.position[1] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(st.position[2] == Catch::Approx(st.s).margin(1e-10));
        REQUIRE(st.T[2] == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("balanced diagonal geodesic in Sol keeps its tangent") {
    // with T1 = T2 the e3-component equation T3' = T1^2 - T2^2 vanishes
    const double r = std::sqrt(0.5);
    FrenetInitial init;
    init.T = {r, r, 0.0};
    init.N = {-r, r, 0.0};
    init.B = cross3(init.T, init.N);
    const ChartMetric sol = sol_chart();
    const CurveTrajectory traj = integrate_helix(sol, 0.0, 0.0, init, 8.0, 3200);
    for (const auto& st : traj.samples) {
        REQUIRE(st.T[0] == Catch::Approx(r).margin(1e-9));
        REQUIRE(st.T[1] == Catch::Approx(r).margin(1e-9));
        REQUIRE(st.T[2] == Catch::Approx(0.0).margin(1e-9));
        REQUIRE(st.position[2] == Catch::Approx(0.0).margin(1e-9));
        REQUIRE(st.position[0] == Catch::Approx(r * st.s).margin(1e-8));
    }
}

TEST_CASE("unit circle in the flat chart") {
    const ChartMetric flat = euclidean_chart(3);
    const CurveTrajectory traj =
        integrate_helix(flat, 1.0, 0.0, FrenetInitial{}, 2.0 * 3.14159265358979, 4000);
    for (const auto& st : traj.samples) {
        REQUIRE(st.position[0] == Catch::Approx(std::sin(st.s)).margin(1e-9));
        REQUIRE(st.position[1] == Catch::Approx(1.0 - std::cos(st.s)).margin(1e-9));
        REQUIRE(st.position[2] == Catch::Approx(0.0).margin(1e-12));
    }
    const auto& last = traj.samples.back();
    REQUIRE(last.position[0] == Catch::Approx(0.0).margin(1e-8));
    REQUIRE(last.position[1] == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("trajectories stay arc-length parametrized") {
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(1.1, 0.6, 2.2);
    const CurveTrajectory traj = integrate_helix(sol, 0.7, 0.4, init, 10.0, 4000);
    for (const auto& st : traj.samples) {
        // |dγ/ds|_g = |T| in frame components
        REQUIRE(norm3(st.T) == Catch::Approx(1.0).margin(1e-6));
        REQUIRE(st.curvature == 0.7);
        REQUIRE(st.torsion == 0.4);
    }
}

TEST_CASE("frame orthonormality drift is RK4-order") {
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(0.9, 1.3, 0.4);
    // no re-orthonormalization so the raw drift is visible
    const CurveTrajectory coarse = integrate_helix(sol, 1.5, 0.8, init, 10.0, 4000, 0);
    const CurveTrajectory fine = integrate_helix(sol, 1.5, 0.8, init, 10.0, 8000, 0);
    REQUIRE(coarse.max_frame_drift < 1e-8 * 10.0);
    const double ratio = coarse.max_frame_drift / fine.max_frame_drift;
    REQUIRE(ratio > 8.0);
    REQUIRE(ratio < 32.0);
}

TEST_CASE("integration input validation") {
    const ChartMetric sol = sol_chart();
    FrenetInitial bad;
    bad.N = {1.0, 0.0, 0.0};   // equal to T
    bad.T = {1.0, 0.0, 0.0};
    REQUIRE_THROWS_AS(integrate_helix(sol, 0.5, 0.0, bad, 1.0, 100), NonOrthonormalFrame);
    REQUIRE_THROWS_AS(integrate_helix(sol, -0.5, 0.0, FrenetInitial{}, 1.0, 100), Error);
    REQUIRE_THROWS_AS(integrate_helix(sol, 0.5, 0.0, FrenetInitial{}, 1.0, 1), Error);
    REQUIRE_THROWS_AS(integrate_helix(euclidean_chart(2), 1.0, 0.0, FrenetInitial{}, 1.0, 100),
                      WrongChart);
}

TEST_CASE("leaving the chart domain raises DomainExceeded") {
    const ChartMetric sol = sol_chart();
    REQUIRE_THROWS_AS(integrate_helix(sol, 0.0, 0.0, axis_z_initial(), 35.0, 7000), DomainExceeded);
}

TEST_CASE("frenet apparatus on a flat circle recovers k = 1/r, tau = 0") {
    const ChartMetric flat = euclidean_chart(3);
    const double r = 0.5;
    const double ds = 1e-3;
    std::vector<Vec3> pts;
    for (int i = 0; i <= 4000; ++i) {
        const double s = i * ds;
        pts.push_back({r * std::sin(s / r), r * (1.0 - std::cos(s / r)), 0.0});
    }
    const CurveTrajectory traj = frenet_apparatus(flat, pts, ds);
    for (size_t i = 5; i + 5 < traj.samples.size(); ++i) {
        REQUIRE(traj.samples[i].curvature == Catch::Approx(1.0 / r).margin(1e-6));
        REQUIRE(traj.samples[i].torsion == Catch::Approx(0.0).margin(1e-6));
        REQUIRE_FALSE(traj.samples[i].degenerate);
    }
}

TEST_CASE("frenet apparatus flags geodesics as degenerate") {
    const ChartMetric sol = sol_chart();
    std::vector<Vec3> pts;
    const double ds = 1e-3;
    for (int i = 0; i <= 2000; ++i) pts.push_back({0.0, 0.0, i * ds});
    const CurveTrajectory traj = frenet_apparatus(sol, pts, ds);
    for (const auto& st : traj.samples) REQUIRE(st.degenerate);
}

TEST_CASE("frenet apparatus rejects non-arc-length input") {
    const ChartMetric flat = euclidean_chart(3);
    std::vector<Vec3> pts;
    for (int i = 0; i <= 100; ++i) pts.push_back({2.0 * i * 0.01, 0.0, 0.0});   // speed 2
    REQUIRE_THROWS_AS(frenet_apparatus(flat, pts, 0.01), Error);
    REQUIRE_THROWS_AS(frenet_apparatus(flat, {{0, 0, 0}, {1, 0, 0}}, 1.0), InsufficientSamples);
}

TEST_CASE("round-trip: frenet apparatus recovers prescribed helix constants") {
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(0.8, 0.7, 0.3);
    const CurveTrajectory traj = integrate_helix(sol, 0.5, 0.2, init, 10.0, 4000);
    std::vector<Vec3> pts;
    pts.reserve(traj.samples.size());
    for (const auto& st : traj.samples) pts.push_back(st.position);
    const CurveTrajectory rec = frenet_apparatus(sol, pts, traj.ds);
    for (size_t i = 10; i + 10 < rec.samples.size(); ++i) {
        REQUIRE(rec.samples[i].curvature == Catch::Approx(0.5).margin(1e-5));
        REQUIRE(rec.samples[i].torsion == Catch::Approx(0.2).margin(1e-5));
    }
}

TEST_CASE("frame_from_angles always yields a right-handed orthonormal triple") {
    for (uint64_t t = 0; t < 50; ++t) {
        const double a = uniform_stream(5, t, 0, 0.0, 3.14159);
        const double b = uniform_stream(5, t, 1, 0.0, 6.28318);
        const double c = uniform_stream(5, t, 2, 0.0, 6.28318);
        const FrenetInitial f = frame_from_angles(a, b, c);
        REQUIRE(dot3(f.T, f.T) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(dot3(f.N, f.N) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(dot3(f.T, f.N) == Catch::Approx(0.0).margin(1e-12));
        const Vec3 expect_b = cross3(f.T, f.N);
        for (int i = 0; i < 3; ++i) REQUIRE(f.B[i] == Catch::Approx(expect_b[i]).margin(1e-12));
    }
}
