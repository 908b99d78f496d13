#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "corpus.hpp"
#include "solnil/curve_residuals.hpp"
#include "solnil/io.hpp"

using namespace solnil;

TEST_CASE("geodesics have vanishing residuals in all three methods") {
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(1.0, 0.8, 0.2);
    const CurveTrajectory traj = integrate_helix(sol, 0.0, 0.0, init, 10.0, 4000);

    const CurveResidualReport frame = biharmonic_residual_frame(traj);
    REQUIRE(frame.geodesic);
    REQUIRE(frame.biharmonic);
    REQUIRE(frame.sup_norm < 1e-6);

    const CurveResidualReport direct = biharmonic_residual_direct(traj);
    REQUIRE(direct.biharmonic);
    REQUIRE(direct.sup_norm < 1e-6);

    const CurveResidualReport cond = sol_condition_residual(traj);
    REQUIRE(cond.geodesic);
    REQUIRE(cond.biharmonic);
}

TEST_CASE("flat circle: r2 = -k^3 and direct residual has norm k^3") {
    const ChartMetric flat = euclidean_chart(3);
    const CurveTrajectory traj = integrate_helix(flat, 1.0, 0.0, FrenetInitial{}, 6.0, 3000);

    const CurveResidualReport frame = biharmonic_residual_frame(traj);
    REQUIRE_FALSE(frame.biharmonic);
    for (const auto& r : frame.residuals) {
        REQUIRE(r[0] == Catch::Approx(0.0).margin(1e-8));
        REQUIRE(r[1] == Catch::Approx(-1.0).margin(1e-6));   // k'' - k^3 with k = 1, R = 0
        REQUIRE(r[2] == Catch::Approx(0.0).margin(1e-8));
    }

    const CurveResidualReport direct = biharmonic_residual_direct(traj);
    REQUIRE_FALSE(direct.biharmonic);
    for (const auto& r : direct.residuals) {
        const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        REQUIRE(norm == Catch::Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("sol helix k=0.5 tau=0.2 is decisively non-biharmonic") {
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(0.8, 0.7, 0.3);
    const CurveTrajectory traj = integrate_helix(sol, 0.5, 0.2, init, 10.0, 4000);

    const CurveResidualReport frame = biharmonic_residual_frame(traj);
    REQUIRE(frame.sup_norm > 0.1);
    REQUIRE_FALSE(frame.biharmonic);

    const CurveResidualReport direct = biharmonic_residual_direct(traj);
    REQUIRE_FALSE(direct.biharmonic);

    const CurveResidualReport cond = sol_condition_residual(traj);
    REQUIRE_FALSE(cond.biharmonic);
    REQUIRE_FALSE(cond.geodesic);
}

TEST_CASE("sol-condition report arithmetic: B3 = 0 forces the second residual above 1") {
    // identity check of the report arithmetic: r2 = k^2 + tau^2 - 2 B3^2 + 1
    const ChartMetric sol = sol_chart();
    const FrenetInitial init = frame_from_angles(0.9, 1.1, 2.0);
    const CurveTrajectory traj = integrate_helix(sol, 0.8, 0.3, init, 6.0, 2400);
    const CurveResidualReport cond = sol_condition_residual(traj);
    const double kk = 0.8 * 0.8 + 0.3 * 0.3;
    size_t idx = 0;
    for (size_t i = detail::kBoundaryMargin; i + detail::kBoundaryMargin < traj.samples.size();
         ++i, ++idx) {
        const auto& st = traj.samples[i];
        const double expect = kk - 2.0 * st.B[2] * st.B[2] + 1.0;
        REQUIRE(cond.residuals[idx][1] == Catch::Approx(expect).margin(1e-12));
        if (std::abs(st.B[2]) < 1e-12) REQUIRE(cond.residuals[idx][1] >= 1.0);
    }
}

TEST_CASE("sup B3^2 < 1/2 forces a non-biharmonic verdict for any k, tau") {
    const ChartMetric sol = sol_chart();
    int checked = 0;
    for (uint64_t t = 0; t < 12; ++t) {
        const double k = uniform_stream(17, t, 0, 0.1, 2.0);
        const double tau = uniform_stream(17, t, 1, -1.0, 1.0);
        const FrenetInitial init = frame_from_angles(uniform_stream(17, t, 2, 0.2, 2.9),
                                                     uniform_stream(17, t, 3, 0.0, 6.28),
                                                     uniform_stream(17, t, 4, 0.0, 6.28));
        CurveTrajectory traj;
        try {
            traj = integrate_helix(sol, k, tau, init, 8.0, 3200);
        } catch (const DomainExceeded&) {
            continue;
        }
        double sup_b3sq = 0.0;
        for (const auto& st : traj.samples) sup_b3sq = std::max(sup_b3sq, st.B[2] * st.B[2]);
        if (sup_b3sq < 0.5) {
            REQUIRE_FALSE(sol_condition_residual(traj).biharmonic);
            REQUIRE_FALSE(biharmonic_residual_frame(traj).biharmonic);
            ++checked;
        }
    }
    REQUIRE(checked > 0);
}

TEST_CASE("verdicts agree across all three methods on the curve corpus") {
    const ChartMetric sol = sol_chart();
    const auto corpus = testing::build_curve_corpus(sol, 2026, 10, 30, 10);
    REQUIRE(corpus.size() >= 50);
    int geodesic_count = 0, nonbiharmonic_count = 0;
    for (const auto& entry : corpus) {
        const CurveTrajectory& traj = entry.trajectory;
        const CurveResidualReport frame = biharmonic_residual_frame(traj, 1e-4);
        const CurveResidualReport direct = biharmonic_residual_direct(traj, 1e-3);
        const CurveResidualReport cond = sol_condition_residual(traj, 1e-4);
        INFO("kind=" << static_cast<int>(entry.spec.kind) << " k=" << entry.spec.k
                     << " tau=" << entry.spec.tau);
        REQUIRE(frame.biharmonic == direct.biharmonic);
        REQUIRE(frame.biharmonic == cond.biharmonic);
        if (entry.spec.kind == testing::CurveSpec::Kind::geodesic) {
            REQUIRE(frame.biharmonic);
            ++geodesic_count;
        } else {
            REQUIRE_FALSE(frame.biharmonic);
            ++nonbiharmonic_count;
        }
        // cross-method magnitude agreement on clearly non-biharmonic curves
        if (!frame.biharmonic && frame.sup_norm > 1e-2) {
            const double ratio = direct.sup_norm / frame.sup_norm;
            REQUIRE(ratio > 0.1);
            REQUIRE(ratio < 10.0);
        }
    }
    REQUIRE(geodesic_count == 10);
    REQUIRE(nonbiharmonic_count == 40);
}

TEST_CASE("residual operations demand enough samples and the right chart") {
    const ChartMetric sol = sol_chart();
    const CurveTrajectory tiny = integrate_helix(sol, 0.5, 0.0, frame_from_angles(1.0, 0.5, 0.1), 0.01, 3);
    REQUIRE_THROWS_AS(biharmonic_residual_frame(tiny), InsufficientSamples);
    REQUIRE_THROWS_AS(biharmonic_residual_direct(tiny), InsufficientSamples);
    REQUIRE_THROWS_AS(sol_condition_residual(tiny), InsufficientSamples);

    const ChartMetric flat = euclidean_chart(3);
    const CurveTrajectory circle = integrate_helix(flat, 1.0, 0.0, FrenetInitial{}, 2.0, 200);
    REQUIRE_THROWS_AS(sol_condition_residual(circle), WrongChart);
}

TEST_CASE("helix scan: single-cell evaluation matches hand substitution") {
    const ChartMetric sol = sol_chart();
    const Orientation orient{1.2, 0.7, 0.3};
    const ScanReport report = helix_scan(sol, {1.0}, {0.0}, {orient}, 6.0, 1200, 1);
    REQUIRE(report.cells.size() == 1);
    REQUIRE(report.cells[0].flag == ScanFlag::ok);

    const FrenetInitial init = frame_from_angles(orient.alpha, orient.beta, orient.gamma);
    const CurveTrajectory traj = integrate_helix(sol, 1.0, 0.0, init, 6.0, 1200);
    double expect = std::numeric_limits<double>::infinity();
    for (const auto& st : traj.samples) {
        const double r2 = 1.0 - 2.0 * st.B[2] * st.B[2] + 1.0;
        const double r3 = -2.0 * st.N[2] * st.B[2];
        expect = std::min(expect, std::max(std::abs(r2), std::abs(r3)));
    }
    REQUIRE(report.cells[0].min_residual == Catch::Approx(expect).margin(1e-14));
    REQUIRE(report.global_min == report.cells[0].min_residual);
}

TEST_CASE("helix scan: small grid stays above the theorem floor, deterministically") {
    const ChartMetric sol = sol_chart();
    const std::vector<double> ks = uniform_grid(0.2, 1.8, 3);
    const std::vector<double> taus = uniform_grid(0.0, 1.5, 3);
    std::vector<Orientation> orients;
    for (int i = 0; i < 8; ++i)
        orients.push_back({uniform_stream(9, i, 0, 0.2, 2.9), uniform_stream(9, i, 1, 0.0, 6.28),
                           uniform_stream(9, i, 2, 0.0, 6.28)});

    const ScanReport serial = helix_scan(sol, ks, taus, orients, 10.0, 2000, 1);
    REQUIRE(serial.global_min > 1e-2);
    REQUIRE(serial.evaluated + serial.skipped == 72);

    const ScanReport parallel = helix_scan(sol, ks, taus, orients, 10.0, 2000, 4);
    REQUIRE(scan_to_csv(serial) == scan_to_csv(parallel));
}

TEST_CASE("helix scan flags degenerate and out-of-domain cells") {
    const ChartMetric sol = sol_chart();
    const ScanReport report =
        helix_scan(sol, {1e-6, 1.0}, {0.5}, {Orientation{1.2, 0.7, 0.3}}, 5.0, 1000, 1);
    REQUIRE(report.cells[0].flag == ScanFlag::geodesic_degenerate);
    REQUIRE(report.cells[1].flag == ScanFlag::ok);
    REQUIRE(report.skipped == 1);

    REQUIRE_THROWS_AS(helix_scan(sol, {}, {0.5}, {Orientation{}}, 5.0, 1000, 1), Error);
    REQUIRE_THROWS_AS(helix_scan(sol, {-1.0}, {0.5}, {Orientation{}}, 5.0, 1000, 1), Error);
}
