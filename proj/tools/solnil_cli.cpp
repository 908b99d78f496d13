// Command-line front end: curvature tables, curve integration and residual
// checks, linear-map classification, raw bitension evaluation, and the helix
// scan. Structured output is a single JSON document with a schema_version
// field; CSV files are written atomically (temp file + rename).
//
// Exit codes: 0 success (scan: threshold met), 1 scan threshold failure,
// 2 domain/integration/io failure, 3 parse or usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "solnil/chart.hpp"
#include "solnil/curve_residuals.hpp"
#include "solnil/frenet.hpp"
#include "solnil/geometry.hpp"
#include "solnil/io.hpp"
#include "solnil/linear_maps.hpp"

using json = nlohmann::ordered_json;
using namespace solnil;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kDisplayZero = 1e-13;

Vec parse_point(const std::string& text) {
    Vec out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("bad coordinate '" + item + "' in point '" + text + "'");
        }
    }
    if (out.empty()) throw ParseError("empty point");
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_atomic(out_path, text);
}

json matrix_json(const SquareMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int j = 0; j < m.n; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

std::string matrix_text(const SquareMat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.n; ++i) {
        os << "    ";
        for (int j = 0; j < m.n; ++j) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "% .9g", m(i, j));
            os << buf << (j + 1 < m.n ? "  " : "");
        }
        os << '\n';
    }
    return os.str();
}

// --------------------------------------------------------------------------
// curvature
// --------------------------------------------------------------------------

int cmd_curvature(const std::string& chart_spec, int dim, const std::string& point_text,
                  const std::string& format, const std::string& out_path) {
    const ChartMetric chart = resolve_chart(chart_spec, dim);
    const Vec p = parse_point(point_text);
    const SquareMat g = metric_at(chart, p);
    const SquareMat ginv = metric_inverse_at(chart, p);
    const Tensor3 gamma = christoffel_at(chart, p);
    const Tensor4 rm = riemann_mixed_at(chart, p);

    std::optional<Tensor4> rf;
    try {
        rf = riemann_frame_at(chart, builtin_frame(chart), p);
    } catch (const WrongChart&) {
        // chart without a built-in orthonormal frame: skip the frame table
    }

    const int n = chart.dim;
    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "curvature";
        doc["chart"] = chart.name;
        doc["point"] = p;
        doc["metric"] = matrix_json(g);
        doc["metric_inverse"] = matrix_json(ginv);
        json gs = json::array();
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (std::abs(gamma(k, i, j)) > kDisplayZero)
                        gs.push_back(
                            {{"upper", k + 1}, {"lower", {i + 1, j + 1}}, {"value", gamma(k, i, j)}});
        doc["christoffel_nonzero"] = gs;
        json rs = json::array();
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (std::abs(rm(l, k, i, j)) > kDisplayZero)
                            rs.push_back({{"upper", l + 1},
                                          {"lower", {k + 1, i + 1, j + 1}},
                                          {"value", rm(l, k, i, j)}});
        doc["riemann_mixed_nonzero"] = rs;
        if (rf) {
            json fs = json::array();
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d)
                            if (std::abs((*rf)(a, b, c, d)) > kDisplayZero)
                                fs.push_back({{"indices", {a + 1, b + 1, c + 1, d + 1}},
                                              {"value", (*rf)(a, b, c, d)}});
            doc["riemann_frame_nonzero"] = fs;
        }
        emit(doc.dump(2) + "\n", out_path);
        return 0;
    }

    std::ostringstream os;
    os << "chart: " << chart.name << "  point: (";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << format_double(p[i]);
    os << ")\n\nmetric g_ij:\n" << matrix_text(g);
    os << "\ninverse g^ij:\n" << matrix_text(ginv);
    os << "\nnonzero Christoffel symbols G^k_ij:\n";
    bool any = false;
    char buf[96];
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(gamma(k, i, j)) > kDisplayZero) {
                    std::snprintf(buf, sizeof(buf), "    G^%d_%d%d = % .12g\n", k + 1, i + 1, j + 1,
                                  gamma(k, i, j));
                    os << buf;
                    any = true;
                }
    if (!any) os << "    (all zero)\n";
    os << "\nnonzero mixed curvature R^l_kij:\n";
    any = false;
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (std::abs(rm(l, k, i, j)) > kDisplayZero) {
                        std::snprintf(buf, sizeof(buf), "    R^%d_%d%d%d = % .12g\n", l + 1, k + 1, i + 1,
                                      j + 1, rm(l, k, i, j));
                        os << buf;
                        any = true;
                    }
    if (!any) os << "    (all zero)\n";
    if (rf) {
        os << "\nnonzero orthonormal-frame curvature R_abcd (convention R_abcd = -g(R(e_a,e_b)e_c, e_d)):\n";
        any = false;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d)
                        if (std::abs((*rf)(a, b, c, d)) > kDisplayZero) {
                            std::snprintf(buf, sizeof(buf), "    R_%d%d%d%d = % .12g\n", a + 1, b + 1,
                                          c + 1, d + 1, (*rf)(a, b, c, d));
                            os << buf;
                            any = true;
                        }
        if (!any) os << "    (all zero)\n";
    }
    emit(os.str(), out_path);
    return 0;
}

// --------------------------------------------------------------------------
// check-curve
// --------------------------------------------------------------------------

struct HelixArgs {
    double k = 0.0;
    double tau = 0.0;
};

HelixArgs parse_helix(const std::string& text) {
    HelixArgs h;
    bool have_k = false, have_tau = false;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const size_t eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("expected k=..,tau=.. in '" + text + "'");
        const std::string key = detail::trim(item.substr(0, eq));
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError("bad value in helix parameter '" + item + "'");
        }
        if (key == "k") {
            h.k = value;
            have_k = true;
        } else if (key == "tau") {
            h.tau = value;
            have_tau = true;
        } else {
            throw ParseError("unknown helix parameter '" + key + "'");
        }
    }
    if (!have_k || !have_tau) throw ParseError("helix needs both k and tau");
    return h;
}

FrenetInitial parse_init(const std::string& text) {
    if (text == "default") return frame_from_angles(0.8, 0.7, 0.3);
    const Vec vals = parse_point(text);
    if (vals.size() != 3) throw ParseError("--init expects 'default' or three Euler angles a,b,c");
    return frame_from_angles(vals[0], vals[1], vals[2]);
}

json residual_json(const CurveResidualReport& rep) {
    json j;
    j["method"] = rep.method;
    j["sup_norm"] = rep.sup_norm;
    j["tolerance"] = rep.tolerance;
    j["geodesic"] = rep.geodesic;
    j["verdict"] = rep.biharmonic ? "biharmonic" : "not_biharmonic";
    return j;
}

int cmd_check_curve(const std::string& chart_spec, const std::string& helix_text,
                    const std::string& init_text, const std::string& traj_path, double s_max, int steps,
                    double tol_frame, double tol_direct, double tol_cond, const std::string& export_csv,
                    const std::string& format, const std::string& out_path) {
    const ChartMetric chart = resolve_chart(chart_spec, 3);
    CurveTrajectory traj;
    if (!traj_path.empty()) {
        double ds = 0.0;
        const std::vector<Vec3> positions = read_positions_csv(traj_path, ds);
        traj = frenet_apparatus(chart, positions, ds);
    } else {
        const HelixArgs h = parse_helix(helix_text);
        traj = integrate_helix(chart, h.k, h.tau, parse_init(init_text), s_max, steps);
    }
    if (!export_csv.empty()) write_text_atomic(export_csv, trajectory_to_csv(traj));

    const CurveResidualReport frame = biharmonic_residual_frame(traj, tol_frame);
    const CurveResidualReport direct = biharmonic_residual_direct(traj, tol_direct);
    std::optional<CurveResidualReport> cond;
    if (chart.name == "sol") cond = sol_condition_residual(traj, tol_cond);

    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "check-curve";
        doc["chart"] = chart.name;
        doc["samples"] = traj.samples.size();
        doc["ds"] = traj.ds;
        doc["max_frame_drift"] = traj.max_frame_drift;
        doc["reports"] = json::array({residual_json(frame), residual_json(direct)});
        if (cond) doc["reports"].push_back(residual_json(*cond));
        emit(doc.dump(2) + "\n", out_path);
        return 0;
    }

    std::ostringstream os;
    os << "chart: " << chart.name << "  samples: " << traj.samples.size()
       << "  ds: " << format_double(traj.ds) << "  frame drift: " << format_double(traj.max_frame_drift)
       << "\n\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %-14s %-10s %-9s %s\n", "method", "sup_norm", "tol",
                  "geodesic", "verdict");
    os << buf;
    auto line = [&](const CurveResidualReport& rep) {
        std::snprintf(buf, sizeof(buf), "%-14s %-14.6g %-10g %-9s %s\n", rep.method.c_str(), rep.sup_norm,
                      rep.tolerance, rep.geodesic ? "yes" : "no",
                      rep.biharmonic ? "biharmonic" : "not_biharmonic");
        os << buf;
    };
    line(frame);
    line(direct);
    if (cond) line(*cond);
    emit(os.str(), out_path);
    return 0;
}

// --------------------------------------------------------------------------
// classify / check-map
// --------------------------------------------------------------------------

json witnesses_json(const MapWitnesses& w) {
    json j;
    j["norm2_A1"] = w.n1;
    j["norm2_A2"] = w.n2;
    j["norm2_A3"] = w.n3;
    j["A1_dot_A2"] = w.d12;
    j["A1_dot_A3"] = w.d13;
    j["A2_dot_A3"] = w.d23;
    return j;
}

int cmd_classify(const std::string& map_path, uint64_t seed, double eps, const std::string& format,
                 const std::string& out_path) {
    const LinearMap map = parse_map_file(map_path);
    const ClassificationVerdict verdict = classify(map, eps);
    const MapResidualReport rep = residual_report(map, seed, eps);
    const Vec origin(map.m, 0.0);
    const Vec3 bt = bitension_numeric(map, origin);

    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "classify";
        doc["seed"] = seed;
        doc["map"] = {{"target", map.target}, {"m", map.m}, {"A1", map.A1}, {"A2", map.A2},
                      {"A3", map.A3}};
        doc["case"] = to_string(verdict.map_case);
        doc["harmonic"] = verdict.harmonic;
        doc["biharmonic"] = rep.biharmonic;
        doc["witnesses"] = witnesses_json(verdict.witness);
        doc["epsilon"] = eps;
        json probes = json::array();
        for (size_t i = 0; i < rep.probes.size(); ++i)
            probes.push_back(
                {{"x", rep.probes[i]},
                 {"residual", {rep.residuals[i][0], rep.residuals[i][1], rep.residuals[i][2]}}});
        doc["closed_form_residuals"] = probes;
        doc["closed_form_sup"] = rep.sup_norm;
        doc["bitension_numeric_at_origin"] = {bt[0], bt[1], bt[2]};
        emit(doc.dump(2) + "\n", out_path);
        return 0;
    }

    std::ostringstream os;
    os << "map: target=" << map.target << " m=" << map.m << "\n";
    os << "case " << to_string(verdict.map_case) << ", "
       << (verdict.harmonic ? "harmonic" : "not harmonic") << ", "
       << (rep.biharmonic ? "biharmonic" : "not biharmonic") << "\n";
    const MapWitnesses& w = verdict.witness;
    char buf[220];
    std::snprintf(
        buf, sizeof(buf),
        "witnesses: |A1|^2=%.12g |A2|^2=%.12g |A3|^2=%.12g A1.A2=%.12g A1.A3=%.12g A2.A3=%.12g\n", w.n1,
        w.n2, w.n3, w.d12, w.d13, w.d23);
    os << buf;
    std::snprintf(buf, sizeof(buf), "closed-form residual sup over %zu probes: %.12g\n",
                  rep.probes.size(), rep.sup_norm);
    os << buf;
    std::snprintf(buf, sizeof(buf), "bitension (numeric) at origin: (%.9g, %.9g, %.9g)\n", bt[0], bt[1],
                  bt[2]);
    os << buf;
    emit(os.str(), out_path);
    return 0;
}

int cmd_check_map(const std::string& map_path, const std::string& point_text, double h,
                  const std::string& format, const std::string& out_path) {
    const LinearMap map = parse_map_file(map_path);
    const Vec x = point_text.empty() ? Vec(map.m, 0.0) : parse_point(point_text);
    if (static_cast<int>(x.size()) != map.m)
        throw ParseError("point has " + std::to_string(x.size()) + " coordinates, map domain is " +
                         std::to_string(map.m));
    const Vec3 tension = tension_linear(map, x);
    const Vec3 numeric = bitension_numeric(map, x, h);
    const Vec3 closed = residual_closed(map, x);

    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "check-map";
        doc["map"] = {{"target", map.target}, {"m", map.m}, {"A1", map.A1}, {"A2", map.A2},
                      {"A3", map.A3}};
        doc["x"] = x;
        doc["h"] = h;
        doc["tension"] = {tension[0], tension[1], tension[2]};
        doc["bitension_numeric"] = {numeric[0], numeric[1], numeric[2]};
        doc["bitension_closed_form"] = {closed[0], closed[1], closed[2]};
        emit(doc.dump(2) + "\n", out_path);
        return 0;
    }
    std::ostringstream os;
    char buf[220];
    std::snprintf(buf, sizeof(buf), "tension:                 (%.12g, %.12g, %.12g)\n", tension[0],
                  tension[1], tension[2]);
    os << buf;
    std::snprintf(buf, sizeof(buf), "bitension (numeric):     (%.12g, %.12g, %.12g)\n", numeric[0],
                  numeric[1], numeric[2]);
    os << buf;
    std::snprintf(buf, sizeof(buf), "bitension (closed form): (%.12g, %.12g, %.12g)\n", closed[0],
                  closed[1], closed[2]);
    os << buf;
    emit(os.str(), out_path);
    return 0;
}

// --------------------------------------------------------------------------
// scan-helices
// --------------------------------------------------------------------------

std::vector<Orientation> orientation_grid(int count, uint64_t seed) {
    if (count == 64) return default_orientation_grid();
    std::vector<Orientation> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back({uniform_stream(seed, static_cast<uint64_t>(i), 0, 0.05, 3.09),
                       uniform_stream(seed, static_cast<uint64_t>(i), 1, 0.0, 6.2831853),
                       uniform_stream(seed, static_cast<uint64_t>(i), 2, 0.0, 6.2831853)});
    return out;
}

int cmd_scan(double k_lo, double k_hi, int k_count, double tau_lo, double tau_hi, int tau_count,
             int orientations, double s_max, int steps, double threshold, int jobs, uint64_t seed,
             const std::string& out_csv, const std::string& format) {
    if (k_count < 1 || tau_count < 1 || orientations < 1) throw ParseError("grids must be nonempty");
    const ChartMetric sol = sol_chart();
    const ScanReport report = helix_scan(sol, uniform_grid(k_lo, k_hi, k_count),
                                         uniform_grid(tau_lo, tau_hi, tau_count),
                                         orientation_grid(orientations, seed), s_max, steps, jobs);
    if (!out_csv.empty()) write_text_atomic(out_csv, scan_to_csv(report));

    const bool met = report.evaluated > 0 && report.global_min > threshold;
    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "scan-helices";
        doc["cells"] = report.cells.size();
        doc["evaluated"] = report.evaluated;
        doc["skipped"] = report.skipped;
        doc["global_min_residual"] = report.global_min;
        doc["threshold"] = threshold;
        doc["threshold_met"] = met;
        std::cout << doc.dump(2) << "\n";
    } else {
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "cells=%zu evaluated=%zu skipped=%zu global_min_residual=%.9g threshold=%g -> %s\n",
                      report.cells.size(), report.evaluated, report.skipped, report.global_min, threshold,
                      met ? "PASS" : "FAIL");
        std::cout << buf;
    }
    return met ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sol/Nil geometry toolkit: curvature tables, biharmonic curve residuals, "
                 "linear-map classification, helix scan"};
    app.require_subcommand(1);

    std::string chart = "sol", point = "0,0,0", format = "text", out_path;
    std::string helix_text, init_text = "default", traj_path, map_path, export_csv;
    int dim = 3, steps = 4000, k_count = 20, tau_count = 20, orientations = 64, jobs = 0;
    double s_max = 10.0, h = 1e-4;
    double tol_frame = 1e-4, tol_direct = 1e-3, tol_cond = 1e-4, tol_class = 1e-12;
    double k_lo = 0.1, k_hi = 2.0, tau_lo = 0.1, tau_hi = 2.0, threshold = 1e-2;
    uint64_t seed = 0;
    std::string scan_out = "scan.csv";
    int scan_steps = 2000;

    auto* curvature = app.add_subcommand("curvature", "print connection and curvature tables at a point");
    curvature->add_option("--chart", chart, "built-in chart name or config file path");
    curvature->add_option("--dim", dim, "dimension for the euclidean chart");
    curvature->add_option("--point", point, "comma-separated coordinates");
    curvature->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    curvature->add_option("--out", out_path, "write output to a file instead of stdout");

    auto* check_curve = app.add_subcommand("check-curve", "evaluate biharmonicity residuals of a curve");
    check_curve->add_option("--chart", chart);
    check_curve->add_option("--helix", helix_text, "k=<curvature>,tau=<torsion>");
    check_curve->add_option("--init", init_text, "'default' or Euler angles a,b,c");
    check_curve->add_option("--traj", traj_path, "trajectory csv (s,x,y,z,...) to analyze instead");
    check_curve->add_option("--smax", s_max);
    check_curve->add_option("--steps", steps);
    check_curve->add_option("--tol-frame", tol_frame);
    check_curve->add_option("--tol-direct", tol_direct);
    check_curve->add_option("--tol-cond", tol_cond);
    check_curve->add_option("--export-csv", export_csv, "also write the trajectory csv");
    check_curve->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    check_curve->add_option("--out", out_path);

    auto* classify_cmd = app.add_subcommand("classify", "classify a linear map into Sol or Nil");
    classify_cmd->add_option("--map-file", map_path)->required();
    classify_cmd->add_option("--seed", seed);
    classify_cmd->add_option("--tol-class", tol_class);
    classify_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    classify_cmd->add_option("--out", out_path);

    auto* check_map = app.add_subcommand("check-map", "raw tension/bitension of a linear map at a point");
    check_map->add_option("--map-file", map_path)->required();
    auto* check_map_point = check_map->add_option("--point", point, "domain point (default: origin)");
    check_map->add_option("--step", h, "finite-difference step for the tension Laplacian");
    check_map->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    check_map->add_option("--out", out_path);

    auto* scan = app.add_subcommand("scan-helices", "scan helices for biharmonicity residual minima");
    scan->add_option("--k-min", k_lo);
    scan->add_option("--k-max", k_hi);
    scan->add_option("--k-count", k_count);
    scan->add_option("--tau-min", tau_lo);
    scan->add_option("--tau-max", tau_hi);
    scan->add_option("--tau-count", tau_count);
    scan->add_option("--orientations", orientations, "64 selects the built-in Euler grid");
    scan->add_option("--smax", s_max);
    scan->add_option("--steps", scan_steps, "integration steps per cell");
    scan->add_option("--threshold", threshold, "exit 0 iff global min residual exceeds this");
    scan->add_option("--jobs", jobs, "worker threads (0 = hardware)");
    scan->add_option("--seed", seed);
    scan->add_option("--out", scan_out, "output csv path");
    scan->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (curvature->parsed()) return cmd_curvature(chart, dim, point, format, out_path);
        if (check_curve->parsed()) {
            if (helix_text.empty() && traj_path.empty())
                throw ParseError("check-curve needs --helix or --traj");
            return cmd_check_curve(chart, helix_text, init_text, traj_path, s_max, steps, tol_frame,
                                   tol_direct, tol_cond, export_csv, format, out_path);
        }
        if (classify_cmd->parsed()) return cmd_classify(map_path, seed, tol_class, format, out_path);
        if (check_map->parsed())
            return cmd_check_map(map_path, check_map_point->count() ? point : std::string(), h, format,
                                 out_path);
        if (scan->parsed())
            return cmd_scan(k_lo, k_hi, k_count, tau_lo, tau_hi, tau_count, orientations, s_max,
                            scan_steps, threshold, jobs, seed, scan_out, format);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
