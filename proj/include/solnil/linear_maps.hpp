#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "solnil/chart.hpp"
#include "solnil/core.hpp"
#include "solnil/geometry.hpp"

namespace solnil {

/// Linear map x -> (A1.x, A2.x, A3.x) from Euclidean m-space into Sol or Nil
/// coordinates.
struct LinearMap {
    std::string target;   // "sol" | "nil"
    int m = 0;
    Vec A1, A2, A3;
};

/// The six inner products every classification statement is written in.
struct MapWitnesses {
    double n1 = 0.0, n2 = 0.0, n3 = 0.0;   // |A1|^2, |A2|^2, |A3|^2
    double d12 = 0.0, d13 = 0.0, d23 = 0.0;
};

inline MapWitnesses witnesses(const LinearMap& map) {
    MapWitnesses w;
    w.n1 = dot(map.A1, map.A1);
    w.n2 = dot(map.A2, map.A2);
    w.n3 = dot(map.A3, map.A3);
    w.d12 = dot(map.A1, map.A2);
    w.d13 = dot(map.A1, map.A3);
    w.d23 = dot(map.A2, map.A3);
    return w;
}

inline ChartMetric target_chart(const LinearMap& map) {
    if (map.target == "sol") return sol_chart();
    if (map.target == "nil") return nil_chart();
    throw WrongChart("linear map target must be 'sol' or 'nil', got '" + map.target + "'");
}

inline Vec apply_map(const LinearMap& map, const Vec& x) {
    return {dot(map.A1, x), dot(map.A2, x), dot(map.A3, x)};
}

/// Tension field τ^σ = Γ^σ_{αβ}(φ(x)) A^α·A^β via the generic contraction.
/// The chart-specific closed forms below must agree with this to 1e-10.
inline Vec3 tension_linear(const LinearMap& map, const Vec& x) {
    const ChartMetric chart = target_chart(map);
    const Vec y = apply_map(map, x);
    const Tensor3 gamma = christoffel_at(chart, y);
    const Vec* rows[3] = {&map.A1, &map.A2, &map.A3};
    double d[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) d[a][b] = dot(*rows[a], *rows[b]);
    Vec3 tau{0.0, 0.0, 0.0};
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) tau[s] += gamma(s, a, b) * d[a][b];
    return tau;
}

/// Closed-form tension: Sol gives (2 A1.A3, -2 A2.A3, |A2|^2 e^{-2y3} - |A1|^2 e^{2y3});
/// Nil gives (-|A2|^2 y1 + A2.A3, A1.A2 y1 - A1.A3, A1.A2 y1^2 - A1.A3 y1 - A1.A2).
inline Vec3 tension_closed(const LinearMap& map, const Vec& x) {
    const MapWitnesses w = witnesses(map);
    if (map.target == "sol") {
        const double y3 = dot(map.A3, x);
        return {2.0 * w.d13, -2.0 * w.d23, w.n2 * std::exp(-2.0 * y3) - w.n1 * std::exp(2.0 * y3)};
    }
    if (map.target == "nil") {
        const double y1 = dot(map.A1, x);
        return {-w.n2 * y1 + w.d23, w.d12 * y1 - w.d13, w.d12 * y1 * y1 - w.d13 * y1 - w.d12};
    }
    throw WrongChart("tension_closed: unknown target '" + map.target + "'");
}

/// Closed-form bitension residual for Sol:
///   r1 = -8 A1.A3 |A1|^2 e^{2y3}
///   r2 =  8 A2.A3 |A2|^2 e^{-2y3}
///   r3 =  4(|A2|^2|A3|^2 + (A2.A3)^2) e^{-2y3} - 4(|A1|^2|A3|^2 + (A1.A3)^2) e^{2y3}
///        + 2|A1|^4 e^{4y3} - 2|A2|^4 e^{-4y3}
inline Vec3 sol_residual_closed(const LinearMap& map, const Vec& x) {
    if (map.target != "sol") throw WrongChart("sol_residual_closed: target is '" + map.target + "'");
    const MapWitnesses w = witnesses(map);
    const double y3 = dot(map.A3, x);
    if (!(std::abs(y3) <= sol_chart().domain_bound))
        throw DomainExceeded("sol_residual_closed: |y3| = " + std::to_string(std::abs(y3)));
    const double e2 = std::exp(2.0 * y3);
    const double e4 = e2 * e2;
    return {-8.0 * w.d13 * w.n1 * e2,
            8.0 * w.d23 * w.n2 / e2,
            4.0 * (w.n2 * w.n3 + w.d23 * w.d23) / e2 - 4.0 * (w.n1 * w.n3 + w.d13 * w.d13) * e2 +
                2.0 * w.n1 * w.n1 * e4 - 2.0 * w.n2 * w.n2 / e4};
}

/// Closed-form bitension residual for Nil, three polynomials in y1 = A1.x.
inline Vec3 nil_residual_closed(const LinearMap& map, const Vec& x) {
    if (map.target != "nil") throw WrongChart("nil_residual_closed: target is '" + map.target + "'");
    const MapWitnesses w = witnesses(map);
    const double y1 = dot(map.A1, x);
    const double c2 = -w.d12 * (w.n1 + 3.0 * w.n2);
    const double c1 = w.d13 * (w.n1 + w.n2) + 2.0 * w.d12 * w.d23;
    return {(w.n2 * w.n2 - w.d12 * w.d12) * y1 + w.d12 * w.d13 - w.d23 * w.n2,
            c2 * y1 + c1,
            c2 * y1 * y1 + c1 * y1 + w.d12 * (w.n1 + w.n2)};
}

inline Vec3 residual_closed(const LinearMap& map, const Vec& x) {
    return map.target == "sol" ? sol_residual_closed(map, x) : nil_residual_closed(map, x);
}

/// The generic coordinate bitension, assembled term by term:
///   Δτ^σ + <∇τ^α, ∇φ^β> Γ^σ_{αβ} + <∇φ^β, ∇(τ^α Γ^σ_{αβ})>
///   + <∇φ^β, ∇φ^ρ> τ^α Γ^ν_{αβ} Γ^σ_{νρ} - τ^ν <∇φ^α, ∇φ^β> R^σ_{βαν}.
/// ∇τ comes from the chain rule through the chart's closed-form Christoffel
/// partials (∇y^γ = A^γ); only the Laplacian Δτ uses central differences of
/// step h, which is the single finite-difference layer in this cross-check.
inline Vec3 bitension_numeric(const LinearMap& map, const Vec& x, double h = 1e-4) {
    if (!(h > 0.0)) throw Error("bitension_numeric: h must be positive");
    if (h > 1e-2) throw StepTooLarge("bitension_numeric: h = " + std::to_string(h) + " exceeds 1e-2");
    const ChartMetric chart = target_chart(map);
    const Vec y = apply_map(map, x);
    check_domain(chart, y);

    const Tensor3 gamma = christoffel_at(chart, y);
    const Tensor4 dgamma = christoffel_partials_at(chart, y);
    const Tensor4 rm = riemann_mixed_at(chart, y);

    const Vec* rows[3] = {&map.A1, &map.A2, &map.A3};
    double d[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) d[a][b] = dot(*rows[a], *rows[b]);

    Vec3 tau{0.0, 0.0, 0.0};
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) tau[s] += gamma(s, a, b) * d[a][b];

    // dtau_dy[g][s] = ∂τ^σ/∂y^γ; then <∇τ^α, A^β> = Σ_γ dtau_dy[γ][α] A^γ·A^β.
    double dtau_dy[3][3] = {};
    for (int g = 0; g < 3; ++g)
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) dtau_dy[g][s] += dgamma(g, s, a, b) * d[a][b];

    // Laplacian of the tension by second differences along each domain axis.
    Vec3 lap{0.0, 0.0, 0.0};
    Vec xp = x;
    for (int i = 0; i < map.m; ++i) {
        xp[i] = x[i] + h;
        const Vec3 tp = tension_linear(map, xp);
        xp[i] = x[i] - h;
        const Vec3 tm = tension_linear(map, xp);
        xp[i] = x[i];
        for (int s = 0; s < 3; ++s) lap[s] += (tp[s] - 2.0 * tau[s] + tm[s]) / (h * h);
    }

    Vec3 out{0.0, 0.0, 0.0};
    for (int s = 0; s < 3; ++s) {
        double term2 = 0.0, term3 = 0.0, term4 = 0.0, term5 = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double grad_tau_dot_Ab = 0.0;   // <∇τ^α, ∇φ^β>
                double grad_gamma_dot_Ab = 0.0; // <∇Γ^σ_{αβ}, ∇φ^β>
                for (int g = 0; g < 3; ++g) {
                    grad_tau_dot_Ab += dtau_dy[g][a] * d[g][b];
                    grad_gamma_dot_Ab += dgamma(g, s, a, b) * d[g][b];
                }
                term2 += grad_tau_dot_Ab * gamma(s, a, b);
                term3 += grad_tau_dot_Ab * gamma(s, a, b) + tau[a] * grad_gamma_dot_Ab;
                for (int nu = 0; nu < 3; ++nu) {
                    term5 += tau[nu] * d[a][b] * rm(s, b, a, nu);
                    for (int r = 0; r < 3; ++r)
                        term4 += d[b][r] * tau[a] * gamma(nu, a, b) * gamma(s, nu, r);
                }
            }
        out[s] = lap[s] + term2 + term3 + term4 - term5;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verdicts by coefficient analysis.
//
// Sampling x cannot distinguish the zero function from a function that
// vanishes at the samples, so the verdicts extract coefficients instead:
// for Sol the weights {e^{2y3}, e^{-2y3}, e^{4y3}, e^{-4y3}} are linearly
// independent functions when A3 != 0 (and frozen at 1 when A3 = 0); for Nil
// the residuals are polynomials in y1, which ranges over all of R exactly
// when A1 != 0. The branch on A3 = 0 / A1 = 0 mirrors the case split in the
// classification proofs.
// ---------------------------------------------------------------------------

/// Coefficients that must all vanish for the closed-form residual to be
/// identically zero (branch-dependent, see above).
inline std::vector<double> residual_coefficients(const LinearMap& map, double eps = 1e-12) {
    const MapWitnesses w = witnesses(map);
    if (map.target == "sol") {
        if (w.n3 <= eps) {
            // y3 frozen at 0: evaluate the three equations there
            return {-8.0 * w.d13 * w.n1, 8.0 * w.d23 * w.n2,
                    4.0 * (w.n2 * w.n3 + w.d23 * w.d23) - 4.0 * (w.n1 * w.n3 + w.d13 * w.d13) +
                        2.0 * w.n1 * w.n1 - 2.0 * w.n2 * w.n2};
        }
        return {-8.0 * w.d13 * w.n1,
                8.0 * w.d23 * w.n2,
                4.0 * (w.n2 * w.n3 + w.d23 * w.d23),
                -4.0 * (w.n1 * w.n3 + w.d13 * w.d13),
                2.0 * w.n1 * w.n1,
                -2.0 * w.n2 * w.n2};
    }
    if (map.target == "nil") {
        const double c2 = -w.d12 * (w.n1 + 3.0 * w.n2);
        const double c1 = w.d13 * (w.n1 + w.n2) + 2.0 * w.d12 * w.d23;
        if (w.n1 <= eps) {
            // y1 frozen at 0
            return {w.d12 * w.d13 - w.d23 * w.n2, c1, w.d12 * (w.n1 + w.n2)};
        }
        return {w.n2 * w.n2 - w.d12 * w.d12, w.d12 * w.d13 - w.d23 * w.n2,
                c2, c1, w.d12 * (w.n1 + w.n2)};
    }
    throw WrongChart("residual_coefficients: unknown target '" + map.target + "'");
}

inline bool biharmonic_verdict(const LinearMap& map, double eps = 1e-12) {
    for (double c : residual_coefficients(map, eps))
        if (std::abs(c) > eps) return false;
    return true;
}

/// Harmonic iff the tension coefficient conditions hold; computed from the
/// closed-form tension, independently of the case enumeration.
inline bool harmonic_verdict(const LinearMap& map, double eps = 1e-12) {
    const MapWitnesses w = witnesses(map);
    if (map.target == "sol") {
        if (std::abs(w.d13) > eps || std::abs(w.d23) > eps) return false;
        if (w.n3 <= eps) return std::abs(w.n1 - w.n2) <= eps;
        return w.n1 <= eps && w.n2 <= eps;
    }
    if (map.target == "nil") {
        if (w.n1 <= eps) return std::abs(w.d23) <= eps;   // τ1 = A2.A3 at y1 = 0
        // y1 ranges over R: τ1 forces A2 = 0, τ2 forces A1.A3 = 0 (A1.A2 = 0 follows)
        return w.n2 <= eps && std::abs(w.d13) <= eps && std::abs(w.d12) <= eps;
    }
    throw WrongChart("harmonic_verdict: unknown target '" + map.target + "'");
}

enum class MapCase { none, sol_i, sol_ii, nil_i, nil_ii, nil_iii };

inline const char* to_string(MapCase c) {
    switch (c) {
    case MapCase::none: return "none";
    case MapCase::sol_i: return "S-i";
    case MapCase::sol_ii: return "S-ii";
    case MapCase::nil_i: return "N-i";
    case MapCase::nil_ii: return "N-ii";
    case MapCase::nil_iii: return "N-iii";
    }
    return "?";
}

struct ClassificationVerdict {
    MapCase map_case = MapCase::none;
    MapWitnesses witness;
    bool harmonic = false;
};

/// Case assignment for the classification theorems. The Nil cases are made
/// disjoint (N-ii when both A1 and A2 vanish; N-i requires A2 != 0; N-iii
/// requires A1 != 0) so every biharmonic map lands in exactly one case.
inline ClassificationVerdict classify(const LinearMap& map, double eps = 1e-12) {
    ClassificationVerdict v;
    v.witness = witnesses(map);
    v.harmonic = harmonic_verdict(map, eps);
    const MapWitnesses& w = v.witness;
    if (map.target == "sol") {
        if (w.n3 <= eps) {
            if (std::abs(w.n1 - w.n2) <= eps) v.map_case = MapCase::sol_i;
        } else if (w.n1 <= eps && w.n2 <= eps) {
            v.map_case = MapCase::sol_ii;
        }
    } else if (map.target == "nil") {
        if (w.n1 <= eps) {
            if (w.n2 <= eps) v.map_case = MapCase::nil_ii;
            else if (std::abs(w.d23) <= eps) v.map_case = MapCase::nil_i;
        } else if (w.n2 <= eps && std::abs(w.d13) <= eps) {
            v.map_case = MapCase::nil_iii;
        }
    } else {
        throw WrongChart("classify: unknown target '" + map.target + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Probes and reports
// ---------------------------------------------------------------------------

/// Origin, ±unit coordinate points, and one seeded pseudo-random point.
inline std::vector<Vec> deterministic_probes(int m, uint64_t seed = 0) {
    std::vector<Vec> probes;
    probes.emplace_back(m, 0.0);
    for (int i = 0; i < m; ++i) {
        Vec p(m, 0.0);
        p[i] = 1.0;
        probes.push_back(p);
        p[i] = -1.0;
        probes.push_back(p);
    }
    Vec r(m);
    for (int i = 0; i < m; ++i) r[i] = uniform_stream(seed, 0x70726f6265, i, -1.0, 1.0);
    probes.push_back(r);
    return probes;
}

struct MapResidualReport {
    std::vector<Vec> probes;
    std::vector<Vec3> residuals;   // closed-form triple at each probe
    double sup_norm = 0.0;
    bool biharmonic = false;       // coefficient-analysis verdict
    double epsilon = 0.0;
};

inline MapResidualReport residual_report(const LinearMap& map, uint64_t seed = 0, double eps = 1e-12) {
    MapResidualReport rep;
    rep.epsilon = eps;
    rep.probes = deterministic_probes(map.m, seed);
    for (const Vec& p : rep.probes) {
        const Vec3 r = residual_closed(map, p);
        rep.residuals.push_back(r);
        for (double v : r) rep.sup_norm = std::max(rep.sup_norm, std::abs(v));
    }
    rep.biharmonic = biharmonic_verdict(map, eps);
    return rep;
}

// ---------------------------------------------------------------------------
// Seeded corpora. Each map is a pure function of (seed, index), so any
// parallel partition of the index range generates the identical corpus.
// ---------------------------------------------------------------------------

inline LinearMap random_map(const std::string& target, uint64_t seed, uint64_t index) {
    static const int dims[4] = {1, 2, 3, 5};
    LinearMap map;
    map.target = target;
    uint64_t s = seed ^ (0xA0761D6478BD642FULL * (index + 1));
    map.m = dims[splitmix64(s) & 3];
    map.A1.resize(map.m);
    map.A2.resize(map.m);
    map.A3.resize(map.m);
    for (int i = 0; i < map.m; ++i) {
        map.A1[i] = -2.0 + 4.0 * unit_double(splitmix64(s));
        map.A2[i] = -2.0 + 4.0 * unit_double(splitmix64(s));
        map.A3[i] = -2.0 + 4.0 * unit_double(splitmix64(s));
    }
    return map;
}

/// Maps constructed inside the classification cases (exact zeros where the
/// case demands), cycling through the per-target families.
inline LinearMap random_biharmonic_map(const std::string& target, uint64_t seed, uint64_t index) {
    static const int dims[4] = {2, 3, 5, 3};
    LinearMap map;
    map.target = target;
    uint64_t s = seed ^ (0x9E6C63D0876A9ULL * (index + 7));
    map.m = dims[splitmix64(s) & 3];
    map.A1.assign(map.m, 0.0);
    map.A2.assign(map.m, 0.0);
    map.A3.assign(map.m, 0.0);
    auto randvec = [&](Vec& v) {
        for (int i = 0; i < map.m; ++i) v[i] = -2.0 + 4.0 * unit_double(splitmix64(s));
    };
    auto remove_component = [&](Vec& v, const Vec& along) {
        const double n2 = dot(along, along);
        if (n2 == 0.0) return;
        const double c = dot(v, along) / n2;
        for (int i = 0; i < map.m; ++i) v[i] -= c * along[i];
    };
    if (map.target == "sol") {
        if (index % 2 == 0) {
            // S-i: A3 = 0, |A1| = |A2|
            randvec(map.A1);
            randvec(map.A2);
            const double n1 = std::sqrt(dot(map.A1, map.A1));
            const double n2 = std::sqrt(dot(map.A2, map.A2));
            if (n2 > 0.0)
                for (int i = 0; i < map.m; ++i) map.A2[i] *= n1 / n2;
        } else {
            // S-ii: A1 = A2 = 0
            randvec(map.A3);
        }
        return map;
    }
    switch (index % 3) {
    case 0:   // N-i: A1 = 0, A2.A3 = 0
        randvec(map.A2);
        randvec(map.A3);
        remove_component(map.A3, map.A2);
        break;
    case 1:   // N-ii: A1 = A2 = 0
        randvec(map.A3);
        break;
    default:  // N-iii: A2 = 0, A1.A3 = 0
        randvec(map.A1);
        randvec(map.A3);
        remove_component(map.A3, map.A1);
        break;
    }
    return map;
}

// ---------------------------------------------------------------------------
// Map files:
//   target = "sol"
//   m = 2
//   A1 = [1, 0]
//   A2 = [0, 1]
//   A3 = [0, 0]
// ---------------------------------------------------------------------------

inline Vec parse_vector_literal(const std::string& text) {
    std::string t = detail::trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ParseError("expected a [..] vector literal, got '" + text + "'");
    t = t.substr(1, t.size() - 2);
    Vec out;
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) throw ParseError("empty entry in vector literal '" + text + "'");
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("bad number '" + item + "' in vector literal");
        }
    }
    return out;
}

inline LinearMap parse_map_text(const std::string& text) {
    LinearMap map;
    map.m = -1;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("map file line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "target") map.target = detail::unquote(value);
        else if (key == "m") map.m = std::stoi(value);
        else if (key == "A1") map.A1 = parse_vector_literal(value);
        else if (key == "A2") map.A2 = parse_vector_literal(value);
        else if (key == "A3") map.A3 = parse_vector_literal(value);
        else throw ParseError("map file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (map.target != "sol" && map.target != "nil")
        throw ParseError("map file: target must be \"sol\" or \"nil\"");
    if (map.m < 1) throw ParseError("map file: missing or invalid 'm'");
    for (const Vec* row : {&map.A1, &map.A2, &map.A3})
        if (static_cast<int>(row->size()) != map.m)
            throw ParseError("map file: each of A1, A2, A3 must have exactly m = " +
                             std::to_string(map.m) + " entries");
    return map;
}

inline LinearMap parse_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open map file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_map_text(ss.str());
}

} // namespace solnil
