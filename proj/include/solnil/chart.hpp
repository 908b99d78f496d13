#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solnil/core.hpp"
#include "solnil/expr.hpp"

namespace solnil {

/// A coordinate chart with its metric components and exact first/second
/// partials. The partials are closed-form (hand-coded for the built-in
/// charts, symbolic for config-loaded ones); finite differences appear only
/// in the verification oracles, never here.
struct ChartMetric {
    std::string name;
    int dim = 0;
    double domain_bound = 1e6;

    std::function<SquareMat(const Vec&)> g;    // g_{ij}(p)
    std::function<Tensor3(const Vec&)> dg;     // (k,i,j) = ∂_k g_{ij}
    std::function<Tensor4(const Vec&)> ddg;    // (l,k,i,j) = ∂_l ∂_k g_{ij}
};

inline void check_domain(const ChartMetric& chart, const Vec& p) {
    if (static_cast<int>(p.size()) != chart.dim)
        throw DomainExceeded("point has dimension " + std::to_string(p.size()) +
                             ", chart '" + chart.name + "' has dimension " + std::to_string(chart.dim));
    for (double c : p)
        if (!(std::abs(c) <= chart.domain_bound))
            throw DomainExceeded("coordinate " + std::to_string(c) + " outside |y| <= " +
                                 std::to_string(chart.domain_bound) + " for chart '" + chart.name + "'");
}

// Sol: g = diag(e^{2 y3}, e^{-2 y3}, 1). Bound 30 keeps e^{±2 y3} comfortably
// inside double range.
inline ChartMetric sol_chart() {
    ChartMetric c;
    c.name = "sol";
    c.dim = 3;
    c.domain_bound = 30.0;
    c.g = [](const Vec& p) {
        SquareMat m(3);
        m(0, 0) = std::exp(2.0 * p[2]);
        m(1, 1) = std::exp(-2.0 * p[2]);
        m(2, 2) = 1.0;
        return m;
    };
    c.dg = [](const Vec& p) {
        Tensor3 t(3);
        t(2, 0, 0) = 2.0 * std::exp(2.0 * p[2]);
        t(2, 1, 1) = -2.0 * std::exp(-2.0 * p[2]);
        return t;
    };
    c.ddg = [](const Vec& p) {
        Tensor4 t(3);
        t(2, 2, 0, 0) = 4.0 * std::exp(2.0 * p[2]);
        t(2, 2, 1, 1) = 4.0 * std::exp(-2.0 * p[2]);
        return t;
    };
    return c;
}

// Nil: g11 = 1, g22 = 1 + y1^2, g23 = g32 = -y1, g33 = 1.
inline ChartMetric nil_chart() {
    ChartMetric c;
    c.name = "nil";
    c.dim = 3;
    c.domain_bound = 1e6;
    c.g = [](const Vec& p) {
        SquareMat m(3);
        m(0, 0) = 1.0;
        m(1, 1) = 1.0 + p[0] * p[0];
        m(1, 2) = -p[0];
        m(2, 1) = -p[0];
        m(2, 2) = 1.0;
        return m;
    };
    c.dg = [](const Vec& p) {
        Tensor3 t(3);
        t(0, 1, 1) = 2.0 * p[0];
        t(0, 1, 2) = -1.0;
        t(0, 2, 1) = -1.0;
        return t;
    };
    c.ddg = [](const Vec&) {
        Tensor4 t(3);
        t(0, 0, 1, 1) = 2.0;
        return t;
    };
    return c;
}

inline ChartMetric euclidean_chart(int dim) {
    ChartMetric c;
    c.name = "euclidean";
    c.dim = dim;
    c.domain_bound = 1e6;
    c.g = [dim](const Vec&) { return SquareMat::identity(dim); };
    c.dg = [dim](const Vec&) { return Tensor3(dim); };
    c.ddg = [dim](const Vec&) { return Tensor4(dim); };
    return c;
}

/// Orthonormal frame field e_a with coordinate components E^k_a, plus the
/// coordinate partials of those components (needed when differentiating the
/// frame along curves). `constant_connection` marks charts whose frame
/// connection coefficients <∇_{e_a} e_b, e_c> do not depend on the point, so
/// integrators can evaluate them once.
struct FrameField {
    int dim = 0;
    std::function<SquareMat(const Vec&)> vectors;     // (k,a) = E^k_a, columns are frame vectors
    std::function<Tensor3(const Vec&)> derivatives;   // (i,k,a) = ∂_i E^k_a
    bool constant_connection = false;
};

// Sol frame: e1 = e^{-y3} ∂1, e2 = e^{y3} ∂2, e3 = ∂3.
inline FrameField sol_frame() {
    FrameField f;
    f.dim = 3;
    f.constant_connection = true;
    f.vectors = [](const Vec& p) {
        SquareMat e(3);
        e(0, 0) = std::exp(-p[2]);
        e(1, 1) = std::exp(p[2]);
        e(2, 2) = 1.0;
        return e;
    };
    f.derivatives = [](const Vec& p) {
        Tensor3 t(3);
        t(2, 0, 0) = -std::exp(-p[2]);
        t(2, 1, 1) = std::exp(p[2]);
        return t;
    };
    return f;
}

// Nil frame dual to (dy1, dy2, dy3 - y1 dy2): e1 = ∂1, e2 = ∂2 + y1 ∂3, e3 = ∂3.
inline FrameField nil_frame() {
    FrameField f;
    f.dim = 3;
    f.vectors = [](const Vec& p) {
        SquareMat e(3);
        e(0, 0) = 1.0;
        e(1, 1) = 1.0;
        e(2, 1) = p[0];
        e(2, 2) = 1.0;
        return e;
    };
    f.derivatives = [](const Vec&) {
        Tensor3 t(3);
        t(0, 2, 1) = 1.0;
        return t;
    };
    return f;
}

inline FrameField euclidean_frame(int dim) {
    FrameField f;
    f.dim = dim;
    f.constant_connection = true;
    f.vectors = [dim](const Vec&) { return SquareMat::identity(dim); };
    f.derivatives = [dim](const Vec&) { return Tensor3(dim); };
    return f;
}

inline FrameField builtin_frame(const ChartMetric& chart) {
    if (chart.name == "sol") return sol_frame();
    if (chart.name == "nil") return nil_frame();
    if (chart.name == "euclidean") return euclidean_frame(chart.dim);
    throw WrongChart("no built-in orthonormal frame for chart '" + chart.name + "'");
}

// ---------------------------------------------------------------------------
// Chart config files
//
//   name = "my_chart"
//   dim = 3
//   domain_bound = 30      (optional)
//   g[1][1] = "exp(2*y3)"
//   g[2][2] = "exp(-2*y3)"
//   g[3][3] = "1"
//
// Unassigned components default to 0; assigning g[i][j] also sets g[j][i].
// Indices and coordinates y1..yN are 1-based. '#' starts a comment.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& s) {
    std::string t = trim(s);
    if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'')))
        return t.substr(1, t.size() - 2);
    return t;
}

} // namespace detail

inline ChartMetric chart_from_config_text(const std::string& text) {
    std::string name;
    int dim = 0;
    double bound = 1e6;
    std::vector<std::pair<std::pair<int, int>, std::string>> components;

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
            throw ParseError("chart config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key == "name") {
            name = detail::unquote(value);
        } else if (key == "dim") {
            dim = std::stoi(value);
        } else if (key == "domain_bound") {
            bound = std::stod(value);
        } else if (key.rfind("g[", 0) == 0) {
            int i = 0, j = 0;
            if (std::sscanf(key.c_str(), "g[%d][%d]", &i, &j) != 2)
                throw ParseError("chart config line " + std::to_string(lineno) + ": bad component key '" + key + "'");
            components.push_back({{i, j}, detail::unquote(value)});
        } else {
            throw ParseError("chart config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (name.empty()) throw ParseError("chart config: missing 'name'");
    if (dim < 1) throw ParseError("chart config: missing or invalid 'dim'");

    const int n = dim;
    auto zero = expr::Node::constant(0.0);
    std::vector<expr::NodePtr> comp(static_cast<size_t>(n) * n, zero);
    auto at = [n](std::vector<expr::NodePtr>& v, int i, int j) -> expr::NodePtr& {
        return v[static_cast<size_t>(i) * n + j];
    };
    for (const auto& [ij, text_ij] : components) {
        auto [i, j] = ij;
        if (i < 1 || i > n || j < 1 || j > n)
            throw ParseError("chart config: component g[" + std::to_string(i) + "][" + std::to_string(j) +
                             "] out of range for dim " + std::to_string(n));
        expr::NodePtr e = expr::parse(text_ij, n);
        at(comp, i - 1, j - 1) = e;
        at(comp, j - 1, i - 1) = e;
    }

    // Symbolic partials, simplified once at load time.
    std::vector<expr::NodePtr> dcomp(static_cast<size_t>(n) * n * n);
    std::vector<expr::NodePtr> ddcomp(static_cast<size_t>(n) * n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                auto d = expr::simplify(expr::differentiate(at(comp, i, j), k));
                dcomp[(static_cast<size_t>(k) * n + i) * n + j] = d;
                for (int l = 0; l < n; ++l)
                    ddcomp[((static_cast<size_t>(l) * n + k) * n + i) * n + j] =
                        expr::simplify(expr::differentiate(d, l));
            }

    ChartMetric c;
    c.name = name;
    c.dim = n;
    c.domain_bound = bound;
    c.g = [n, comp](const Vec& p) {
        SquareMat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = expr::evaluate(comp[static_cast<size_t>(i) * n + j], p);
        return m;
    };
    c.dg = [n, dcomp](const Vec& p) {
        Tensor3 t(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    t(k, i, j) = expr::evaluate(dcomp[(static_cast<size_t>(k) * n + i) * n + j], p);
        return t;
    };
    c.ddg = [n, ddcomp](const Vec& p) {
        Tensor4 t(n);
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        t(l, k, i, j) =
                            expr::evaluate(ddcomp[((static_cast<size_t>(l) * n + k) * n + i) * n + j], p);
        return t;
    };
    return c;
}

inline ChartMetric chart_from_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open chart config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return chart_from_config_text(ss.str());
}

/// Resolve a --chart argument: a built-in name or a config file path.
inline ChartMetric resolve_chart(const std::string& spec, int euclidean_dim = 3) {
    if (spec == "sol") return sol_chart();
    if (spec == "nil") return nil_chart();
    if (spec == "euclidean") return euclidean_chart(euclidean_dim);
    return chart_from_config_file(spec);
}

} // namespace solnil
