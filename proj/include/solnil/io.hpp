#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "solnil/curve_residuals.hpp"
#include "solnil/frenet.hpp"

namespace solnil {

// Shortest round-trip formatting; identical inputs give identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write via a temp file and rename, so a failed run never leaves a partial
/// output behind.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw Error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("rename '" + tmp + "' -> '" + path + "' failed: " + ec.message());
}

inline std::string scan_to_csv(const ScanReport& report) {
    std::ostringstream os;
    os << "k,tau,euler_a,euler_b,euler_c,min_residual,flag\n";
    for (const auto& c : report.cells) {
        os << format_double(c.k) << ',' << format_double(c.tau) << ','
           << format_double(c.orientation.alpha) << ',' << format_double(c.orientation.beta) << ','
           << format_double(c.orientation.gamma) << ',' << format_double(c.min_residual) << ','
           << to_string(c.flag) << '\n';
    }
    return os.str();
}

inline std::string trajectory_to_csv(const CurveTrajectory& traj) {
    std::ostringstream os;
    os << "s,x,y,z,T1,T2,T3,N1,N2,N3,B1,B2,B3,k,tau\n";
    for (const auto& st : traj.samples) {
        os << format_double(st.s);
        for (double v : st.position) os << ',' << format_double(v);
        for (double v : st.T) os << ',' << format_double(v);
        for (double v : st.N) os << ',' << format_double(v);
        for (double v : st.B) os << ',' << format_double(v);
        os << ',' << format_double(st.curvature) << ',' << format_double(st.torsion) << '\n';
    }
    return os.str();
}

/// Read back positions from a trajectory CSV (columns s,x,y,z at least).
/// Returns the samples and checks the s column is uniformly spaced.
inline std::vector<Vec3> read_positions_csv(const std::string& path, double& ds_out) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trajectory csv '" + path + "'");
    std::vector<Vec3> positions;
    std::vector<double> svals;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        bool numeric = true;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (lineno == 1) continue;   // header row
            throw ParseError("trajectory csv line " + std::to_string(lineno) + ": non-numeric data");
        }
        if (vals.size() < 4)
            throw ParseError("trajectory csv line " + std::to_string(lineno) + ": need s,x,y,z columns");
        svals.push_back(vals[0]);
        positions.push_back({vals[1], vals[2], vals[3]});
    }
    if (positions.size() < 5) throw InsufficientSamples("trajectory csv has fewer than 5 samples");
    const double ds = svals[1] - svals[0];
    for (size_t i = 1; i < svals.size(); ++i)
        if (std::abs(svals[i] - svals[i - 1] - ds) > 1e-9 * std::max(1.0, std::abs(ds)))
            throw ParseError("trajectory csv: s column is not uniformly spaced");
    if (!(ds > 0.0)) throw ParseError("trajectory csv: s column must be increasing");
    ds_out = ds;
    return positions;
}

} // namespace solnil
