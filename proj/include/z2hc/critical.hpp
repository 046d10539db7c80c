#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "z2hc/adiabatic.hpp"
#include "z2hc/errors.hpp"

namespace z2hc {

// Order-2 finite differences on a uniform grid of spacing h. Interior points
// use central stencils; each end uses the matching one-sided order-2 stencil.
inline std::vector<double> finite_difference(const std::vector<double>& f, double h, int order) {
    std::size_t n = f.size();
    if (n < 5) throw invalid_argument("finite difference needs at least 5 points");
    if (!(h > 0)) throw invalid_argument("grid spacing must be positive");
    std::vector<double> d(n);
    if (order == 1) {
        d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
        d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    } else if (order == 2) {
        double h2 = h * h;
        d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h2;
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2 * f[i] + f[i - 1]) / h2;
        d[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) / h2;
    } else {
        throw invalid_argument("derivative order must be 1 or 2");
    }
    return d;
}

// Centered moving average. Near the ends the window shrinks symmetrically so
// the average stays centered on the output point.
inline std::vector<double> smooth(const std::vector<double>& f, int window) {
    std::size_t n = f.size();
    if (window < 1 || window % 2 == 0) throw invalid_argument("smoothing window must be odd >= 1");
    if (static_cast<std::size_t>(window) > n)
        throw invalid_argument("smoothing window exceeds series length");
    std::vector<double> out(n);
    int half = window / 2;
    for (std::size_t i = 0; i < n; ++i) {
        int hw = std::min<int>({half, static_cast<int>(i), static_cast<int>(n - 1 - i)});
        double s = 0.0;
        for (int j = -hw; j <= hw; ++j) s += f[i + j];
        out[i] = s / (2 * hw + 1);
    }
    return out;
}

struct CriticalConfig {
    int window = 11;          // smoothing window for both derivative curves
    double range_lo = 0.05;   // search range in the trace coordinate
    double range_hi = 1.0;
    int edge_exclusion = 5;   // grid points dropped at each end (stencil artifacts)
};

struct CriticalPoints {
    double g_c_H = 0.0;
    double g_c_Z = 0.0;
    double lambda_c_H = 0.0; // = 1/g_c_H
    double lambda_c_Z = 0.0; // = 1/g_c_Z
    std::vector<std::string> flags;
    // Diagnostics: the curves the extrema were read from.
    std::vector<double> grid;
    std::vector<double> d2H_smooth;
    std::vector<double> dZ_smooth;
    std::size_t index_H = 0;
    std::size_t index_Z = 0;
};

// g_c_H = grid point maximizing |d2<H>/dg2| after smoothing, g_c_Z likewise
// for |d<Z>/dg|; ties break toward smaller g. An extremum sitting on the
// search-range boundary is reported but flagged "boundary".
inline CriticalPoints detect_critical(const SweepTrace& trace, const CriticalConfig& cfg = {}) {
    std::size_t n = trace.rows.size();
    if (n < 5) throw invalid_argument("trace too short for critical-point detection");
    if (cfg.edge_exclusion < 0) throw invalid_argument("edge exclusion must be >= 0");
    if (!(cfg.range_lo < cfg.range_hi)) throw invalid_argument("empty search range");

    std::vector<double> g(n), energy(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = trace.rows[i].g;
        energy[i] = trace.rows[i].energy;
        z[i] = trace.rows[i].z;
    }
    double h = g[1] - g[0];
    if (!(h > 0)) throw invalid_argument("trace grid must be increasing");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(g[i] - (g[0] + static_cast<double>(i) * h)) > 1e-9)
            throw invalid_argument("trace grid is not uniform");

    CriticalPoints cp;
    cp.grid = g;
    cp.d2H_smooth = smooth(finite_difference(energy, h, 2), cfg.window);
    cp.dZ_smooth = smooth(finite_difference(z, h, 1), cfg.window);

    std::size_t lo = cfg.edge_exclusion;
    std::size_t hi = n - 1 - cfg.edge_exclusion;
    while (lo < n && g[lo] < cfg.range_lo) ++lo;
    while (hi > 0 && g[hi] > cfg.range_hi) --hi;
    if (lo >= hi) throw invalid_argument("trace does not cover the search range");

    auto argmax_abs = [&](const std::vector<double>& d) {
        std::size_t best = lo;
        for (std::size_t i = lo + 1; i <= hi; ++i)
            if (std::abs(d[i]) > std::abs(d[best])) best = i;
        return best;
    };
    cp.index_H = argmax_abs(cp.d2H_smooth);
    cp.index_Z = argmax_abs(cp.dZ_smooth);
    cp.g_c_H = g[cp.index_H];
    cp.g_c_Z = g[cp.index_Z];
    cp.lambda_c_H = 1.0 / cp.g_c_H;
    cp.lambda_c_Z = 1.0 / cp.g_c_Z;
    if (cp.index_H == lo || cp.index_H == hi || cp.index_Z == lo || cp.index_Z == hi)
        cp.flags.push_back("boundary");
    return cp;
}

inline std::string critical_report_json(const CriticalPoints& cp, const CriticalConfig& cfg) {
    nlohmann::ordered_json j;
    j["g_c_H"] = cp.g_c_H;
    j["g_c_Z"] = cp.g_c_Z;
    j["lambda_c_H"] = cp.lambda_c_H;
    j["lambda_c_Z"] = cp.lambda_c_Z;
    j["window"] = cfg.window;
    j["range"] = {cfg.range_lo, cfg.range_hi};
    j["flags"] = cp.flags;
    return j.dump(2) + "\n";
}

} // namespace z2hc
