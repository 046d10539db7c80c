#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "z2hc/errors.hpp"
#include "z2hc/graph.hpp"

namespace z2hc {

// Shortest decimal form that round-trips a double exactly.
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// forward_g: ramp H = Z + gX with g from g_step up to g_max.
// reverse_lambda: ramp H = lambda*Z + X with lambda from g_step up to g_max
// (the g_* fields are read as lambda values in that mode).
enum class SweepDirection { forward_g, reverse_lambda };

inline const char* direction_name(SweepDirection d) {
    return d == SweepDirection::forward_g ? "forward" : "reverse";
}

// Piecewise-constant annealing schedule: the coupling is held at k*g_step for
// a time t_step, evolved with n_substeps symmetric product-formula substeps,
// for k = 1..n_steps(). Step 0 is the initial state at coupling 0.
struct Schedule {
    SweepDirection direction = SweepDirection::forward_g;
    double g_step = 0.001;
    double t_step = 0.1;
    int n_substeps = 100;
    double g_max = 1.0;

    void validate() const {
        if (!(g_step > 0) || !std::isfinite(g_step))
            throw invalid_argument("schedule: g_step must be positive");
        if (!(t_step > 0) || !std::isfinite(t_step))
            throw invalid_argument("schedule: t_step must be positive");
        if (n_substeps < 1) throw invalid_argument("schedule: n_substeps must be >= 1");
        if (!(g_max >= g_step) || !std::isfinite(g_max))
            throw invalid_argument("schedule: g_max must be >= g_step");
    }

    int n_steps() const { return static_cast<int>(std::floor(g_max / g_step + 1e-9)); }

    // Grid by integer multiplication so the g values carry no accumulated
    // floating-point drift.
    double g_at(int k) const { return static_cast<double>(k) * g_step; }

    std::string descriptor() const {
        return std::string("dir=") + direction_name(direction) + " gs=" + fmt17(g_step) +
               " ts=" + fmt17(t_step) + " n=" + std::to_string(n_substeps) +
               " gmax=" + fmt17(g_max);
    }

    std::string digest() const { return hex16(fnv1a64(descriptor())); }
};

// The flag-default schedule: g_s = 0.001, t_s = 0.1, n = 100, g up to 1.
inline Schedule reference_schedule() {
    return Schedule{SweepDirection::forward_g, 0.001, 0.1, 100, 1.0};
}

// Coarser schedule sized for tabletop runs: 5x faster ramp, 80 grid points.
inline Schedule desk_schedule() {
    return Schedule{SweepDirection::forward_g, 0.01, 0.2, 8, 0.8};
}

} // namespace z2hc
