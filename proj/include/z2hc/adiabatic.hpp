#pragma once

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/exact_oracle.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/schedule.hpp"
#include "z2hc/statevector.hpp"

namespace z2hc {

// One observable record per schedule step. For forward sweeps g is the
// coupling of H = Z + gX; for reverse sweeps the same column carries lambda
// of H = lambda*Z + X, and energy is the matching <H_lambda>.
struct TraceRow {
    double g = 0.0;
    double energy = 0.0;
    double z = 0.0;
    double x = 0.0;
    double err_bound = 0.0;
};

struct SweepTrace {
    std::vector<TraceRow> rows;
    std::string graph_digest;
    std::string schedule_descriptor;
    SweepDirection direction = SweepDirection::forward_g;
    double norm_drift = 0.0; // |norm^2 - 1| at the end of the sweep
};

namespace detail {

inline void check_norm_drift(const StateVector& s, double& drift) {
    drift = std::abs(s.norm2() - 1.0);
    if (drift > 1e-6)
        throw numeric_error("state norm drifted by " + fmt17(drift) + " over the sweep");
}

} // namespace detail

// Condensate start, then one symmetric-Trotter step per grid point
// g_k = k*g_step, recording observables and the accumulated error bound.
// Row 0 is the initial state at g = 0.
inline SweepTrace run_forward_sweep(const Graph& graph, const Schedule& schedule,
                                    int qubit_cap = kDefaultQubitCap) {
    schedule.validate();
    if (schedule.direction != SweepDirection::forward_g)
        throw invalid_argument("forward sweep requires a forward_g schedule");
    GaugeModel model = build_model(graph);
    CycleSpaceBasis basis(graph);
    DiagKernel kernel(model);
    StateVector state = closed_string_condensate(model, basis, qubit_cap);

    SweepTrace trace;
    trace.graph_digest = graph_digest(graph);
    trace.schedule_descriptor = schedule.descriptor();
    trace.direction = schedule.direction;
    int steps = schedule.n_steps();
    trace.rows.reserve(steps + 1);

    Observables obs = measure_observables(state, kernel, 0.0);
    trace.rows.push_back({0.0, obs.energy, obs.z_total, obs.x_total, 0.0});

    double bound = 0.0;
    for (int k = 1; k <= steps; ++k) {
        double g = schedule.g_at(k);
        split_trotter_step(state, kernel, 1.0, g, schedule.t_step, schedule.n_substeps);
        bound += trotter_step_error_bound(model, g, schedule.t_step, schedule.n_substeps);
        obs = measure_observables(state, kernel, g);
        trace.rows.push_back({g, obs.energy, obs.z_total, obs.x_total, bound});
    }
    detail::check_norm_drift(state, trace.norm_drift);
    return trace;
}

// Uniform-plus start, ramping H_lambda = lambda*Z + X over lambda_k =
// k*g_step. The trace's g column carries lambda; energy = lambda*<Z> + <X>.
inline SweepTrace run_reverse_sweep(const Graph& graph, const Schedule& schedule,
                                    int qubit_cap = kDefaultQubitCap) {
    schedule.validate();
    if (schedule.direction != SweepDirection::reverse_lambda)
        throw invalid_argument("reverse sweep requires a reverse_lambda schedule");
    GaugeModel model = build_model(graph);
    DiagKernel kernel(model);
    StateVector state = uniform_plus_state(model.n_qubits, qubit_cap);

    SweepTrace trace;
    trace.graph_digest = graph_digest(graph);
    trace.schedule_descriptor = schedule.descriptor();
    trace.direction = schedule.direction;
    int steps = schedule.n_steps();
    trace.rows.reserve(steps + 1);

    Observables obs = measure_observables(state, kernel, 0.0);
    trace.rows.push_back({0.0, obs.x_total, obs.z_total, obs.x_total, 0.0});

    double bound = 0.0;
    for (int k = 1; k <= steps; ++k) {
        double lambda = schedule.g_at(k);
        split_trotter_step(state, kernel, lambda, 1.0, schedule.t_step, schedule.n_substeps);
        bound += split_step_error_bound(model, lambda, 1.0, schedule.t_step, schedule.n_substeps);
        obs = measure_observables(state, kernel, 0.0);
        trace.rows.push_back(
            {lambda, lambda * obs.z_total + obs.x_total, obs.z_total, obs.x_total, bound});
    }
    detail::check_norm_drift(state, trace.norm_drift);
    return trace;
}

// |<ground(g)|psi_sweep(g)>|^2 at the requested couplings, evaluated while a
// forward sweep runs. Checkpoints snap to the nearest grid point. At g = 0
// the reference is the analytic condensate (the g = 0 ground space is
// degenerate; the sweep starts in this particular member).
inline std::vector<std::pair<double, double>> adiabatic_fidelity_probe(
    const Graph& graph, const Schedule& schedule, const std::vector<double>& checkpoints,
    int qubit_cap = kEigensolverCap) {
    schedule.validate();
    if (schedule.direction != SweepDirection::forward_g)
        throw invalid_argument("fidelity probe requires a forward_g schedule");
    GaugeModel model = build_model(graph);
    CycleSpaceBasis basis(graph);
    DiagKernel kernel(model);
    StateVector state = closed_string_condensate(model, basis, qubit_cap);

    int steps = schedule.n_steps();
    std::vector<std::vector<std::size_t>> due(steps + 1);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        int k = static_cast<int>(std::lround(checkpoints[c] / schedule.g_step));
        k = std::max(0, std::min(steps, k));
        due[k].push_back(c);
    }

    std::vector<std::pair<double, double>> result(checkpoints.size());
    auto record = [&](int k) {
        if (due[k].empty()) return;
        double g = schedule.g_at(k);
        double overlap;
        if (k == 0) {
            StateVector ref = closed_string_condensate(model, basis, qubit_cap);
            double re = 0.0, im = 0.0;
            for (std::size_t m = 0; m < state.dim(); ++m) {
                re += ref[m].real() * state[m].real() + ref[m].imag() * state[m].imag();
                im += ref[m].real() * state[m].imag() - ref[m].imag() * state[m].real();
            }
            overlap = re * re + im * im;
        } else {
            GroundState gs = ground_state_exact(model, g, qubit_cap);
            double re = 0.0, im = 0.0;
            for (std::size_t m = 0; m < state.dim(); ++m) {
                re += gs.state[m].real() * state[m].real();
                im += gs.state[m].real() * state[m].imag();
            }
            overlap = re * re + im * im;
        }
        for (std::size_t c : due[k]) result[c] = {g, overlap};
    };

    record(0);
    for (int k = 1; k <= steps; ++k) {
        double g = schedule.g_at(k);
        split_trotter_step(state, kernel, 1.0, g, schedule.t_step, schedule.n_substeps);
        record(k);
    }
    return result;
}

// Trace CSV: fixed header, one row per step, every value in the shortest
// exact decimal form.
inline void write_trace_csv(std::ostream& out, const SweepTrace& trace) {
    out << "g,energy,z,x,err_bound\n";
    for (const TraceRow& r : trace.rows)
        out << fmt17(r.g) << ',' << fmt17(r.energy) << ',' << fmt17(r.z) << ',' << fmt17(r.x)
            << ',' << fmt17(r.err_bound) << '\n';
}

inline SweepTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty trace input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "g,energy,z,x,err_bound")
        throw parse_error("expected trace header 'g,energy,z,x,err_bound'", 1);
    SweepTrace trace;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TraceRow r;
        double* fields[5] = {&r.g, &r.energy, &r.z, &r.x, &r.err_bound};
        const char* p = line.c_str();
        for (int f = 0; f < 5; ++f) {
            char* end = nullptr;
            *fields[f] = std::strtod(p, &end);
            if (end == p) throw parse_error("malformed trace row", line_no);
            p = end;
            if (f < 4) {
                if (*p != ',') throw parse_error("expected 5 comma-separated values", line_no);
                ++p;
            }
        }
        if (*p != '\0') throw parse_error("trailing content in trace row", line_no);
        trace.rows.push_back(r);
    }
    return trace;
}

} // namespace z2hc
