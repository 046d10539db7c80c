#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/schedule.hpp"

namespace z2hc {

// Hamiltonian data for H = Z + gX on a connected graph. Qubits sit on edges;
// plaquettes correspond one-to-one with vertices, and the plaquette operator
// at v acts on the edges incident to v. Z = sum of plaquette operators,
// X = -sum of single-qubit sigma^x.
struct GaugeModel {
    int n_qubits = 0;   // = N_e
    int n_vertices = 0; // = number of plaquettes
    std::vector<EdgeSubset> plaquette_masks; // per vertex: incident edges
    std::vector<int> n_l_per_plaquette;      // per vertex: degree (links per plaquette)
    static constexpr int n_p = 2;            // plaquettes sharing each link
    double sum_deg_sq = 0.0;                 // sum over vertices of degree^2
    int max_deg = 0;
};

// g and its reciprocal; lambda parameterizes the rescaled form
// H_lambda = lambda*Z + X = (1/g)*H. lambda is defined only for g > 0.
struct CouplingPoint {
    double g = 0.0;
    std::optional<double> lambda;
};

inline CouplingPoint make_coupling(double g) {
    if (g < 0) throw invalid_argument("coupling must be non-negative");
    CouplingPoint c{g, std::nullopt};
    if (g > 0) c.lambda = 1.0 / g;
    return c;
}

inline GaugeModel build_model(const Graph& graph) {
    if (!graph.is_connected()) throw invalid_argument("gauge model needs a connected graph");
    GaugeModel m;
    m.n_qubits = graph.n_edges();
    m.n_vertices = graph.n_vertices();
    m.plaquette_masks = vertex_incidence_masks(graph);
    m.n_l_per_plaquette.resize(m.n_vertices);
    for (int v = 0; v < m.n_vertices; ++v) {
        int d = graph.degree(v);
        m.n_l_per_plaquette[v] = d;
        m.sum_deg_sq += static_cast<double>(d) * d;
        m.max_deg = std::max(m.max_deg, d);
    }
    return m;
}

// Number of plaquettes with an odd count of occupied edges. Those evaluate to
// +1, the rest to -1, so the diagonal energy is 2*violations - N_v.
inline int diag_z_violations(const GaugeModel& m, EdgeSubset basis_state) {
    int viol = 0;
    for (EdgeSubset pm : m.plaquette_masks) viol += std::popcount(basis_state & pm) & 1;
    return viol;
}

inline double diag_z_energy(const GaugeModel& m, EdgeSubset basis_state) {
    return 2.0 * diag_z_violations(m, basis_state) - m.n_vertices;
}

// Per-step defect bound for the symmetric splitting of exp(-i(aZ + bX)t)
// into n substeps with the diagonal term as the outer factor:
//   ((1/12) a b^2 |[X,[X,Z]]| + (1/24) a^2 b |[Z,[Z,X]]|) t^3 / n^2.
// Each commutator of anticommuting Pauli factors carries a 2, so the nested
// ones carry 4: [X,[X,Z]] = 4 sum_v Z_v S_v^2 with S_v the incident-edge
// sigma^x sum (norm deg(v)^2), and [Z,[Z,X]] = 4 sum_l (Z_a+Z_b)^2 sigma^x_l
// with norm n_p^2 per link. The degree-squared sum is the per-vertex
// refinement of the uniform-lattice count N_v n_l^2; conservative mode keeps
// the uniform form with the maximum degree, which is never smaller.
inline double split_step_error_bound(const GaugeModel& m, double z_coeff, double x_coeff,
                                     double t, int n, bool conservative = false) {
    if (z_coeff < 0 || x_coeff < 0) throw invalid_argument("split coefficients must be >= 0");
    if (!(t > 0)) throw invalid_argument("step duration must be positive");
    if (n < 1) throw invalid_argument("substep count must be >= 1");
    double deg_term = conservative
                          ? static_cast<double>(m.n_vertices) * m.max_deg * m.max_deg
                          : m.sum_deg_sq;
    double comm_bba = (1.0 / 12.0) * z_coeff * x_coeff * x_coeff * 4.0 * deg_term;
    double comm_aab = (1.0 / 24.0) * z_coeff * z_coeff * x_coeff * m.n_qubits * 4.0 *
                      (GaugeModel::n_p * GaugeModel::n_p);
    return (comm_bba + comm_aab) * t * t * t / (static_cast<double>(n) * n);
}

inline double trotter_step_error_bound(const GaugeModel& m, double g, double t, int n,
                                       bool conservative = false) {
    if (g < 0) throw invalid_argument("coupling must be non-negative");
    if (g == 0) return 0.0;
    return split_step_error_bound(m, 1.0, g, t, n, conservative);
}

// Sum of the per-step bounds over the whole schedule at each step's coupling.
inline double cumulative_error_bound(const GaugeModel& m, const Schedule& schedule,
                                     bool conservative = false) {
    schedule.validate();
    double total = 0.0;
    for (int k = 1; k <= schedule.n_steps(); ++k) {
        double c = schedule.g_at(k);
        if (schedule.direction == SweepDirection::forward_g)
            total += trotter_step_error_bound(m, c, schedule.t_step, schedule.n_substeps,
                                              conservative);
        else
            total += split_step_error_bound(m, c, 1.0, schedule.t_step, schedule.n_substeps,
                                            conservative);
    }
    return total;
}

// Figure of merit for the overall algorithmic cost at a given critical
// coupling and target precision:
//   (1/g_c^2) sqrt((1/eps) N_e^(3/2) (N_v^3 + N_e/g_c)).
inline double complexity_estimate(const Graph& graph, double g_c, double epsilon) {
    if (!(g_c > 0)) throw invalid_argument("g_c must be positive");
    if (!(epsilon > 0)) throw invalid_argument("epsilon must be positive");
    double ne = graph.n_edges();
    double nv = graph.n_vertices();
    double inner = (1.0 / epsilon) * std::pow(ne, 1.5) * (nv * nv * nv + ne / g_c);
    return std::sqrt(inner) / (g_c * g_c);
}

} // namespace z2hc
