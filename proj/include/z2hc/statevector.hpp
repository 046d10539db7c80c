#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/rng.hpp"

namespace z2hc {

inline constexpr int kDefaultQubitCap = 26;

// Dense 2^n amplitude vector. Index = basis mask, bit i = edge i occupied.
// Evolution kernels mutate in place; copy explicitly if history is needed.
class StateVector {
public:
    explicit StateVector(int n_qubits, int cap = kDefaultQubitCap) : n_(n_qubits) {
        if (n_qubits < 1) throw invalid_argument("state needs at least one qubit");
        if (n_qubits > cap)
            throw resource_error("state of " + std::to_string(n_qubits) +
                                 " qubits exceeds cap " + std::to_string(cap));
        amp_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amp_.size(); }
    std::complex<double>* data() { return amp_.data(); }
    const std::complex<double>* data() const { return amp_.data(); }
    std::complex<double>& operator[](std::uint64_t m) { return amp_[m]; }
    const std::complex<double>& operator[](std::uint64_t m) const { return amp_[m]; }

    double norm2() const {
        double s = 0.0;
        for (const auto& a : amp_) s += a.real() * a.real() + a.imag() * a.imag();
        return s;
    }

private:
    int n_;
    std::vector<std::complex<double>> amp_;
};

// Ground state of X alone: every amplitude 2^(-n/2), all spins along +x.
inline StateVector uniform_plus_state(int n_qubits, int cap = kDefaultQubitCap) {
    StateVector s(n_qubits, cap);
    double a = std::pow(2.0, -0.5 * n_qubits);
    for (std::size_t m = 0; m < s.dim(); ++m) s[m] = a;
    return s;
}

// Equal-amplitude superposition of all closed-string configurations: the
// g = 0 ground state used to seed forward sweeps. Members are enumerated by
// Gray code over the fundamental-cycle basis, 2^dim of them.
inline StateVector closed_string_condensate(const GaugeModel& model, const CycleSpaceBasis& basis,
                                            int cap = kDefaultQubitCap) {
    StateVector s(model.n_qubits, cap);
    std::uint64_t members = std::uint64_t{1} << basis.dimension();
    double a = 1.0 / std::sqrt(static_cast<double>(members));
    EdgeSubset mask = 0;
    s[0] = a;
    for (std::uint64_t k = 1; k < members; ++k) {
        mask ^= basis.cycles()[std::countr_zero(k)];
        s[mask] = a;
    }
    return s;
}

// Evaluates plaquette-violation counts per basis mask. Below the table
// threshold the counts are tabulated once (one byte per mask); above it they
// are recomputed from the plaquette masks on every access.
class DiagKernel {
public:
    explicit DiagKernel(const GaugeModel& model, int table_threshold = 20) : model_(&model) {
        if (model.n_qubits <= table_threshold && model.n_vertices <= 32) {
            std::size_t dim = std::size_t{1} << model.n_qubits;
            // parity[m] = per-vertex occupation parities; violations = popcount.
            std::vector<std::uint32_t> parity(dim, 0);
            std::vector<std::uint32_t> edge_parity(model.n_qubits);
            for (int e = 0; e < model.n_qubits; ++e) {
                std::uint32_t p = 0;
                for (int v = 0; v < model.n_vertices; ++v)
                    if (model.plaquette_masks[v] >> e & 1) p |= std::uint32_t{1} << v;
                edge_parity[e] = p;
            }
            table_.resize(dim);
            table_[0] = 0;
            for (std::size_t m = 1; m < dim; ++m) {
                parity[m] = parity[m & (m - 1)] ^ edge_parity[std::countr_zero(m)];
                table_[m] = static_cast<std::uint8_t>(std::popcount(parity[m]));
            }
        }
    }

    int n_vertices() const { return model_->n_vertices; }
    int n_qubits() const { return model_->n_qubits; }
    const GaugeModel& model() const { return *model_; }

    int violations(std::uint64_t mask) const {
        if (!table_.empty()) return table_[mask];
        return diag_z_violations(*model_, mask);
    }

    double energy(std::uint64_t mask) const { return 2.0 * violations(mask) - model_->n_vertices; }

private:
    const GaugeModel* model_;
    std::vector<std::uint8_t> table_;
};

// amplitude[m] *= exp(-i * angle * E_Z(m)). The energy takes one of
// N_v + 1 values, so the phases are precomputed per violation count.
inline StateVector& apply_diag_z(StateVector& s, const DiagKernel& kernel, double angle) {
    if (kernel.n_qubits() != s.n_qubits())
        throw invalid_argument("state/model qubit count mismatch");
    int nv = kernel.n_vertices();
    std::vector<std::complex<double>> phase(nv + 1);
    for (int v = 0; v <= nv; ++v) {
        double e = 2.0 * v - nv;
        phase[v] = {std::cos(angle * e), -std::sin(angle * e)};
    }
    auto* a = s.data();
    std::size_t dim = s.dim();
#pragma omp parallel for schedule(static)
    for (std::size_t m = 0; m < dim; ++m) a[m] *= phase[kernel.violations(m)];
    return s;
}

inline StateVector& apply_diag_z(StateVector& s, const GaugeModel& model, double angle) {
    DiagKernel kernel(model, 0); // on-the-fly mode; callers in loops hold their own kernel
    return apply_diag_z(s, kernel, angle);
}

// exp(-i * (-g sum_l sigma^x_l) * angle_t): a rotation exp(+i theta sigma^x)
// on every qubit with theta = g * angle_t.
inline StateVector& apply_x_field(StateVector& s, double g, double angle_t) {
    double theta = g * angle_t;
    double c = std::cos(theta);
    double sn = std::sin(theta);
    auto* a = s.data();
    std::size_t dim = s.dim();
    for (int q = 0; q < s.n_qubits(); ++q) {
        std::size_t step = std::size_t{1} << q;
#pragma omp parallel for schedule(static)
        for (std::size_t base = 0; base < dim; base += 2 * step) {
            for (std::size_t i = base; i < base + step; ++i) {
                double re0 = a[i].real(), im0 = a[i].imag();
                double re1 = a[i + step].real(), im1 = a[i + step].imag();
                a[i] = {c * re0 - sn * im1, c * im0 + sn * re1};
                a[i + step] = {c * re1 - sn * im0, c * im1 + sn * re0};
            }
        }
    }
    return s;
}

// One schedule step of exp(-i (z_coeff*Z + x_coeff*X) t) by the symmetric
// splitting with the diagonal term outermost:
//   D(t/2n) [X(t/n) D(t/n)]^(n-1) X(t/n) D(t/2n)
// applied right to left; n+1 diagonal factors, n field factors.
inline StateVector& split_trotter_step(StateVector& s, const DiagKernel& kernel, double z_coeff,
                                       double x_coeff, double t, int n) {
    if (n < 1) throw invalid_argument("substep count must be >= 1");
    double tau = t / n;
    apply_diag_z(s, kernel, z_coeff * tau / 2);
    for (int i = 1; i < n; ++i) {
        apply_x_field(s, x_coeff, tau);
        apply_diag_z(s, kernel, z_coeff * tau);
    }
    apply_x_field(s, x_coeff, tau);
    apply_diag_z(s, kernel, z_coeff * tau / 2);
    return s;
}

inline StateVector& symmetric_trotter_step(StateVector& s, const DiagKernel& kernel, double g,
                                           double t, int n) {
    return split_trotter_step(s, kernel, 1.0, g, t, n);
}

inline StateVector& symmetric_trotter_step(StateVector& s, const GaugeModel& model, double g,
                                           double t, int n) {
    DiagKernel kernel(model);
    return split_trotter_step(s, kernel, 1.0, g, t, n);
}

struct Observables {
    double energy = 0.0;  // <Z> + g <X> at the g of evaluation
    double z_total = 0.0; // <Z>
    double x_total = 0.0; // <X> = -sum_l <sigma^x_l>
    std::optional<std::vector<double>> per_plaquette;
};

inline Observables measure_observables(const StateVector& s, const DiagKernel& kernel, double g,
                                       bool with_per_plaquette = false) {
    if (kernel.n_qubits() != s.n_qubits())
        throw invalid_argument("state/model qubit count mismatch");
    Observables obs;
    const auto* a = s.data();
    std::size_t dim = s.dim();
    int nv = kernel.n_vertices();

    double z = 0.0;
    for (std::size_t m = 0; m < dim; ++m) {
        double p = a[m].real() * a[m].real() + a[m].imag() * a[m].imag();
        z += p * (2.0 * kernel.violations(m) - nv);
    }
    obs.z_total = z;

    double xsum = 0.0; // sum over qubits of <sigma^x_l>
    for (int q = 0; q < s.n_qubits(); ++q) {
        std::size_t step = std::size_t{1} << q;
        double xq = 0.0;
        for (std::size_t base = 0; base < dim; base += 2 * step)
            for (std::size_t i = base; i < base + step; ++i)
                xq += a[i].real() * a[i + step].real() + a[i].imag() * a[i + step].imag();
        xsum += 2.0 * xq;
    }
    obs.x_total = -xsum;
    obs.energy = obs.z_total + g * obs.x_total;

    if (with_per_plaquette) {
        const auto& model = kernel.model();
        std::vector<double> zv(nv, 0.0);
        for (std::size_t m = 0; m < dim; ++m) {
            double p = a[m].real() * a[m].real() + a[m].imag() * a[m].imag();
            for (int v = 0; v < nv; ++v)
                zv[v] += (std::popcount(m & model.plaquette_masks[v]) & 1) ? p : -p;
        }
        obs.per_plaquette = std::move(zv);
    }
    return obs;
}

inline Observables measure_observables(const StateVector& s, const GaugeModel& model, double g,
                                       bool with_per_plaquette = false) {
    DiagKernel kernel(model, 0);
    return measure_observables(s, kernel, g, with_per_plaquette);
}

// shots i.i.d. draws from |amplitude|^2, returned in draw order. The sorted
// uniforms are swept against the cumulative distribution in one pass, so the
// cost is O(dim + shots log shots) independent of where the mass sits.
inline std::vector<EdgeSubset> sample_basis_states(const StateVector& s, std::uint64_t shots,
                                                   std::uint64_t seed) {
    if (shots < 1) throw invalid_argument("shots must be >= 1");
    Rng rng(seed);
    double total = s.norm2();
    std::vector<std::pair<double, std::uint64_t>> draws(shots);
    for (std::uint64_t j = 0; j < shots; ++j) draws[j] = {rng.next_double() * total, j};
    std::sort(draws.begin(), draws.end());

    std::vector<EdgeSubset> out(shots);
    const auto* a = s.data();
    std::size_t dim = s.dim();
    double cum = 0.0;
    std::uint64_t j = 0;
    std::uint64_t last_occupied = 0;
    for (std::size_t m = 0; m < dim && j < shots; ++m) {
        double p = a[m].real() * a[m].real() + a[m].imag() * a[m].imag();
        if (p > 0) last_occupied = m;
        cum += p;
        while (j < shots && draws[j].first < cum) {
            out[draws[j].second] = m;
            ++j;
        }
    }
    // Rounding can leave the largest draws just past the final cumulative sum.
    for (; j < shots; ++j) out[draws[j].second] = last_occupied;
    return out;
}

struct HcSearchResult {
    bool found = false;
    EdgeSubset witness = 0;
    std::uint64_t hc_hits = 0;
    std::uint64_t shots = 0;
};

// Measurement-based search: sample, keep the first basis state whose occupied
// edges form a Hamiltonian cycle. Expected shots to a hit is S_0/N_hc when
// sampling the condensate.
inline HcSearchResult hc_search(const StateVector& s, const Graph& graph, std::uint64_t shots,
                                std::uint64_t seed) {
    auto inc = vertex_incidence_masks(graph);
    auto samples = sample_basis_states(s, shots, seed);
    HcSearchResult r;
    r.shots = shots;
    for (EdgeSubset m : samples) {
        if (is_hamiltonian_cycle_config(graph, m, inc)) {
            if (!r.found) {
                r.found = true;
                r.witness = m;
            }
            ++r.hc_hits;
        }
    }
    return r;
}

// Debug dump: "Z2SV1 <n_qubits>\n" then interleaved (re, im) doubles,
// little-endian, index = basis mask.
inline void write_statevector(std::ostream& out, const StateVector& s) {
    out << "Z2SV1 " << s.n_qubits() << '\n';
    auto put = [&](double d) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(d);
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(u >> (8 * i));
        out.write(b, 8);
    };
    for (std::size_t m = 0; m < s.dim(); ++m) {
        put(s[m].real());
        put(s[m].imag());
    }
}

inline StateVector read_statevector(std::istream& in, int cap = kDefaultQubitCap) {
    std::string magic;
    int n = 0;
    if (!(in >> magic >> n) || magic != "Z2SV1")
        throw parse_error("expected statevector header 'Z2SV1 <n_qubits>'");
    if (in.get() != '\n') throw parse_error("expected newline after statevector header");
    StateVector s(n, cap);
    auto get = [&](double& d) {
        char b[8];
        if (!in.read(b, 8)) throw parse_error("truncated statevector payload");
        std::uint64_t u = 0;
        for (int i = 0; i < 8; ++i) u |= std::uint64_t(static_cast<unsigned char>(b[i])) << (8 * i);
        d = std::bit_cast<double>(u);
    };
    for (std::size_t m = 0; m < s.dim(); ++m) {
        double re, im;
        get(re);
        get(im);
        s[m] = {re, im};
    }
    return s;
}

} // namespace z2hc
