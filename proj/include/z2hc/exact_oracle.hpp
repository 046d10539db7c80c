#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "z2hc/errors.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/statevector.hpp"

namespace z2hc {

inline constexpr int kDenseOracleCap = 12;
inline constexpr int kEigensolverCap = 22;

// H = z_coeff*Z + x_coeff*X as a dense real symmetric matrix. Diagonal from
// the plaquette energies; one -x_coeff entry per single-bit flip.
inline Eigen::MatrixXd dense_split_hamiltonian(const GaugeModel& model, double z_coeff,
                                               double x_coeff) {
    if (model.n_qubits > kDenseOracleCap)
        throw resource_error("dense oracle capped at " + std::to_string(kDenseOracleCap) +
                             " qubits");
    std::size_t dim = std::size_t{1} << model.n_qubits;
    DiagKernel kernel(model);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t m = 0; m < dim; ++m) {
        h(m, m) = z_coeff * kernel.energy(m);
        for (int q = 0; q < model.n_qubits; ++q) h(m, m ^ (std::size_t{1} << q)) = -x_coeff;
    }
    return h;
}

inline Eigen::MatrixXd dense_hamiltonian(const GaugeModel& model, double g) {
    return dense_split_hamiltonian(model, 1.0, g);
}

// exp(-iHt) applied through the full eigendecomposition; the working-precision
// reference the product-formula kernels are checked against.
inline StateVector& exact_evolution(StateVector& s, const GaugeModel& model, double g, double t) {
    if (model.n_qubits != s.n_qubits())
        throw invalid_argument("state/model qubit count mismatch");
    Eigen::MatrixXd h = dense_hamiltonian(model, g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw numeric_error("dense eigendecomposition failed");
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    std::size_t dim = s.dim();
    Eigen::VectorXd pr(dim), pi(dim);
    for (std::size_t m = 0; m < dim; ++m) {
        pr[m] = s[m].real();
        pi[m] = s[m].imag();
    }
    Eigen::VectorXd yr = v.transpose() * pr;
    Eigen::VectorXd yi = v.transpose() * pi;
    for (std::size_t k = 0; k < dim; ++k) {
        double c = std::cos(lam[k] * t), sn = std::sin(lam[k] * t);
        double r = c * yr[k] + sn * yi[k];
        double i = c * yi[k] - sn * yr[k];
        yr[k] = r;
        yi[k] = i;
    }
    pr = v * yr;
    pi = v * yi;
    for (std::size_t m = 0; m < dim; ++m) s[m] = {pr[m], pi[m]};
    return s;
}

struct GroundState {
    double energy = 0.0;
    StateVector state;
};

namespace detail {

// y = (z_coeff*Z + x_coeff*X) x for real vectors.
inline void apply_split_hamiltonian(const DiagKernel& kernel, double z_coeff, double x_coeff,
                                    const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    std::size_t dim = x.size();
    int nq = kernel.n_qubits();
    for (std::size_t m = 0; m < dim; ++m) y[m] = z_coeff * kernel.energy(m) * x[m];
    for (int q = 0; q < nq; ++q) {
        std::size_t step = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * step)
            for (std::size_t i = base; i < base + step; ++i) {
                y[i] -= x_coeff * x[i + step];
                y[i + step] -= x_coeff * x[i];
            }
    }
}

} // namespace detail

// Lowest eigenpair of z_coeff*Z + x_coeff*X by restarted two-pass Lanczos.
// No basis storage: the recurrence is run once for the tridiagonal
// coefficients and once more to accumulate the Ritz vector. Restarting from
// the Ritz vector substitutes for reorthogonalization; convergence is
// certified by an explicit residual check, never assumed.
inline GroundState ground_state_split(const GaugeModel& model, double z_coeff, double x_coeff,
                                      int cap = kEigensolverCap) {
    if (model.n_qubits > cap)
        throw resource_error("eigensolver capped at " + std::to_string(cap) + " qubits");
    std::size_t dim = std::size_t{1} << model.n_qubits;
    DiagKernel kernel(model);

    const int k_max = static_cast<int>(std::min<std::size_t>(dim, 160));
    const int max_restarts = 12;
    const double residual_tol = 1e-8;
    // Lucky-breakdown threshold relative to the Hamiltonian scale.
    const double hscale =
        std::abs(z_coeff) * model.n_vertices + std::abs(x_coeff) * model.n_qubits;
    const double beta_tol = 1e-13 * std::max(1.0, hscale);

    // The uniform positive start vector lies in the symmetric sector that
    // contains the global ground state (all off-diagonal elements of H are
    // <= 0, so the ground state can be chosen entrywise positive).
    Eigen::VectorXd start = Eigen::VectorXd::Constant(dim, std::pow(2.0, -0.5 * model.n_qubits));

    Eigen::VectorXd v_prev(dim), v(dim), w(dim), ritz(dim);
    double residual = 0.0;

    for (int restart = 0; restart < max_restarts; ++restart) {
        std::vector<double> alpha, beta;
        alpha.reserve(k_max);
        beta.reserve(k_max);

        auto recurrence_step = [&](int j) {
            detail::apply_split_hamiltonian(kernel, z_coeff, x_coeff, v, w);
            double a = v.dot(w);
            w -= a * v;
            if (j > 0) w -= beta[j - 1] * v_prev;
            return a;
        };

        // First pass: tridiagonal coefficients only.
        v = start;
        v_prev.setZero();
        int k_eff = 0;
        for (int j = 0; j < k_max; ++j) {
            alpha.push_back(recurrence_step(j));
            k_eff = j + 1;
            double b = w.norm();
            if (b < beta_tol) break;
            if (j + 1 == k_max) break;
            beta.push_back(b);
            v_prev.swap(v);
            v = w / b;
        }

        Eigen::VectorXd diag(k_eff), sub(std::max(k_eff - 1, 0));
        for (int j = 0; j < k_eff; ++j) diag[j] = alpha[j];
        for (int j = 0; j + 1 < k_eff; ++j) sub[j] = beta[j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub);
        if (tri.info() != Eigen::Success) throw numeric_error("tridiagonal eigensolve failed");
        double theta = tri.eigenvalues()[0];
        Eigen::VectorXd coef = tri.eigenvectors().col(0);

        // Second pass: identical recurrence, accumulating the Ritz vector.
        v = start;
        v_prev.setZero();
        ritz.setZero();
        for (int j = 0; j < k_eff; ++j) {
            ritz += coef[j] * v;
            if (j + 1 == k_eff) break;
            recurrence_step(j);
            double b = beta[j];
            v_prev.swap(v);
            v = w / b;
        }
        ritz.normalize();

        detail::apply_split_hamiltonian(kernel, z_coeff, x_coeff, ritz, w);
        residual = (w - theta * ritz).norm();
        if (residual <= residual_tol) {
            GroundState gs{theta, StateVector(model.n_qubits, cap)};
            for (std::size_t m = 0; m < dim; ++m) gs.state[m] = ritz[m];
            return gs;
        }
        start = ritz;
    }
    throw numeric_error("ground state not converged: residual " + fmt17(residual) + " after " +
                        std::to_string(max_restarts) + " restarts");
}

inline GroundState ground_state_exact(const GaugeModel& model, double g,
                                      int cap = kEigensolverCap) {
    if (g < 0) throw invalid_argument("coupling must be non-negative");
    return ground_state_split(model, 1.0, g, cap);
}

} // namespace z2hc
