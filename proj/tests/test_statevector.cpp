#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/statevector.hpp"

using namespace z2hc;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

StateVector torus_condensate() {
    Graph t = torus_graph(3, 3);
    GaugeModel m = build_model(t);
    CycleSpaceBasis basis(t);
    return closed_string_condensate(m, basis);
}

double max_amp_diff(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t m = 0; m < a.dim(); ++m) d = std::max(d, std::abs(a[m] - b[m]));
    return d;
}

} // namespace

TEST_CASE("state construction and caps") {
    StateVector s(3);
    REQUIRE(s.dim() == 8);
    REQUIRE(s.norm2() == 0.0);
    REQUIRE_THROWS_AS(StateVector(27), resource_error);
    REQUIRE_THROWS_AS(StateVector(5, 4), resource_error);
    REQUIRE_THROWS_AS(StateVector(0), invalid_argument);
}

TEST_CASE("uniform plus state") {
    StateVector s = uniform_plus_state(2);
    for (std::size_t m = 0; m < 4; ++m) {
        REQUIRE(s[m].real() == Catch::Approx(0.5).epsilon(1e-15));
        REQUIRE(s[m].imag() == 0.0);
    }

    Graph t = torus_graph(3, 3);
    GaugeModel model = build_model(t);
    StateVector plus = uniform_plus_state(model.n_qubits);
    Observables obs = measure_observables(plus, model, 0.7);
    REQUIRE(obs.x_total == Catch::Approx(-18.0).epsilon(1e-12));
    REQUIRE(obs.z_total == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(obs.energy == Catch::Approx(0.7 * -18.0).epsilon(1e-12));
}

TEST_CASE("condensate is the equal superposition of the cycle space") {
    Graph t = torus_graph(3, 3);
    GaugeModel model = build_model(t);
    CycleSpaceBasis basis(t);
    StateVector s = closed_string_condensate(model, basis);

    int nonzero = 0;
    for (std::size_t m = 0; m < s.dim(); ++m) {
        if (s[m] != std::complex<double>{0.0, 0.0}) {
            ++nonzero;
            REQUIRE(s[m].real() == Catch::Approx(1.0 / 32.0).epsilon(1e-15));
            REQUIRE(basis.contains(m));
        }
    }
    REQUIRE(nonzero == 1024);
    REQUIRE(s.norm2() == Catch::Approx(1.0).epsilon(1e-13));

    Observables obs = measure_observables(s, model, 0.0, true);
    REQUIRE(obs.z_total == Catch::Approx(-9.0).epsilon(1e-13));
    REQUIRE(obs.energy == Catch::Approx(-9.0).epsilon(1e-13));
    REQUIRE(obs.x_total == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(obs.per_plaquette.has_value());
    for (double zv : *obs.per_plaquette) REQUIRE(std::abs(zv + 1.0) <= 1e-12);
}

TEST_CASE("triangle condensate is the GHZ pair") {
    Graph tri = triangle();
    GaugeModel model = build_model(tri);
    CycleSpaceBasis basis(tri);
    StateVector s = closed_string_condensate(model, basis);
    double r = 1.0 / std::sqrt(2.0);
    REQUIRE(s[0b000].real() == Catch::Approx(r).epsilon(1e-15));
    REQUIRE(s[0b111].real() == Catch::Approx(r).epsilon(1e-15));
    for (std::size_t m = 1; m < 7; ++m) REQUIRE(s[m] == std::complex<double>{0.0, 0.0});
}

TEST_CASE("tree condensate concentrates on the empty mask") {
    Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
    GaugeModel model = build_model(path);
    CycleSpaceBasis basis(path);
    StateVector s = closed_string_condensate(model, basis);
    REQUIRE(s[0] == std::complex<double>{1.0, 0.0});
    for (std::size_t m = 1; m < s.dim(); ++m) REQUIRE(s[m] == std::complex<double>{0.0, 0.0});
}

TEST_CASE("diagonal phase action") {
    Graph tri = triangle();
    GaugeModel model = build_model(tri);
    DiagKernel kernel(model);

    StateVector s = uniform_plus_state(3);
    StateVector ref = s;
    apply_diag_z(s, kernel, 0.0);
    REQUIRE(max_amp_diff(s, ref) == 0.0);

    // Condensate: global phase exp(+i*angle*N_v).
    CycleSpaceBasis basis(tri);
    StateVector c = closed_string_condensate(model, basis);
    StateVector c0 = c;
    double angle = 0.37;
    apply_diag_z(c, kernel, angle);
    std::complex<double> phase{std::cos(angle * 3), std::sin(angle * 3)};
    for (std::size_t m = 0; m < c.dim(); ++m)
        REQUIRE(std::abs(c[m] - phase * c0[m]) <= 1e-14);

    // Additivity: a then b equals a+b.
    StateVector x = uniform_plus_state(3), y = uniform_plus_state(3);
    apply_diag_z(x, kernel, 0.21);
    apply_diag_z(x, kernel, 0.34);
    apply_diag_z(y, kernel, 0.55);
    REQUIRE(max_amp_diff(x, y) <= 1e-12);

    StateVector wrong(4);
    REQUIRE_THROWS_AS(apply_diag_z(wrong, kernel, 0.1), invalid_argument);
}

TEST_CASE("kernel table agrees with on-the-fly evaluation") {
    Graph g = random_connected_graph(7, 12, std::uint64_t{77});
    GaugeModel model = build_model(g);
    DiagKernel table(model, 20), direct(model, 0);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << model.n_qubits); ++m) {
        REQUIRE(table.violations(m) == direct.violations(m));
        REQUIRE(table.energy(m) == diag_z_energy(model, m));
    }
}

TEST_CASE("x field rotation identities") {
    StateVector s(1);
    s[0] = 1.0;
    apply_x_field(s, 1.0, M_PI / 2);
    REQUIRE(std::abs(s[0]) <= 1e-15);
    REQUIRE(std::abs(s[1] - std::complex<double>{0.0, 1.0}) <= 1e-15);

    // theta = 0: identity.
    StateVector u = uniform_plus_state(3);
    StateVector u0 = u;
    apply_x_field(u, 0.7, 0.0);
    REQUIRE(max_amp_diff(u, u0) == 0.0);

    // uniform plus is a +1 eigenstate of every sigma^x: global phase e^{i n theta}.
    double theta = 0.29;
    apply_x_field(u, 1.0, theta);
    std::complex<double> phase{std::cos(3 * theta), std::sin(3 * theta)};
    for (std::size_t m = 0; m < u.dim(); ++m)
        REQUIRE(std::abs(u[m] - phase * u0[m]) <= 1e-14);

    // Composition: rotations about the same axis add.
    StateVector a = uniform_plus_state(2), b = uniform_plus_state(2);
    apply_x_field(a, 0.5, 0.3);
    apply_x_field(a, 0.5, 0.4);
    apply_x_field(b, 0.5, 0.7);
    REQUIRE(max_amp_diff(a, b) <= 1e-13);
}

TEST_CASE("trotter step preserves norm and handles g=0 exactly") {
    Graph t = torus_graph(3, 3);
    GaugeModel model = build_model(t);
    DiagKernel kernel(model);
    CycleSpaceBasis basis(t);

    StateVector s = closed_string_condensate(model, basis);
    split_trotter_step(s, kernel, 1.0, 0.5, 0.1, 10);
    REQUIRE(std::abs(s.norm2() - 1.0) <= 1e-11);

    // g = 0: pure diagonal evolution; the condensate picks up a global phase.
    StateVector c = closed_string_condensate(model, basis);
    StateVector c0 = c;
    split_trotter_step(c, kernel, 1.0, 0.0, 0.1, 10);
    std::complex<double> phase{std::cos(0.1 * 9), std::sin(0.1 * 9)};
    for (std::size_t m = 0; m < c.dim(); ++m)
        REQUIRE(std::abs(c[m] - phase * c0[m]) <= 1e-13);

    REQUIRE_THROWS_AS(split_trotter_step(s, kernel, 1.0, 0.5, 0.1, 0), invalid_argument);
}

TEST_CASE("observable identities on evolved states") {
    Graph g = random_connected_graph(6, 9, std::uint64_t{15});
    GaugeModel model = build_model(g);
    DiagKernel kernel(model);
    CycleSpaceBasis basis(g);
    StateVector s = closed_string_condensate(model, basis);
    for (int k = 1; k <= 20; ++k) {
        double gc = 0.05 * k;
        split_trotter_step(s, kernel, 1.0, gc, 0.2, 4);
        Observables obs = measure_observables(s, kernel, gc);
        REQUIRE(obs.energy == Catch::Approx(obs.z_total + gc * obs.x_total).margin(1e-10));
        REQUIRE(obs.z_total >= -model.n_vertices - 1e-9);
        REQUIRE(obs.z_total <= model.n_vertices + 1e-9);
        REQUIRE(obs.x_total >= -model.n_qubits - 1e-9);
        REQUIRE(obs.x_total <= model.n_qubits + 1e-9);
    }
    REQUIRE(std::abs(s.norm2() - 1.0) <= 1e-11);
}

TEST_CASE("sampling follows the amplitude law") {
    // Concentrated state: every draw identical.
    StateVector one(4);
    one[0b1010] = 1.0;
    auto draws = sample_basis_states(one, 500, 42);
    for (EdgeSubset d : draws) REQUIRE(d == 0b1010);

    // Triangle condensate: close to 50/50 over the two members.
    Graph tri = triangle();
    StateVector c = closed_string_condensate(build_model(tri), CycleSpaceBasis(tri));
    auto d2 = sample_basis_states(c, 20000, 7);
    std::map<EdgeSubset, int> freq;
    for (EdgeSubset d : d2) ++freq[d];
    REQUIRE(freq.size() == 2);
    REQUIRE(freq[0b000] + freq[0b111] == 20000);
    // 3 sigma of binomial(20000, 0.5) is about 212.
    REQUIRE(std::abs(freq[0b000] - 10000) < 300);

    // Determinism by seed.
    auto d3 = sample_basis_states(c, 100, 55);
    auto d4 = sample_basis_states(c, 100, 55);
    REQUIRE(d3 == d4);
    REQUIRE_THROWS_AS(sample_basis_states(c, 0, 1), invalid_argument);
}

TEST_CASE("hc search outcomes") {
    Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
    StateVector tree = closed_string_condensate(build_model(path), CycleSpaceBasis(path));
    HcSearchResult r = hc_search(tree, path, 200, 3);
    REQUIRE_FALSE(r.found);
    REQUIRE(r.hc_hits == 0);

    // C_9: the only other closed string is the full ring.
    std::vector<std::pair<int, int>> redges;
    for (int v = 0; v < 9; ++v) redges.push_back({v, (v + 1) % 9});
    Graph ring(9, std::move(redges));
    StateVector rc = closed_string_condensate(build_model(ring), CycleSpaceBasis(ring));
    HcSearchResult rr = hc_search(rc, ring, 200, 3);
    REQUIRE(rr.found);
    REQUIRE(rr.witness == (EdgeSubset{1} << 9) - 1);
    REQUIRE(rr.hc_hits > 0);

    StateVector tc = torus_condensate();
    Graph t = torus_graph(3, 3);
    HcSearchResult tr = hc_search(tc, t, 2000, 11);
    REQUIRE(tr.found);
    REQUIRE(is_hamiltonian_cycle_config(t, tr.witness));
}

TEST_CASE("statevector dump round trip") {
    Graph tri = triangle();
    GaugeModel model = build_model(tri);
    DiagKernel kernel(model);
    StateVector s = uniform_plus_state(3);
    split_trotter_step(s, kernel, 1.0, 0.8, 0.3, 5);

    std::ostringstream out;
    write_statevector(out, s);
    std::string payload = out.str();
    REQUIRE(payload.substr(0, 8) == "Z2SV1 3\n");
    REQUIRE(payload.size() == 8 + 8 * 16);

    std::istringstream in(payload);
    StateVector back = read_statevector(in);
    REQUIRE(back.n_qubits() == 3);
    REQUIRE(max_amp_diff(back, s) == 0.0);

    std::istringstream bad("Z2SVX 3\n");
    REQUIRE_THROWS_AS(read_statevector(bad), parse_error);
    std::istringstream trunc("Z2SV1 3\n1234");
    REQUIRE_THROWS_AS(read_statevector(trunc), parse_error);
}
