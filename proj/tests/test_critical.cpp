#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "json.hpp"
#include "z2hc/adiabatic.hpp"
#include "z2hc/critical.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/rng.hpp"
#include "z2hc/schedule.hpp"

using namespace z2hc;

namespace {

SweepTrace synth_trace(double h, int n, const std::function<double(double)>& energy,
                       const std::function<double(double)>& z) {
    SweepTrace t;
    t.direction = SweepDirection::forward_g;
    for (int i = 0; i < n; ++i) {
        double g = i * h;
        t.rows.push_back({g, energy(g), z(g), 0.0, 0.0});
    }
    return t;
}

double sample_variance(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += v[i];
    mean /= (hi - lo);
    double var = 0.0;
    for (std::size_t i = lo; i < hi; ++i) var += (v[i] - mean) * (v[i] - mean);
    return var / (hi - lo - 1);
}

} // namespace

TEST_CASE("finite differences recover polynomial and trig derivatives") {
    double h = 0.001;
    std::vector<double> quad(200), lin(200), con(200);
    for (int i = 0; i < 200; ++i) {
        double g = i * h;
        quad[i] = g * g;
        lin[i] = 3.0 * g - 1.0;
        con[i] = 4.25;
    }
    for (double d : finite_difference(quad, h, 2)) REQUIRE(d == Catch::Approx(2.0).margin(1e-6));
    for (double d : finite_difference(lin, h, 1)) REQUIRE(d == Catch::Approx(3.0).margin(1e-6));
    for (double d : finite_difference(con, h, 1)) REQUIRE(d == Catch::Approx(0.0).margin(1e-9));
    for (double d : finite_difference(con, h, 2)) REQUIRE(d == Catch::Approx(0.0).margin(1e-6));

    // sin' = cos to O(h^2), and the error contracts ~4x when h halves.
    auto sine_err = [](double hh) {
        int n = static_cast<int>(1.0 / hh) + 1;
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = std::sin(i * hh);
        auto d = finite_difference(f, hh, 1);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(d[i] - std::cos(i * hh)));
        return worst;
    };
    double e1 = sine_err(0.01), e2 = sine_err(0.005);
    REQUIRE(e1 <= 5e-4);
    REQUIRE(e2 <= e1 / 3.0);

    std::vector<double> short_series{1, 2, 3, 4};
    REQUIRE_THROWS_AS(finite_difference(short_series, h, 1), invalid_argument);
    REQUIRE_THROWS_AS(finite_difference(quad, h, 3), invalid_argument);
    REQUIRE_THROWS_AS(finite_difference(quad, 0.0, 1), invalid_argument);
}

TEST_CASE("smoothing basics") {
    std::vector<double> f{3, 1, 4, 1, 5, 9, 2, 6};
    REQUIRE(smooth(f, 1) == f);

    std::vector<double> con(40, 2.5);
    REQUIRE(smooth(con, 11) == con);

    // A linear series is a fixed point of every centered average.
    std::vector<double> lin(40);
    for (int i = 0; i < 40; ++i) lin[i] = 0.7 * i - 3.0;
    auto sl = smooth(lin, 9);
    for (int i = 0; i < 40; ++i) REQUIRE(sl[i] == Catch::Approx(lin[i]).margin(1e-12));

    REQUIRE_THROWS_AS(smooth(f, 2), invalid_argument);
    REQUIRE_THROWS_AS(smooth(f, 0), invalid_argument);
    REQUIRE_THROWS_AS(smooth(f, 9), invalid_argument);
    REQUIRE_THROWS_AS(smooth(f, -3), invalid_argument);
}

TEST_CASE("smoothing suppresses white noise about window-fold") {
    Rng rng(99);
    std::vector<double> noise(5001);
    for (auto& v : noise) v = rng.next_double() - 0.5;
    auto s = smooth(noise, 51);
    double v_raw = sample_variance(noise, 100, 4900);
    double v_smooth = sample_variance(s, 100, 4900);
    double gain = v_raw / v_smooth;
    REQUIRE(gain > 30.0);
    REQUIRE(gain < 80.0);
}

TEST_CASE("constructed extrema are located on the grid") {
    double h = 0.005;
    auto energy = [](double g) { return -std::exp(-(g - 0.55) * (g - 0.55) / (2 * 0.08 * 0.08)); };
    auto zfun = [](double g) { return std::tanh((g - 0.4) / 0.05); };
    SweepTrace t = synth_trace(h, 201, energy, zfun);

    CriticalConfig cfg;
    cfg.window = 11;
    CriticalPoints cp = detect_critical(t, cfg);
    REQUIRE(std::abs(cp.g_c_H - 0.55) <= h + 1e-12);
    REQUIRE(std::abs(cp.g_c_Z - 0.4) <= h + 1e-12);
    REQUIRE(cp.flags.empty());
    REQUIRE(cp.lambda_c_H * cp.g_c_H == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(cp.lambda_c_Z * cp.g_c_Z == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(cp.grid.size() == 201);
    REQUIRE(cp.d2H_smooth.size() == 201);
    REQUIRE(cp.grid[cp.index_H] == cp.g_c_H);
    REQUIRE(cp.grid[cp.index_Z] == cp.g_c_Z);
}

TEST_CASE("detection is invariant under shift and positive rescale") {
    double h = 0.005;
    auto energy = [](double g) { return -std::exp(-(g - 0.55) * (g - 0.55) / (2 * 0.08 * 0.08)); };
    auto zfun = [](double g) { return std::tanh((g - 0.4) / 0.05); };
    SweepTrace base = synth_trace(h, 201, energy, zfun);
    CriticalPoints cp0 = detect_critical(base);

    SweepTrace shifted = base;
    for (auto& r : shifted.rows) {
        r.energy += 3.0;
        r.z += 7.0;
    }
    CriticalPoints cp1 = detect_critical(shifted);
    REQUIRE(cp1.g_c_H == cp0.g_c_H);
    REQUIRE(cp1.g_c_Z == cp0.g_c_Z);

    SweepTrace scaled = base;
    for (auto& r : scaled.rows) {
        r.energy *= 13.7;
        r.z *= 13.7;
    }
    CriticalPoints cp2 = detect_critical(scaled);
    REQUIRE(cp2.g_c_H == cp0.g_c_H);
    REQUIRE(cp2.g_c_Z == cp0.g_c_Z);
}

TEST_CASE("ties break low and boundary extrema are flagged") {
    double h = 0.005;
    // z walks in exact integer steps, so |dZ| is bitwise flat and every
    // candidate ties; the pick must be the lowest admissible grid point,
    // which also sits on the range edge.
    SweepTrace flat;
    flat.direction = SweepDirection::forward_g;
    for (int i = 0; i < 201; ++i) {
        double g = i * h;
        flat.rows.push_back({g, -g * g * g, static_cast<double>(i), 0.0, 0.0});
    }
    CriticalConfig cfg;
    cfg.window = 11;
    CriticalPoints cp = detect_critical(flat, cfg);
    std::size_t lo = 10; // first grid point at or above range_lo = 0.05
    REQUIRE(cp.index_Z == lo);
    REQUIRE(cp.g_c_Z == Catch::Approx(0.05).epsilon(1e-12));
    // -g^3 has |d2H| growing with g: extremum pinned to the high edge.
    REQUIRE(cp.grid[cp.index_H] > 0.9);
    REQUIRE_FALSE(cp.flags.empty());
    REQUIRE(cp.flags[0] == "boundary");
}

TEST_CASE("detection rejects bad traces") {
    SweepTrace tiny = synth_trace(0.01, 4, [](double) { return 0.0; }, [](double) { return 0.0; });
    REQUIRE_THROWS_AS(detect_critical(tiny), invalid_argument);

    SweepTrace warped = synth_trace(
        0.01, 50, [](double g) { return g; }, [](double g) { return g; });
    warped.rows[20].g += 0.004;
    REQUIRE_THROWS_AS(detect_critical(warped), invalid_argument);

    SweepTrace ok = synth_trace(
        0.01, 50, [](double g) { return g * g; }, [](double g) { return g; });
    CriticalConfig outside;
    outside.range_lo = 2.0;
    outside.range_hi = 3.0;
    REQUIRE_THROWS_AS(detect_critical(ok, outside), invalid_argument);
    CriticalConfig inverted;
    inverted.range_lo = 0.5;
    inverted.range_hi = 0.1;
    REQUIRE_THROWS_AS(detect_critical(ok, inverted), invalid_argument);
}

TEST_CASE("report json carries the result and the config") {
    double h = 0.005;
    auto energy = [](double g) { return -std::exp(-(g - 0.55) * (g - 0.55) / (2 * 0.08 * 0.08)); };
    auto zfun = [](double g) { return std::tanh((g - 0.4) / 0.05); };
    SweepTrace t = synth_trace(h, 201, energy, zfun);
    CriticalConfig cfg;
    cfg.window = 11;
    CriticalPoints cp = detect_critical(t, cfg);

    std::string text = critical_report_json(cp, cfg);
    REQUIRE(text.back() == '\n');
    REQUIRE(text == critical_report_json(cp, cfg));

    auto j = nlohmann::json::parse(text);
    REQUIRE(j["g_c_H"].get<double>() == cp.g_c_H);
    REQUIRE(j["g_c_Z"].get<double>() == cp.g_c_Z);
    REQUIRE(j["lambda_c_H"].get<double>() == cp.lambda_c_H);
    REQUIRE(j["lambda_c_Z"].get<double>() == cp.lambda_c_Z);
    REQUIRE(j["window"].get<int>() == 11);
    REQUIRE(j["range"][0].get<double>() == cfg.range_lo);
    REQUIRE(j["range"][1].get<double>() == cfg.range_hi);
    REQUIRE(j["flags"].is_array());
    REQUIRE(j["flags"].empty());
}

TEST_CASE("torus benchmark is stable under grid refinement") {
    Graph t = torus_graph(3, 3);
    auto run = [&](double gs, int window) {
        Schedule s;
        s.direction = SweepDirection::forward_g;
        s.g_step = gs;
        s.t_step = 0.2;
        s.n_substeps = 8;
        s.g_max = 0.8;
        SweepTrace tr = run_forward_sweep(t, s);
        CriticalConfig cfg;
        cfg.window = window;
        cfg.range_lo = 0.05;
        cfg.range_hi = 0.8;
        return detect_critical(tr, cfg);
    };
    CriticalPoints coarse = run(0.01, 7);
    CriticalPoints fine = run(0.005, 13);
    INFO("coarse g_c_H=" << coarse.g_c_H << " g_c_Z=" << coarse.g_c_Z);
    INFO("fine   g_c_H=" << fine.g_c_H << " g_c_Z=" << fine.g_c_Z);
    // Halving g_step at fixed t_step also slows the ramp, so the two traces
    // differ by diabatic lag, not just sampling; the peak shifts ~0.035.
    REQUIRE(std::abs(coarse.g_c_H - fine.g_c_H) <= 0.05 + 1e-12);
    REQUIRE(std::abs(coarse.g_c_Z - fine.g_c_Z) <= 0.05 + 1e-12);
    REQUIRE(coarse.g_c_H > 0.1);
    REQUIRE(coarse.g_c_H < 0.75);
    REQUIRE(coarse.g_c_Z > 0.1);
    REQUIRE(coarse.g_c_Z < 0.75);
}
