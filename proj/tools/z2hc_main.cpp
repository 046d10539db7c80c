// Command-line front end: graph generation, HC counting, adiabatic sweeps,
// critical-point extraction, measurement-based HC search, and batch ensembles.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "z2hc/adiabatic.hpp"
#include "z2hc/critical.hpp"
#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/experiments.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/schedule.hpp"
#include "z2hc/statevector.hpp"

namespace fs = std::filesystem;
using namespace z2hc;

namespace {

Graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resource_error("cannot open graph file " + path);
    return parse_graph(in);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw resource_error("cannot write " + path);
    out << text;
}

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = ".";
    int qubit_cap = kDefaultQubitCap;
};

int cmd_gen(const GlobalOpts& g, int nv, int ne, int count, const std::vector<int>& torus,
            std::string out_dir) {
    if (out_dir.empty()) out_dir = g.output_dir;
    fs::create_directories(out_dir);
    if (!torus.empty()) {
        Graph graph = torus_graph(torus[0], torus[1]);
        std::string name = graph_digest(graph) + ".graph";
        write_text_file((fs::path(out_dir) / name).string(), format_graph(graph));
        std::cout << name << " torus " << torus[0] << "x" << torus[1]
                  << " nv=" << graph.n_vertices() << " ne=" << graph.n_edges() << "\n";
        return 0;
    }
    if (nv <= 0 || ne < 0) throw invalid_argument("gen needs --nv and --ne (or --torus R C)");
    for (int i = 0; i < count; ++i) {
        std::uint64_t s = derive_seed(g.seed, static_cast<std::uint64_t>(i));
        Graph graph = random_connected_graph(nv, ne, s);
        std::string name = graph_digest(graph) + ".graph";
        write_text_file((fs::path(out_dir) / name).string(), format_graph(graph));
        std::cout << name << " nv=" << graph.n_vertices() << " ne=" << graph.n_edges()
                  << " seed=" << s << "\n";
    }
    return 0;
}

int cmd_hc(const std::string& graph_path) {
    Graph graph = load_graph_file(graph_path);
    std::uint64_t n_hc = count_hamiltonian_cycles(graph);
    std::uint64_t s0 = closed_string_count(graph);
    std::cout << "N_hc=" << n_hc << " S0=" << s0 << "\n";
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& graph_path, const Schedule& schedule,
              const std::string& trace_out, const std::string& plot_out,
              const std::string& state_out) {
    Graph graph = load_graph_file(graph_path);
    SweepTrace trace;
    if (schedule.direction == SweepDirection::forward_g) {
        if (!state_out.empty()) {
            // Re-run the evolution with a kept final state only when asked.
            GaugeModel model = build_model(graph);
            CycleSpaceBasis basis(graph);
            DiagKernel kernel(model);
            StateVector state = closed_string_condensate(model, basis, g.qubit_cap);
            for (int k = 1; k <= schedule.n_steps(); ++k)
                split_trotter_step(state, kernel, 1.0, schedule.g_at(k), schedule.t_step,
                                   schedule.n_substeps);
            std::ofstream out(state_out, std::ios::binary);
            if (!out) throw resource_error("cannot write " + state_out);
            write_statevector(out, state);
        }
        trace = run_forward_sweep(graph, schedule, g.qubit_cap);
    } else {
        trace = run_reverse_sweep(graph, schedule, g.qubit_cap);
    }
    if (trace_out.empty()) {
        write_trace_csv(std::cout, trace);
    } else {
        std::ofstream out(trace_out, std::ios::binary);
        if (!out) throw resource_error("cannot write " + trace_out);
        write_trace_csv(out, trace);
        std::cerr << trace.rows.size() << " rows -> " << trace_out
                  << " (cumulative error bound " << fmt17(trace.rows.back().err_bound)
                  << ", norm drift " << fmt17(trace.norm_drift) << ")\n";
    }
    if (!plot_out.empty()) emit_trace_plot(trace, plot_out);
    return 0;
}

int cmd_critical(const std::string& trace_path, const CriticalConfig& cfg,
                 const std::string& out_path) {
    std::ifstream in(trace_path);
    if (!in) throw resource_error("cannot open trace " + trace_path);
    SweepTrace trace = read_trace_csv(in);
    CriticalPoints cp = detect_critical(trace, cfg);
    std::string report = critical_report_json(cp, cfg);
    if (out_path.empty())
        std::cout << report;
    else
        write_text_file(out_path, report);
    return 0;
}

int cmd_search(const GlobalOpts& g, const std::string& graph_path, std::uint64_t shots,
               double g_target, const Schedule& base_schedule) {
    Graph graph = load_graph_file(graph_path);
    GaugeModel model = build_model(graph);
    CycleSpaceBasis basis(graph);
    StateVector state = closed_string_condensate(model, basis, g.qubit_cap);
    if (g_target > 0) {
        Schedule sched = base_schedule;
        sched.direction = SweepDirection::forward_g;
        sched.g_max = g_target;
        sched.validate();
        DiagKernel kernel(model);
        for (int k = 1; k <= sched.n_steps(); ++k)
            split_trotter_step(state, kernel, 1.0, sched.g_at(k), sched.t_step, sched.n_substeps);
    }
    HcSearchResult r = hc_search(state, graph, shots, g.seed);
    if (!r.found) {
        std::cout << "not found (" << shots << " shots)\n";
        return 1;
    }
    std::cout << "found mask=0x" << std::hex << r.witness << std::dec << " hits=" << r.hc_hits
              << "/" << shots << " edges:";
    for (int e = 0; e < graph.n_edges(); ++e)
        if (r.witness >> e & 1)
            std::cout << " (" << graph.edge(e).first << "," << graph.edge(e).second << ")";
    std::cout << "\n";
    return 0;
}

int cmd_batch(const GlobalOpts& g, const std::string& spec_path, std::string out_dir,
              bool paper_scale) {
    std::ifstream in(spec_path);
    if (!in) throw resource_error("cannot open spec " + spec_path);
    std::stringstream buf;
    buf << in.rdbuf();
    EnsembleSpec spec = ensemble_spec_from_json(buf.str());
    if (out_dir.empty()) out_dir = g.output_dir;

    if (paper_scale) {
        spec.samples = spec.n_edges.size() == 1 ? 1000 : 200;
        spec.schedule = reference_schedule();
        spec.critical = CriticalConfig{};
        std::cerr << "warning: full-scale ensemble requested (" << spec.samples
                  << " samples per N_e, g_s=0.001, n=100); expect a very long run\n";
    }

    EnsembleResult result = run_ensemble(spec, out_dir, g.threads, &std::cerr, g.qubit_cap);
    std::cout << "journal: " << result.journal_path << " (" << result.records.size()
              << " records, " << result.newly_run << " new, " << result.skipped << " reused)\n";
    if (result.records.empty()) return 0;

    int excluded = 0;
    auto by_nhc = aggregate_mean(result.records, AggKey::n_hc, AggValue::g_c_H, &excluded);
    std::cout << "flagged records excluded from aggregates: " << excluded << "\n";
    std::cout << "mean g_c_H by N_hc:\n";
    for (const AggRow& row : by_nhc) {
        std::cout << "  N_hc=" << row.key << " mean=" << row.mean << " n=" << row.count;
        if (row.has_stderr) std::cout << " stderr=" << row.stderr_mean;
        std::cout << "\n";
    }
    std::vector<std::pair<double, double>> pts;
    for (const AggRow& row : by_nhc) pts.push_back({row.key, row.mean});
    if (pts.size() >= 2) {
        try {
            FitResult fit = fit_sqrt_nhc(pts);
            std::cout << "fit g_c_H = a*sqrt(N_hc) + b: a=" << fmt17(fit.a) << " b=" << fmt17(fit.b)
                      << " rss=" << fmt17(fit.rss) << " n=" << fit.n << "\n";
        } catch (const invalid_argument& e) {
            std::cout << "sqrt(N_hc) fit skipped: " << e.what() << "\n";
        }
    }
    std::set<int> distinct_ne;
    for (const SampleRecord& r : result.records)
        if (!r.flagged()) distinct_ne.insert(r.n_edges);
    if (distinct_ne.size() >= 2) {
        auto by_ne = aggregate_mean(result.records, AggKey::n_edges, AggValue::lambda_c_H);
        std::vector<std::pair<double, double>> lpts;
        for (const AggRow& row : by_ne) lpts.push_back({row.key, row.mean});
        FitResult fit = fit_linear_ne(lpts);
        std::cout << "fit lambda_c_H = a*N_e + b: a=" << fmt17(fit.a) << " b=" << fmt17(fit.b)
                  << " (reference slope 0.1513; reference intercepts 0.007536 / 0.07536)\n";
    }
    auto plots = emit_standard_plots(result.records, out_dir, spec.name);
    for (const std::string& p : plots) std::cout << "plot: " << p << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Z2 lattice gauge theory simulator for Hamiltonian-cycle search"};
    app.set_version_flag("--version", "z2hc 0.1.0");
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for batch mode")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--output-dir", g.output_dir, "default directory for outputs")
        ->capture_default_str();
    app.add_option("--qubit-cap", g.qubit_cap, "refuse statevectors above this qubit count")
        ->capture_default_str()
        ->check(CLI::Range(1, 30));

    auto* gen = app.add_subcommand("gen", "generate graph files");
    gen->fallthrough();
    int nv = 0, ne = -1, count = 1;
    std::vector<int> torus;
    std::string gen_out;
    gen->add_option("--nv", nv, "vertex count");
    gen->add_option("--ne", ne, "edge count");
    gen->add_option("--count", count, "number of graphs")->capture_default_str();
    gen->add_option("--torus", torus, "rows cols: generate the periodic lattice instead")
        ->expected(2);
    gen->add_option("--out", gen_out, "output directory (defaults to --output-dir)");

    auto* hc = app.add_subcommand("hc", "count Hamiltonian cycles and closed strings");
    hc->fallthrough();
    std::string hc_graph;
    hc->add_option("graph", hc_graph, "graph file")->required();

    auto* sweep = app.add_subcommand("sweep", "run an adiabatic sweep, write the trace CSV");
    sweep->fallthrough();
    std::string sweep_graph, direction = "forward", trace_out, plot_out, state_out;
    Schedule sched; // flag defaults: gs=0.001 ts=0.1 n=100 gmax=1
    sweep->add_option("graph", sweep_graph, "graph file")->required();
    sweep->add_option("--gs", sched.g_step, "coupling increment per step")->capture_default_str();
    sweep->add_option("--ts", sched.t_step, "evolution time per step")->capture_default_str();
    sweep->add_option("--n", sched.n_substeps, "Trotter substeps per step")->capture_default_str();
    sweep->add_option("--gmax", sched.g_max, "final coupling (lambda for reverse)")
        ->capture_default_str();
    sweep->add_option("--direction", direction, "forward: ramp g; reverse: ramp lambda")
        ->capture_default_str()
        ->check(CLI::IsMember({"forward", "reverse"}));
    sweep->add_option("--trace-out", trace_out, "trace CSV path (stdout if omitted)");
    sweep->add_option("--plot-out", plot_out, "also render the trace to this SVG");
    sweep->add_option("--state-out", state_out, "dump the final statevector (debug)");

    auto* critical = app.add_subcommand("critical", "extract critical points from a trace CSV");
    critical->fallthrough();
    std::string crit_trace, crit_out;
    CriticalConfig ccfg;
    std::vector<double> crit_range = {ccfg.range_lo, ccfg.range_hi};
    critical->add_option("trace", crit_trace, "trace CSV file")->required();
    critical->add_option("--window", ccfg.window, "smoothing window (odd)")
        ->capture_default_str();
    critical->add_option("--range", crit_range, "search range: lo hi")->expected(2);
    critical->add_option("--edge-exclusion", ccfg.edge_exclusion,
                         "grid points dropped at each trace end")
        ->capture_default_str();
    critical->add_option("--out", crit_out, "report path (stdout if omitted)");

    auto* search = app.add_subcommand("search", "sample the prepared state for a Hamiltonian cycle");
    search->fallthrough();
    std::string search_graph;
    std::uint64_t shots = 10000;
    double search_g = 0.0;
    Schedule search_sched; // reused for the optional pre-search sweep
    search->add_option("graph", search_graph, "graph file")->required();
    search->add_option("--shots", shots, "measurement shots")->capture_default_str();
    search->add_option("--g", search_g, "sweep to this coupling first (0: sample the condensate)")
        ->capture_default_str();
    search->add_option("--gs", search_sched.g_step, "sweep coupling increment")
        ->capture_default_str();
    search->add_option("--ts", search_sched.t_step, "sweep time per step")->capture_default_str();
    search->add_option("--n", search_sched.n_substeps, "sweep substeps per step")
        ->capture_default_str();

    auto* batch = app.add_subcommand("batch", "run an ensemble spec: journal, fits, plots");
    batch->fallthrough();
    std::string spec_path, batch_out;
    bool paper_scale = false;
    batch->add_option("spec", spec_path, "ensemble spec JSON")->required();
    batch->add_option("--out-dir", batch_out, "output directory (defaults to --output-dir)");
    batch->add_flag("--paper-scale", paper_scale,
                    "full-scale sample counts and reference schedule (very slow)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(gen)) return cmd_gen(g, nv, ne, count, torus, gen_out);
        if (app.got_subcommand(hc)) return cmd_hc(hc_graph);
        if (app.got_subcommand(sweep)) {
            sched.direction = direction == "forward" ? SweepDirection::forward_g
                                                     : SweepDirection::reverse_lambda;
            sched.validate();
            return cmd_sweep(g, sweep_graph, sched, trace_out, plot_out, state_out);
        }
        if (app.got_subcommand(critical)) {
            ccfg.range_lo = crit_range[0];
            ccfg.range_hi = crit_range[1];
            return cmd_critical(crit_trace, ccfg, crit_out);
        }
        if (app.got_subcommand(search))
            return cmd_search(g, search_graph, shots, search_g, search_sched);
        if (app.got_subcommand(batch)) return cmd_batch(g, spec_path, batch_out, paper_scale);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
