#pragma once

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "z2hc/adiabatic.hpp"
#include "z2hc/critical.hpp"
#include "z2hc/cycle_space.hpp"
#include "z2hc/errors.hpp"
#include "z2hc/gauge_model.hpp"
#include "z2hc/graph.hpp"
#include "z2hc/rng.hpp"
#include "z2hc/schedule.hpp"
#include "z2hc/stats.hpp"
#include "z2hc/statevector.hpp"
#include "z2hc/svg_plot.hpp"

namespace z2hc {

struct EnsembleSpec {
    std::string name = "ensemble";
    int n_vertices = 9;
    std::vector<int> n_edges = {18};
    int samples = 50; // per n_edges value
    std::uint64_t seed = 1;
    Schedule schedule = desk_schedule();
    CriticalConfig critical{7, 0.05, 0.8, 5};

    void validate() const {
        if (name.empty() || name.find('/') != std::string::npos)
            throw invalid_argument("ensemble name must be a non-empty file-name stem");
        if (n_vertices < 3) throw invalid_argument("ensemble needs n_vertices >= 3");
        if (n_edges.empty()) throw invalid_argument("ensemble needs at least one n_edges value");
        if (samples < 0) throw invalid_argument("samples must be >= 0");
        schedule.validate();
    }
};

inline EnsembleSpec ensemble_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("ensemble spec: ") + e.what());
    }
    EnsembleSpec spec;
    try {
        spec.name = j.value("name", spec.name);
        spec.n_vertices = j.value("n_vertices", spec.n_vertices);
        if (j.contains("n_edges")) {
            spec.n_edges.clear();
            if (j["n_edges"].is_array())
                for (const auto& v : j["n_edges"]) spec.n_edges.push_back(v.get<int>());
            else
                spec.n_edges.push_back(j["n_edges"].get<int>());
        }
        spec.samples = j.value("samples", spec.samples);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("schedule")) {
            const auto& s = j["schedule"];
            std::string dir = s.value("direction", "forward");
            if (dir == "forward")
                spec.schedule.direction = SweepDirection::forward_g;
            else if (dir == "reverse")
                spec.schedule.direction = SweepDirection::reverse_lambda;
            else
                throw invalid_argument("schedule direction must be 'forward' or 'reverse'");
            spec.schedule.g_step = s.value("g_step", spec.schedule.g_step);
            spec.schedule.t_step = s.value("t_step", spec.schedule.t_step);
            spec.schedule.n_substeps = s.value("n_substeps", spec.schedule.n_substeps);
            spec.schedule.g_max = s.value("g_max", spec.schedule.g_max);
        }
        if (j.contains("critical")) {
            const auto& c = j["critical"];
            spec.critical.window = c.value("window", spec.critical.window);
            if (c.contains("range")) {
                spec.critical.range_lo = c["range"][0].get<double>();
                spec.critical.range_hi = c["range"][1].get<double>();
            }
            spec.critical.edge_exclusion = c.value("edge_exclusion", spec.critical.edge_exclusion);
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("ensemble spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline std::string ensemble_spec_to_json(const EnsembleSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["n_vertices"] = spec.n_vertices;
    j["n_edges"] = spec.n_edges;
    j["samples"] = spec.samples;
    j["seed"] = spec.seed;
    j["schedule"] = {{"direction", direction_name(spec.schedule.direction)},
                     {"g_step", spec.schedule.g_step},
                     {"t_step", spec.schedule.t_step},
                     {"n_substeps", spec.schedule.n_substeps},
                     {"g_max", spec.schedule.g_max}};
    j["critical"] = {{"window", spec.critical.window},
                     {"range", {spec.critical.range_lo, spec.critical.range_hi}},
                     {"edge_exclusion", spec.critical.edge_exclusion}};
    return j.dump(2) + "\n";
}

struct SampleRecord {
    std::string graph_digest;
    int n_vertices = 0;
    int n_edges = 0;
    std::int64_t n_hc = 0;
    int min_deg = 0;
    int max_deg = 0;
    double g_c_H = 0.0;
    double g_c_Z = 0.0;
    double lambda_c_H = 0.0;
    double lambda_c_Z = 0.0;
    std::string schedule; // schedule descriptor
    std::uint64_t seed = 0;
    std::vector<std::string> flags;

    bool flagged() const { return !flags.empty(); }
};

inline std::string record_to_json_line(const SampleRecord& r) {
    nlohmann::ordered_json j;
    j["graph_digest"] = r.graph_digest;
    j["n_vertices"] = r.n_vertices;
    j["n_edges"] = r.n_edges;
    j["n_hc"] = r.n_hc;
    j["min_deg"] = r.min_deg;
    j["max_deg"] = r.max_deg;
    j["g_c_H"] = r.g_c_H;
    j["g_c_Z"] = r.g_c_Z;
    j["lambda_c_H"] = r.lambda_c_H;
    j["lambda_c_Z"] = r.lambda_c_Z;
    j["schedule"] = r.schedule;
    j["seed"] = r.seed;
    j["flags"] = r.flags;
    return j.dump();
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
    SampleRecord r;
    r.graph_digest = j.at("graph_digest").get<std::string>();
    r.n_vertices = j.at("n_vertices").get<int>();
    r.n_edges = j.at("n_edges").get<int>();
    r.n_hc = j.at("n_hc").get<std::int64_t>();
    r.min_deg = j.at("min_deg").get<int>();
    r.max_deg = j.at("max_deg").get<int>();
    r.g_c_H = j.at("g_c_H").get<double>();
    r.g_c_Z = j.at("g_c_Z").get<double>();
    r.lambda_c_H = j.at("lambda_c_H").get<double>();
    r.lambda_c_Z = j.at("lambda_c_Z").get<double>();
    r.schedule = j.at("schedule").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("flags"))
        for (const auto& f : j["flags"]) r.flags.push_back(f.get<std::string>());
    return r;
}

inline std::vector<SampleRecord> load_journal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resource_error("cannot open journal " + path);
    std::vector<SampleRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("journal: ") + e.what(), line_no);
        }
    }
    return records;
}

struct EnsembleResult {
    std::vector<SampleRecord> records; // plan order, reused + new
    int newly_run = 0;
    int skipped = 0;
    std::string journal_path;
};

namespace detail {

inline SampleRecord run_one_sample(const Graph& graph, const EnsembleSpec& spec,
                                   std::uint64_t sample_seed, int qubit_cap) {
    SampleRecord r;
    r.graph_digest = graph_digest(graph);
    r.n_vertices = graph.n_vertices();
    r.n_edges = graph.n_edges();
    DegreeStats ds = degree_stats(graph);
    r.min_deg = ds.min_deg;
    r.max_deg = ds.max_deg;
    r.schedule = spec.schedule.descriptor();
    r.seed = sample_seed;
    try {
        r.n_hc = static_cast<std::int64_t>(count_hamiltonian_cycles(graph));
        SweepTrace trace = spec.schedule.direction == SweepDirection::forward_g
                               ? run_forward_sweep(graph, spec.schedule, qubit_cap)
                               : run_reverse_sweep(graph, spec.schedule, qubit_cap);
        CriticalPoints cp = detect_critical(trace, spec.critical);
        r.g_c_H = cp.g_c_H;
        r.g_c_Z = cp.g_c_Z;
        r.lambda_c_H = cp.lambda_c_H;
        r.lambda_c_Z = cp.lambda_c_Z;
        r.flags = cp.flags;
    } catch (const std::exception& e) {
        r.flags.push_back(std::string("error:") + e.what());
    }
    return r;
}

} // namespace detail

// Runs every (n_edges value x sample index) job not already present in the
// journal. Completed (graph digest, schedule descriptor) pairs are skipped,
// so reruns are idempotent and interrupted batches resume. Records are
// appended in plan order regardless of worker count, keeping the journal
// byte-deterministic. Per-sample failures become flagged records; the batch
// itself never aborts on them.
inline EnsembleResult run_ensemble(const EnsembleSpec& spec, const std::string& out_dir,
                                   int threads = 1, std::ostream* log = nullptr,
                                   int qubit_cap = kDefaultQubitCap) {
    spec.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::string journal_path = (fs::path(out_dir) / (spec.name + ".jsonl")).string();

    std::map<std::string, SampleRecord> done;
    if (fs::exists(journal_path))
        for (SampleRecord& r : load_journal(journal_path))
            done[r.graph_digest + "|" + r.schedule] = std::move(r);

    struct Job {
        Graph graph;
        std::uint64_t sample_seed;
    };
    std::vector<Job> plan;
    std::vector<const SampleRecord*> reused; // per plan slot: existing record or null
    std::string sched_desc = spec.schedule.descriptor();
    std::uint64_t plan_index = 0;
    double advisory = 0.0;
    for (int ne : spec.n_edges) {
        for (int i = 0; i < spec.samples; ++i, ++plan_index) {
            std::uint64_t sample_seed = derive_seed(spec.seed, plan_index);
            Graph graph = random_connected_graph(spec.n_vertices, ne, sample_seed);
            std::string key = graph_digest(graph) + "|" + sched_desc;
            auto it = done.find(key);
            reused.push_back(it == done.end() ? nullptr : &it->second);
            if (it == done.end()) advisory += complexity_estimate(graph, 0.3, 0.01);
            plan.push_back({std::move(graph), sample_seed});
        }
    }

    // Persist every planned graph so records stay re-analyzable.
    for (const Job& job : plan) {
        fs::path gpath = fs::path(out_dir) / (graph_digest(job.graph) + ".graph");
        if (!fs::exists(gpath)) {
            std::ofstream gout(gpath, std::ios::binary);
            gout << format_graph(job.graph);
        }
    }

    std::size_t n_jobs = 0;
    for (const SampleRecord* r : reused)
        if (!r) ++n_jobs;
    if (log)
        *log << "ensemble " << spec.name << ": " << plan.size() << " planned, "
             << (plan.size() - n_jobs) << " already journaled, " << n_jobs
             << " to run (cost figure of merit " << detail::fmt6(advisory) << ")\n";

    EnsembleResult result;
    result.journal_path = journal_path;
    result.skipped = static_cast<int>(plan.size() - n_jobs);
    result.records.resize(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        if (reused[i]) result.records[i] = *reused[i];

    std::ofstream journal(journal_path, std::ios::binary | std::ios::app);
    if (!journal) throw resource_error("cannot append to journal " + journal_path);

    threads = std::max(1, threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < plan.size(); ++i) {
            if (reused[i]) continue;
            result.records[i] =
                detail::run_one_sample(plan[i].graph, spec, plan[i].sample_seed, qubit_cap);
            journal << record_to_json_line(result.records[i]) << '\n';
            journal.flush();
            ++result.newly_run;
            if (log)
                *log << "  [" << (i + 1) << "/" << plan.size() << "] "
                     << result.records[i].graph_digest << " n_hc=" << result.records[i].n_hc
                     << " g_c_H=" << detail::fmt6(result.records[i].g_c_H) << '\n';
        }
        return result;
    }

    // Worker pool; the journal is written by this thread in plan order as the
    // leading contiguous block of results completes.
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < plan.size(); ++i)
        if (!reused[i]) todo.push_back(i);
    std::atomic<std::size_t> next{0};
    std::vector<char> ready(plan.size(), 0);
    std::mutex mx;
    std::condition_variable cv;
    auto worker = [&] {
        for (;;) {
            std::size_t t = next.fetch_add(1);
            if (t >= todo.size()) return;
            std::size_t i = todo[t];
            SampleRecord r =
                detail::run_one_sample(plan[i].graph, spec, plan[i].sample_seed, qubit_cap);
            {
                std::lock_guard<std::mutex> lock(mx);
                result.records[i] = std::move(r);
                ready[i] = 1;
            }
            cv.notify_one();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);

    std::size_t written = 0;
    {
        std::unique_lock<std::mutex> lock(mx);
        while (written < plan.size()) {
            if (reused[written]) {
                ++written;
                continue;
            }
            cv.wait(lock, [&] { return ready[written] != 0; });
            journal << record_to_json_line(result.records[written]) << '\n';
            journal.flush();
            ++result.newly_run;
            if (log)
                *log << "  [" << (written + 1) << "/" << plan.size() << "] "
                     << result.records[written].graph_digest
                     << " n_hc=" << result.records[written].n_hc
                     << " g_c_H=" << detail::fmt6(result.records[written].g_c_H) << '\n';
            ++written;
        }
    }
    for (auto& t : pool) t.join();
    return result;
}

enum class AggKey { n_hc, n_edges, min_deg, max_deg };
enum class AggValue { g_c_H, g_c_Z, lambda_c_H, lambda_c_Z };

struct AggRow {
    double key = 0.0;
    double mean = 0.0;
    int count = 0;
    double stderr_mean = 0.0; // meaningful only when has_stderr
    bool has_stderr = false;
};

inline double record_key(const SampleRecord& r, AggKey key) {
    switch (key) {
        case AggKey::n_hc: return static_cast<double>(r.n_hc);
        case AggKey::n_edges: return r.n_edges;
        case AggKey::min_deg: return r.min_deg;
        default: return r.max_deg;
    }
}

inline double record_value(const SampleRecord& r, AggValue value) {
    switch (value) {
        case AggValue::g_c_H: return r.g_c_H;
        case AggValue::g_c_Z: return r.g_c_Z;
        case AggValue::lambda_c_H: return r.lambda_c_H;
        default: return r.lambda_c_Z;
    }
}

// Group-by mean with standard error. Flagged records are excluded from every
// group and reported through excluded_count so totals still reconcile.
inline std::vector<AggRow> aggregate_mean(const std::vector<SampleRecord>& records, AggKey key,
                                          AggValue value, int* excluded_count = nullptr) {
    if (records.empty()) throw invalid_argument("aggregate over empty record set");
    std::map<double, std::vector<double>> groups;
    int excluded = 0;
    for (const SampleRecord& r : records) {
        if (r.flagged()) {
            ++excluded;
            continue;
        }
        groups[record_key(r, key)].push_back(record_value(r, value));
    }
    if (excluded_count) *excluded_count = excluded;
    std::vector<AggRow> rows;
    for (auto& [k, vals] : groups) {
        AggRow row;
        row.key = k;
        row.mean = mean_of(vals);
        row.count = static_cast<int>(vals.size());
        if (vals.size() >= 2) {
            row.stderr_mean = stderr_of(vals);
            row.has_stderr = true;
        }
        rows.push_back(row);
    }
    return rows;
}

enum class FitModel { sqrt_nhc, linear_ne };

struct FitResult {
    FitModel model = FitModel::sqrt_nhc;
    double a = 0.0; // coefficient of the regressor (A, or the N_e slope)
    double b = 0.0; // intercept
    double rss = 0.0;
    int n = 0;
};

// Least squares of g_c against sqrt(N_hc): g_c = a*sqrt(N_hc) + b.
inline FitResult fit_sqrt_nhc(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw invalid_argument("fit needs at least 2 points");
    std::vector<double> x, y;
    for (auto [nhc, gc] : points) {
        if (nhc < 0) throw invalid_argument("negative N_hc");
        x.push_back(std::sqrt(nhc));
        y.push_back(gc);
    }
    OlsFit f = ols_fit(x, y);
    return {FitModel::sqrt_nhc, f.slope, f.intercept, f.rss, f.n};
}

// Least squares of lambda_c against N_e: lambda_c = a*N_e + b.
inline FitResult fit_linear_ne(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw invalid_argument("fit needs at least 2 points");
    std::vector<double> x, y;
    for (auto [ne, lc] : points) {
        x.push_back(ne);
        y.push_back(lc);
    }
    OlsFit f = ols_fit(x, y);
    return {FitModel::linear_ne, f.slope, f.intercept, f.rss, f.n};
}

inline void emit_trace_plot(const SweepTrace& trace, const std::string& svg_path) {
    PlotSpec spec;
    spec.title = "Sweep observables (" + trace.graph_digest.substr(0, 8) + ")";
    spec.x_label = trace.direction == SweepDirection::forward_g ? "g" : "lambda";
    spec.y_label = "expectation value";
    Series e{"energy", {}, {}, true}, z{"z", {}, {}, true}, x{"x", {}, {}, true};
    for (const TraceRow& r : trace.rows) {
        e.x.push_back(r.g);
        e.y.push_back(r.energy);
        z.x.push_back(r.g);
        z.y.push_back(r.z);
        x.x.push_back(r.g);
        x.y.push_back(r.x);
    }
    spec.series = {e, z, x};
    write_plot(svg_path, spec);
}

// The standard figure set for a finished ensemble. Single-n_edges runs get 6
// figures; ensembles spanning several n_edges add the two N_e-trend figures.
// Returns the SVG paths written.
inline std::vector<std::string> emit_standard_plots(const std::vector<SampleRecord>& records,
                                                    const std::string& out_dir,
                                                    const std::string& stem) {
    namespace fs = std::filesystem;
    std::vector<const SampleRecord*> ok;
    for (const SampleRecord& r : records)
        if (!r.flagged()) ok.push_back(&r);
    if (ok.empty()) return {};
    std::vector<std::string> paths;
    auto out = [&](const std::string& name) {
        std::string p = (fs::path(out_dir) / (stem + "_" + name + ".svg")).string();
        paths.push_back(p);
        return p;
    };

    {
        std::map<std::int64_t, int> hist;
        for (auto* r : ok) ++hist[r->n_hc];
        Series s{"count", {}, {}, false};
        for (auto [nhc, c] : hist) {
            s.x.push_back(static_cast<double>(nhc));
            s.y.push_back(c);
        }
        PlotSpec p{"Distribution of N_hc", "N_hc", "samples", {s}};
        write_plot(out("nhc_hist"), p);
    }

    auto scatter_with_means = [&](AggValue val, const char* vname, AggKey key, const char* kname,
                                  const std::string& fname) {
        Series pts{"samples", {}, {}, false};
        for (auto* r : ok) {
            pts.x.push_back(record_key(*r, key));
            pts.y.push_back(record_value(*r, val));
        }
        Series means{"group mean", {}, {}, true};
        for (const AggRow& row : aggregate_mean(records, key, val)) {
            means.x.push_back(row.key);
            means.y.push_back(row.mean);
        }
        PlotSpec p{std::string(vname) + " vs " + kname, kname, vname, {pts, means}};
        write_plot(out(fname), p);
    };
    scatter_with_means(AggValue::g_c_H, "g_c_H", AggKey::n_hc, "N_hc", "gcH_vs_nhc");
    scatter_with_means(AggValue::g_c_Z, "g_c_Z", AggKey::n_hc, "N_hc", "gcZ_vs_nhc");
    scatter_with_means(AggValue::g_c_H, "g_c_H", AggKey::max_deg, "max degree", "gcH_vs_maxdeg");
    scatter_with_means(AggValue::g_c_H, "g_c_H", AggKey::min_deg, "min degree", "gcH_vs_mindeg");

    {
        std::vector<std::pair<double, double>> pts;
        for (const AggRow& row : aggregate_mean(records, AggKey::n_hc, AggValue::g_c_H))
            pts.push_back({row.key, row.mean});
        Series means{"mean g_c_H", {}, {}, false};
        for (auto [k, v] : pts) {
            means.x.push_back(k);
            means.y.push_back(v);
        }
        PlotSpec p{"g_c_H vs N_hc with sqrt fit", "N_hc", "g_c_H", {means}};
        if (pts.size() >= 2) {
            try {
                FitResult fit = fit_sqrt_nhc(pts);
                Series curve{"fit a*sqrt(N_hc)+b", {}, {}, true};
                double kmax = pts.back().first;
                for (int i = 0; i <= 100; ++i) {
                    double k = kmax * i / 100.0;
                    curve.x.push_back(k);
                    curve.y.push_back(fit.a * std::sqrt(k) + fit.b);
                }
                p.series.push_back(curve);
            } catch (const invalid_argument&) {
                // degenerate regressor: plot the means alone
            }
        }
        write_plot(out("gcH_sqrtfit"), p);
    }

    std::set<int> distinct_ne;
    for (auto* r : ok) distinct_ne.insert(r->n_edges);
    if (distinct_ne.size() >= 2) {
        {
            std::vector<std::pair<double, double>> pts;
            Series means{"mean lambda_c_H", {}, {}, false};
            for (const AggRow& row : aggregate_mean(records, AggKey::n_edges, AggValue::lambda_c_H)) {
                pts.push_back({row.key, row.mean});
                means.x.push_back(row.key);
                means.y.push_back(row.mean);
            }
            PlotSpec p{"lambda_c_H vs N_e with linear fit", "N_e", "lambda_c_H", {means}};
            try {
                FitResult fit = fit_linear_ne(pts);
                Series lineS{"fit a*N_e+b", {}, {}, true};
                for (auto [k, v] : pts) {
                    (void)v;
                    lineS.x.push_back(k);
                    lineS.y.push_back(fit.a * k + fit.b);
                }
                p.series.push_back(lineS);
            } catch (const invalid_argument&) {
            }
            write_plot(out("lambdaH_vs_ne"), p);
        }
        {
            std::map<int, std::vector<double>> by_ne;
            for (auto* r : ok) by_ne[r->n_edges].push_back(static_cast<double>(r->n_hc));
            Series s{"mean N_hc", {}, {}, true};
            for (auto& [ne, vals] : by_ne) {
                s.x.push_back(ne);
                s.y.push_back(mean_of(vals));
            }
            PlotSpec p{"mean N_hc vs N_e", "N_e", "mean N_hc", {s}};
            write_plot(out("nhc_vs_ne"), p);
        }
    }
    return paths;
}

} // namespace z2hc
