// snmcache: command-line front end for the shot-noise cache toolkit.
//
// Subcommands: generate, simulate, solve, fit, shuffle-study, sweep, and the
// figure presets fig6 / fig7 / fig8. Every run writes its artifacts plus a
// manifest.json into the output directory; failures produce a machine-readable
// error JSON and a non-zero exit code (2: configuration, 3: numerical).
//
// Defaults are "desk scale": horizon 60 days, gamma 1e4 contents/day for the
// fig6/fig8 presets and 1e5 for fig7. The --scale divisor shrinks gamma and
// every capacity jointly; the small-cache law p_hit ~ C/(gamma L) * E[V^2]/E[V]^2
// depends on C/gamma only, so scaled runs trace the same curves faster.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "snm/che.hpp"
#include "snm/fit.hpp"
#include "snm/generate.hpp"
#include "snm/network.hpp"
#include "snm/profile.hpp"
#include "snm/sim.hpp"
#include "snm/svg.hpp"
#include "snm/topology.hpp"
#include "snm/trace.hpp"
#include "snm/traffic.hpp"
#include "snm/volume.hpp"
#include "snm/warp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace snm;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small utilities

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string default_out_root() {
    if (const char* env = std::getenv("SNMCACHE_OUT")) return env;
    return ".";
}

// Fixed-size worker pool; results are collected by index so output order (and
// therefore every CSV byte) is independent of scheduling.
template <typename F>
auto parallel_map(std::size_t n, F&& f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> results(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = f(i);
                } catch (...) {
                    std::lock_guard lk(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

// ---------------------------------------------------------------------------
// Shared CLI surface

struct Args {
    std::string kind;
    std::string config_path;
    std::string topology_path;
    std::string trace_path;
    std::string out_dir;
    std::string format = "csv";
    std::string capacities;        // comma-separated override
    std::string profile = "exponential";  // fit: profile shape to impose
    std::uint64_t seed = 1;
    int reps = 0;                  // 0: subcommand default
    double scale = 1.0;
    std::int64_t capacity = 1000;  // simulate without a topology
    double target = 0.3;           // shuffle-study target hit ratio
    double horizon = 0.0;          // fit: override window length

    bool want_csv() const { return format == "csv" || format == "both"; }
    bool want_svg() const { return format == "svg" || format == "both"; }
    int reps_or(int dflt) const { return reps > 0 ? reps : dflt; }
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--config", a.config_path, "Traffic config JSON");
    sub->add_option("--topology", a.topology_path, "Cache topology JSON");
    sub->add_option("--out", a.out_dir, "Output directory (default: $SNMCACHE_OUT/<kind>)");
    sub->add_option("--seed", a.seed, "Base RNG seed")->capture_default_str();
    sub->add_option("--reps", a.reps, "Simulation replications (0: preset default)");
    sub->add_option("--scale", a.scale,
                    "Desk-scale divisor applied jointly to gamma and capacities")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", a.format, "Output artifacts")
        ->check(CLI::IsMember({"csv", "svg", "both"}))
        ->capture_default_str();
}

fs::path prepare_out_dir(Args& a) {
    if (a.out_dir.empty()) a.out_dir = default_out_root() + "/" + a.kind;
    fs::create_directories(a.out_dir);
    return a.out_dir;
}

TrafficConfig load_config(const Args& a, bool required = true) {
    if (a.config_path.empty()) {
        if (required) throw ConfigError("--config is required for this subcommand");
        return {};
    }
    try {
        return TrafficConfig::from_json_file(a.config_path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
}

std::optional<CacheTopology> load_topology(const Args& a) {
    if (a.topology_path.empty()) return std::nullopt;
    try {
        return CacheTopology::from_json_file(a.topology_path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad topology: ") + e.what());
    }
}

std::int64_t scale_capacity(double c, double scale) {
    return std::max<std::int64_t>(1, std::llround(c / scale));
}

void apply_scale(TrafficConfig& cfg, double scale) { cfg.gamma /= scale; }

CacheTopology apply_scale(const CacheTopology& topo, double scale) {
    if (scale == 1.0) return topo;
    std::unordered_map<std::string, std::int64_t> caps;
    for (const auto& n : topo.nodes())
        caps[n.id] = n.capacity > 0 ? scale_capacity(static_cast<double>(n.capacity), scale) : 0;
    return topo.with_capacities(caps);
}

std::vector<double> capacity_grid(const Args& a, std::vector<double> dflt) {
    std::vector<double> caps;
    if (!a.capacities.empty()) {
        std::stringstream ss(a.capacities);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            caps.push_back(std::stod(tok));
        }
        if (caps.empty()) throw ConfigError("--capacities: no values parsed");
    } else {
        caps = std::move(dflt);
    }
    for (double& c : caps) c = static_cast<double>(scale_capacity(c, a.scale));
    return caps;
}

std::vector<double> doubling_grid(double lo, double hi) {
    std::vector<double> caps;
    for (double c = lo; c <= hi * 1.0001; c *= 2.0) caps.push_back(c);
    return caps;
}

// ---------------------------------------------------------------------------
// Manifest and error reporting

class Manifest {
  public:
    Manifest(const Args& a, const fs::path& dir) : dir_(dir) {
        j_["schema_version"] = 1;
        j_["tool"] = {{"name", "snmcache"}, {"version", kToolVersion}};
        j_["kind"] = a.kind;
        j_["seed"] = a.seed;
        j_["reps"] = a.reps;
        j_["scale"] = a.scale;
        j_["format"] = a.format;
        json inputs = json::object();
        if (!a.config_path.empty()) inputs["config"] = a.config_path;
        if (!a.topology_path.empty()) inputs["topology"] = a.topology_path;
        if (!a.trace_path.empty()) inputs["trace"] = a.trace_path;
        j_["inputs"] = inputs;
        j_["outputs"] = json::array();
    }

    void set(const std::string& key, json value) { j_[key] = std::move(value); }
    void set_config(const TrafficConfig& cfg) { j_["config"] = json::parse(cfg.to_json_string()); }
    void set_topology(const CacheTopology& t) {
        j_["topology"] = json::parse(t.to_json_string());
    }
    void add_output(const std::string& name) { j_["outputs"].push_back(name); }

    void write() const { write_text(dir_ / "manifest.json", j_.dump(2) + "\n"); }

  private:
    fs::path dir_;
    json j_;
};

void emit_error(const fs::path* dir, const std::string& category, const std::string& message,
                int code) {
    json j{{"schema_version", 1},
           {"error", {{"category", category}, {"message", message}}},
           {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    if (dir) {
        try {
            fs::create_directories(*dir);
            write_text(*dir / "error.json", j.dump(2) + "\n");
        } catch (...) {
        }
    }
}

// ---------------------------------------------------------------------------
// Chart helpers

void write_phit_chart(const fs::path& path, const std::string& title,
                      std::vector<SvgSeries> series) {
    SvgChart chart;
    chart.title = title;
    chart.x_label = "cache capacity [contents]";
    chart.y_label = "hit probability";
    chart.log_x = true;
    chart.series = std::move(series);
    chart.write(path.string());
}

// ---------------------------------------------------------------------------
// Preset traffic configs

TrafficConfig fig6_config(double scale, std::uint64_t seed, double beta, double L,
                          ProfileKind kind = ProfileKind::Uniform) {
    TrafficConfig cfg;
    cfg.gamma = 1e4 / scale;
    cfg.horizon = 60.0;
    cfg.seed = seed;
    cfg.classes.push_back({PopularityProfile::for_life_span(kind, L),
                           VolumeDistribution::pareto_with_mean(beta, 3.0), 1.0, "c0", true});
    cfg.ingress = IngressModel::single();
    return cfg;
}

// Six-class VoD-style mixes (scenarios 1-3): one large stationary class of
// unpopular contents plus popular classes of increasing life-span.
TrafficConfig table5_scenario(int scenario, double scale, std::uint64_t seed) {
    const double L[6] = {500.0, 2.0, 7.0, 30.0, 100.0, 1000.0};
    const double EV[6] = {1.61, 83.33, 75.0, 66.66, 50.0, 50.0};
    const double W[3][6] = {{0.85, 0.00, 0.00, 0.02, 0.02, 0.11},
                            {0.85, 0.00, 0.02, 0.02, 0.02, 0.09},
                            {0.85, 0.01, 0.02, 0.02, 0.02, 0.08}};
    TrafficConfig cfg;
    cfg.gamma = 1e5 / scale;
    cfg.horizon = 60.0;
    cfg.seed = seed;
    for (int k = 0; k < 6; ++k) {
        const auto prof = PopularityProfile::for_life_span(ProfileKind::Exponential, L[k]);
        const auto vol = (k == 0)
                             ? VolumeDistribution::truncated_pareto_with_mean(2.5, EV[k], 10.0)
                             : VolumeDistribution::pareto_with_mean(2.5, EV[k]);
        cfg.classes.push_back({prof, vol, W[scenario - 1][k], "class" + std::to_string(k), true});
    }
    cfg.ingress = IngressModel::single();
    return cfg;
}

TrafficConfig fig8_config(bool localized, double scale, std::uint64_t seed) {
    TrafficConfig cfg;
    cfg.gamma = 1e4 / scale;
    cfg.horizon = 60.0;
    cfg.seed = seed;
    cfg.classes.push_back(
        {PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0),
         VolumeDistribution::pareto_with_mean(2.5, 3.0), 1.0, "c0", true});
    cfg.ingress = localized ? IngressModel::fully_localized() : IngressModel::unlocalized();
    return cfg;
}

CacheTopology star_topology(int n_leaves, std::int64_t leaf_cap, std::int64_t root_cap) {
    std::vector<CacheNode> nodes;
    CacheNode root{"root", root_cap, {}};
    for (int i = 0; i < n_leaves; ++i) {
        const std::string id = "leaf" + std::to_string(i);
        root.children.push_back(id);
        nodes.push_back({id, leaf_cap, {}});
    }
    nodes.push_back(root);
    return CacheTopology(std::move(nodes), "root");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_generate(Args& a) {
    auto cfg = load_config(a);
    apply_scale(cfg, a.scale);
    cfg.seed = a.seed;
    auto topo_opt = load_topology(a);
    CacheTopology topo =
        topo_opt ? apply_scale(*topo_opt, a.scale) : CacheTopology::single(0);
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    manifest.set_config(cfg);
    manifest.set_topology(topo);

    const RequestTrace trace = generate(cfg, topo);
    trace.write_csv((dir / "trace.csv.gz").string());
    trace.write_contents_csv((dir / "contents.csv").string());
    manifest.add_output("trace.csv.gz");
    manifest.add_output("contents.csv");
    manifest.set("summary", json{{"requests", trace.requests.size()},
                                 {"measured_requests", trace.measured_count()},
                                 {"contents", trace.contents.size()}});
    manifest.write();
    return 0;
}

void write_sim_csv(const fs::path& path, const SimResult& res, const CacheTopology& topo) {
    std::string csv = "node_id,capacity,requests,hits,hit_ratio\n";
    for (const auto& [id, counts] : res.per_node) {
        csv += id + "," + std::to_string(topo.node(id).capacity) + "," +
               std::to_string(counts.requests()) + "," + std::to_string(counts.hits) + "," +
               fmt(counts.hit_ratio()) + "\n";
    }
    write_text(path, csv);
}

int cmd_simulate(Args& a) {
    if (a.trace_path.empty() && a.config_path.empty())
        throw ConfigError("simulate needs --trace or --config");
    auto topo_opt = load_topology(a);
    CacheTopology topo = topo_opt ? apply_scale(*topo_opt, a.scale)
                                  : CacheTopology::single(scale_capacity(
                                        static_cast<double>(a.capacity), a.scale));
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    manifest.set_topology(topo);

    RequestTrace trace;
    TrafficConfig cfg;
    const bool from_config = a.trace_path.empty();
    if (from_config) {
        cfg = load_config(a);
        apply_scale(cfg, a.scale);
        cfg.seed = a.seed;
        manifest.set_config(cfg);
        trace = generate(cfg, topo);
    } else {
        try {
            trace = RequestTrace::read_csv(a.trace_path);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad trace: ") + e.what());
        }
    }

    const bool tree = topo.nodes().size() > 1;
    const std::int64_t single_cap = topo.node(topo.root()).capacity;
    const SimResult res =
        tree ? simulate_tree(trace, topo) : simulate_single(trace, single_cap);
    write_sim_csv(dir / "results.csv", res, topo);
    manifest.add_output("results.csv");
    json summary{{"global_hit_ratio", res.global_hit_ratio},
                 {"measured_requests", res.measured_requests}};

    const int reps = a.reps_or(1);
    if (from_config && reps > 1) {
        const auto ratios = parallel_map(static_cast<std::size_t>(reps), [&](std::size_t i) {
            TrafficConfig c = cfg;
            c.seed = a.seed + i;
            const auto t = generate(c, topo);
            return (tree ? simulate_tree(t, topo) : simulate_single(t, single_cap))
                .global_hit_ratio;
        });
        const auto ci = student_t_ci(ratios);
        std::string csv = "metric,mean,ci_half_width,replications\n";
        csv += "global_hit_ratio," + fmt(ci.mean) + "," + fmt(ci.ci_half_width) + "," +
               std::to_string(reps) + "\n";
        write_text(dir / "summary.csv", csv);
        manifest.add_output("summary.csv");
        summary["mean"] = ci.mean;
        summary["ci_half_width"] = ci.ci_half_width;
    }
    manifest.set("summary", summary);
    manifest.write();
    return 0;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "capacity,T_C_days,p_hit,p_hit_small_approx,p_hit_large_asymptote\n";
    for (const auto& r : rows)
        csv += fmt(r.capacity) + "," + fmt(r.T_C) + "," + fmt(r.p_hit) + "," +
               fmt(r.p_hit_small_approx) + "," + fmt(r.p_hit_large_asymptote) + "\n";
    return csv;
}

int cmd_solve(Args& a) {
    auto cfg = load_config(a);
    apply_scale(cfg, a.scale);
    const auto caps = capacity_grid(a, doubling_grid(100.0, 51200.0));
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    manifest.set_config(cfg);
    manifest.set("capacities", caps);

    const CheSolver solver(cfg);
    const auto rows = phit_vs_capacity_curve(solver, caps);
    if (a.want_csv()) {
        write_text(dir / "sweep.csv", sweep_csv(rows));
        manifest.add_output("sweep.csv");
    }
    if (a.want_svg()) {
        SvgSeries model{"model", {}, {}}, approx{"small-cache approx", {}, {}};
        for (const auto& r : rows) {
            model.x.push_back(r.capacity);
            model.y.push_back(r.p_hit);
            if (std::isfinite(r.p_hit_small_approx) && r.p_hit_small_approx <= 1.0) {
                approx.x.push_back(r.capacity);
                approx.y.push_back(r.p_hit_small_approx);
            }
        }
        write_phit_chart(dir / "sweep.svg", "hit probability vs capacity", {model, approx});
        manifest.add_output("sweep.svg");
    }
    manifest.write();
    return 0;
}

int cmd_fit(Args& a) {
    if (a.trace_path.empty()) throw ConfigError("fit needs --trace");
    RequestTrace trace;
    try {
        trace = RequestTrace::read_csv(a.trace_path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad trace: ") + e.what());
    }
    ProfileKind kind;
    try {
        kind = profile_kind_from_string(a.profile);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    double horizon = a.horizon > 0.0 ? a.horizon : trace.meta.horizon;
    if (horizon <= 0.0) {
        for (const auto& r : trace.requests) horizon = std::max(horizon, r.time);
    }
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);

    const auto stats = estimate_stats(trace);
    const auto partition = classify(stats);
    write_classification_csv(partition, (dir / "classification.csv").string());
    manifest.add_output("classification.csv");

    const TrafficConfig fitted = fit_config(trace, kind, horizon);
    write_text(dir / "fitted_config.json", fitted.to_json_string() + "\n");
    manifest.add_output("fitted_config.json");
    manifest.set("summary", json{{"horizon_days", horizon},
                                 {"gamma", fitted.gamma},
                                 {"classes", fitted.classes.size()}});
    manifest.write();
    return 0;
}

int cmd_shuffle_study(Args& a) {
    TrafficConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_config(a);
        apply_scale(cfg, a.scale);
    } else {
        cfg = fig6_config(a.scale, a.seed, 2.5, 7.0, ProfileKind::Exponential);
    }
    cfg.seed = a.seed;
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    manifest.set_config(cfg);

    const RequestTrace original = generate(cfg, CacheTopology::single(0));
    const std::vector<std::size_t> slice_counts{1, 4, 16, 64, 256};
    struct Row {
        std::string label;
        std::size_t k;
        double slice_days;
        std::int64_t required;
        double hit_ratio;
    };
    std::vector<Row> rows;
    {
        const auto r = required_cache_size(original, a.target);
        rows.push_back({"original", 0, 0.0, r.capacity, r.hit_ratio});
    }
    const auto shuffled = parallel_map(slice_counts.size(), [&](std::size_t i) {
        const auto t = shuffle_k_slices(original, slice_counts[i], a.seed + 1000 + i);
        return required_cache_size(t, a.target);
    });
    for (std::size_t i = 0; i < slice_counts.size(); ++i) {
        const std::size_t k = slice_counts[i];
        rows.push_back({"shuffled", k, cfg.horizon / static_cast<double>(k),
                        shuffled[i].capacity, shuffled[i].hit_ratio});
    }
    if (a.want_csv()) {
        std::string csv = "variant,slices,approx_slice_days,required_capacity,hit_ratio\n";
        for (const auto& r : rows)
            csv += r.label + "," + std::to_string(r.k) + "," + fmt(r.slice_days) + "," +
                   std::to_string(r.required) + "," + fmt(r.hit_ratio) + "\n";
        write_text(dir / "shuffle.csv", csv);
        manifest.add_output("shuffle.csv");
    }
    if (a.want_svg()) {
        SvgChart chart;
        chart.title = "required cache size vs shuffle granularity";
        chart.x_label = "slice count";
        chart.y_label = "required capacity [contents]";
        chart.log_x = true;
        chart.log_y = true;
        SvgSeries s{"shuffled", {}, {}, true};
        for (const auto& r : rows)
            if (r.k > 0) {
                s.x.push_back(static_cast<double>(r.k));
                s.y.push_back(static_cast<double>(r.required));
            }
        chart.series.push_back(std::move(s));
        chart.write((dir / "shuffle.svg").string());
        manifest.add_output("shuffle.svg");
    }
    manifest.set("summary", json{{"target_hit_ratio", a.target},
                                 {"original_required", rows.front().required}});
    manifest.write();
    return 0;
}

// Model curve plus replicated simulation at every capacity; capacity points
// and replications run on the worker pool.
int cmd_sweep(Args& a) {
    auto cfg = load_config(a);
    apply_scale(cfg, a.scale);
    cfg.seed = a.seed;
    const auto caps = capacity_grid(a, doubling_grid(100.0, 51200.0));
    const int reps = a.reps_or(3);
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    manifest.set_config(cfg);
    manifest.set("capacities", caps);

    const CheSolver solver(cfg);
    const auto model = phit_vs_capacity_curve(solver, caps);

    // Traces are shared across capacity points: one per replication.
    const auto traces = parallel_map(static_cast<std::size_t>(reps), [&](std::size_t i) {
        TrafficConfig c = cfg;
        c.seed = a.seed + i;
        return generate(c, CacheTopology::single(0));
    });
    const auto sims = parallel_map(caps.size() * static_cast<std::size_t>(reps),
                                   [&](std::size_t idx) {
                                       const std::size_t ci = idx / reps, ri = idx % reps;
                                       return simulate_single(traces[ri],
                                                              static_cast<std::int64_t>(caps[ci]))
                                           .global_hit_ratio;
                                   });
    if (a.want_csv()) {
        write_text(dir / "model.csv", sweep_csv(model));
        manifest.add_output("model.csv");
        std::string csv = "capacity,p_hit_model,p_hit_sim,ci,replications\n";
        for (std::size_t ci = 0; ci < caps.size(); ++ci) {
            std::vector<double> vals(sims.begin() + ci * reps, sims.begin() + (ci + 1) * reps);
            const auto stats = student_t_ci(vals);
            csv += fmt(caps[ci]) + "," + fmt(model[ci].p_hit) + "," + fmt(stats.mean) + "," +
                   fmt(stats.ci_half_width) + "," + std::to_string(reps) + "\n";
        }
        write_text(dir / "sim.csv", csv);
        manifest.add_output("sim.csv");
    }
    if (a.want_svg()) {
        SvgSeries m{"model", {}, {}}, s{"simulation", {}, {}, true};
        for (std::size_t ci = 0; ci < caps.size(); ++ci) {
            m.x.push_back(caps[ci]);
            m.y.push_back(model[ci].p_hit);
            std::vector<double> vals(sims.begin() + ci * reps, sims.begin() + (ci + 1) * reps);
            s.x.push_back(caps[ci]);
            s.y.push_back(student_t_ci(vals).mean);
        }
        write_phit_chart(dir / "sweep.svg", "model vs simulation", {m, s});
        manifest.add_output("sweep.svg");
    }
    manifest.write();
    return 0;
}

int cmd_fig6(Args& a) {
    const int reps = a.reps_or(3);
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    const auto caps = capacity_grid(a, doubling_grid(100.0, 51200.0));
    manifest.set("capacities", caps);

    // Panel (a): Uniform L = 7 d, Pareto beta = 3, E[V] = 3; model + simulation.
    TrafficConfig cfg_a = fig6_config(a.scale, a.seed, 3.0, 7.0);
    manifest.set_config(cfg_a);
    const CheSolver solver_a(cfg_a);
    const auto model_a = phit_vs_capacity_curve(solver_a, caps);
    const auto traces = parallel_map(static_cast<std::size_t>(reps), [&](std::size_t i) {
        TrafficConfig c = cfg_a;
        c.seed = a.seed + i;
        return generate(c, CacheTopology::single(0));
    });
    const auto sims = parallel_map(
        caps.size() * static_cast<std::size_t>(reps), [&](std::size_t idx) {
            const std::size_t ci = idx / reps, ri = idx % reps;
            return simulate_single(traces[ri], static_cast<std::int64_t>(caps[ci]))
                .global_hit_ratio;
        });

    // Panel (b): model-only curves over beta x life-span.
    const double betas[2] = {2.1, 3.0};
    const double spans[3] = {1.0, 7.0, 30.0};
    struct Curve {
        double beta, L;
        std::vector<SweepRow> rows;
    };
    std::vector<std::pair<double, double>> grid;
    for (double b : betas)
        for (double L : spans) grid.emplace_back(b, L);
    const auto curves = parallel_map(grid.size(), [&](std::size_t i) {
        const auto [b, L] = grid[i];
        const CheSolver s(fig6_config(a.scale, a.seed, b, L));
        return Curve{b, L, phit_vs_capacity_curve(s, caps)};
    });

    if (a.want_csv()) {
        std::string csv =
            "capacity,T_C_days,p_hit,p_hit_small_approx,p_hit_large_asymptote,p_hit_sim,ci\n";
        for (std::size_t ci = 0; ci < caps.size(); ++ci) {
            std::vector<double> vals(sims.begin() + ci * reps, sims.begin() + (ci + 1) * reps);
            const auto stats = student_t_ci(vals);
            const auto& r = model_a[ci];
            csv += fmt(r.capacity) + "," + fmt(r.T_C) + "," + fmt(r.p_hit) + "," +
                   fmt(r.p_hit_small_approx) + "," + fmt(r.p_hit_large_asymptote) + "," +
                   fmt(stats.mean) + "," + fmt(stats.ci_half_width) + "\n";
        }
        write_text(dir / "fig6a.csv", csv);
        manifest.add_output("fig6a.csv");

        std::string csvb = "beta,life_span_days,capacity,p_hit\n";
        for (const auto& c : curves)
            for (const auto& r : c.rows)
                csvb += fmt(c.beta) + "," + fmt(c.L) + "," + fmt(r.capacity) + "," +
                        fmt(r.p_hit) + "\n";
        write_text(dir / "fig6b.csv", csvb);
        manifest.add_output("fig6b.csv");
    }
    if (a.want_svg()) {
        SvgSeries m{"model", {}, {}}, s{"simulation", {}, {}, true};
        for (std::size_t ci = 0; ci < caps.size(); ++ci) {
            m.x.push_back(caps[ci]);
            m.y.push_back(model_a[ci].p_hit);
            std::vector<double> vals(sims.begin() + ci * reps, sims.begin() + (ci + 1) * reps);
            s.x.push_back(caps[ci]);
            s.y.push_back(student_t_ci(vals).mean);
        }
        write_phit_chart(dir / "fig6a.svg", "single-class LRU: model vs simulation", {m, s});
        manifest.add_output("fig6a.svg");

        std::vector<SvgSeries> bs;
        for (const auto& c : curves) {
            SvgSeries series{"beta=" + fmt(c.beta) + " L=" + fmt(c.L) + "d", {}, {}};
            for (const auto& r : c.rows) {
                series.x.push_back(r.capacity);
                series.y.push_back(r.p_hit);
            }
            bs.push_back(std::move(series));
        }
        write_phit_chart(dir / "fig6b.svg", "model curves over beta and life-span", bs);
        manifest.add_output("fig6b.svg");
    }
    manifest.write();
    return 0;
}

int cmd_fig7(Args& a) {
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    const auto caps = capacity_grid(a, doubling_grid(100.0, 819200.0));
    manifest.set("capacities", caps);
    json cfgs = json::array();
    for (int s = 1; s <= 3; ++s)
        cfgs.push_back(json::parse(table5_scenario(s, a.scale, a.seed).to_json_string()));
    manifest.set("config", cfgs);

    // Panel (a): plain LRU, scenarios 1-3. Panel (b): scenario 3, plain LRU
    // vs LRU-(0+5) (classes 0 and 5 never admitted).
    struct Out {
        std::vector<SweepRow> plain;
        std::vector<double> filtered;  // scenario 3 only, else empty
    };
    const auto results = parallel_map(3, [&](std::size_t i) {
        const CheSolver solver(table5_scenario(static_cast<int>(i) + 1, a.scale, a.seed));
        Out out{phit_vs_capacity_curve(solver, caps), {}};
        if (i == 2)
            for (double c : caps) out.filtered.push_back(solver.filtered_phit(c, {0, 5}));
        return out;
    });

    if (a.want_csv()) {
        std::string csv = "scenario,capacity,p_hit\n";
        for (std::size_t s = 0; s < 3; ++s)
            for (const auto& r : results[s].plain)
                csv += std::to_string(s + 1) + "," + fmt(r.capacity) + "," + fmt(r.p_hit) + "\n";
        write_text(dir / "fig7a.csv", csv);
        manifest.add_output("fig7a.csv");

        std::string csvb = "policy,capacity,p_hit\n";
        for (std::size_t ci = 0; ci < caps.size(); ++ci)
            csvb += "lru," + fmt(caps[ci]) + "," + fmt(results[2].plain[ci].p_hit) + "\n";
        for (std::size_t ci = 0; ci < caps.size(); ++ci)
            csvb += "lru_0plus5," + fmt(caps[ci]) + "," + fmt(results[2].filtered[ci]) + "\n";
        write_text(dir / "fig7b.csv", csvb);
        manifest.add_output("fig7b.csv");
    }
    if (a.want_svg()) {
        std::vector<SvgSeries> sa;
        for (std::size_t s = 0; s < 3; ++s) {
            SvgSeries series{"scenario " + std::to_string(s + 1), {}, {}};
            for (const auto& r : results[s].plain) {
                series.x.push_back(r.capacity);
                series.y.push_back(r.p_hit);
            }
            sa.push_back(std::move(series));
        }
        write_phit_chart(dir / "fig7a.svg", "multi-class scenarios", sa);
        manifest.add_output("fig7a.svg");

        SvgSeries plain{"LRU", {}, {}}, filt{"LRU-(0+5)", {}, {}};
        for (std::size_t ci = 0; ci < caps.size(); ++ci) {
            plain.x.push_back(caps[ci]);
            plain.y.push_back(results[2].plain[ci].p_hit);
            filt.x.push_back(caps[ci]);
            filt.y.push_back(results[2].filtered[ci]);
        }
        write_phit_chart(dir / "fig7b.svg", "scenario 3: admission filtering", {plain, filt});
        manifest.add_output("fig7b.svg");
    }
    manifest.write();
    return 0;
}

int cmd_fig8(Args& a) {
    const int reps = a.reps_or(2);
    const fs::path dir = prepare_out_dir(a);
    Manifest manifest(a, dir);
    const auto totals = capacity_grid(a, {800.0, 6400.0, 51200.0});
    const double fractions[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    constexpr int kLeaves = 8;
    manifest.set("total_capacities", totals);

    struct Alloc {
        bool localized;
        double total, frac;
        std::int64_t leaf_cap, root_cap;
        std::string label;
    };
    std::vector<Alloc> allocs;
    for (bool localized : {false, true})
        for (double total : totals)
            for (double f : fractions) {
                const auto leaf =
                    static_cast<std::int64_t>(std::llround(total * f / kLeaves));
                const auto root = static_cast<std::int64_t>(std::llround(total)) - kLeaves * leaf;
                const std::string label = std::string(localized ? "localized" : "unlocalized") +
                                          "_C" + fmt(total) + "_f" + fmt(f);
                allocs.push_back({localized, total, f, leaf, root, label});
            }

    // One set of traces per ingress model, shared across every allocation.
    const CacheTopology base = star_topology(kLeaves, 0, 0);
    std::vector<std::vector<RequestTrace>> traces(2);
    for (int loc = 0; loc < 2; ++loc) {
        traces[loc] = parallel_map(static_cast<std::size_t>(reps), [&](std::size_t i) {
            auto cfg = fig8_config(loc == 1, a.scale, a.seed + i);
            return generate(cfg, base);
        });
    }
    manifest.set("config",
                 json::array({json::parse(fig8_config(false, a.scale, a.seed).to_json_string()),
                              json::parse(fig8_config(true, a.scale, a.seed).to_json_string())}));
    manifest.set_topology(base);

    struct Row {
        double model = 0.0, sim = 0.0, ci = 0.0;
    };
    const auto rows = parallel_map(allocs.size(), [&](std::size_t i) {
        const auto& al = allocs[i];
        const auto topo = star_topology(kLeaves, al.leaf_cap, al.root_cap);
        const auto cfg = fig8_config(al.localized, a.scale, a.seed);
        const auto sol = solve_network(cfg, topo);
        std::vector<double> ratios;
        for (int r = 0; r < reps; ++r)
            ratios.push_back(simulate_tree(traces[al.localized ? 1 : 0][r], topo)
                                 .global_hit_ratio);
        const auto stats = student_t_ci(ratios);
        return Row{sol.global_phit_improved, stats.mean, stats.ci_half_width};
    });

    if (a.want_csv()) {
        std::string csv =
            "alloc_label,leaf_capacity,root_capacity,global_phit_model,global_phit_sim,ci\n";
        for (std::size_t i = 0; i < allocs.size(); ++i)
            csv += allocs[i].label + "," + std::to_string(allocs[i].leaf_cap) + "," +
                   std::to_string(allocs[i].root_cap) + "," + fmt(rows[i].model) + "," +
                   fmt(rows[i].sim) + "," + fmt(rows[i].ci) + "\n";
        write_text(dir / "fig8.csv", csv);
        manifest.add_output("fig8.csv");
    }
    if (a.want_svg()) {
        std::vector<SvgSeries> series;
        for (int loc = 0; loc < 2; ++loc)
            for (double total : totals) {
                SvgSeries s{std::string(loc ? "localized" : "unlocalized") + " C=" + fmt(total),
                            {},
                            {}};
                for (std::size_t i = 0; i < allocs.size(); ++i)
                    if ((allocs[i].localized ? 1 : 0) == loc && allocs[i].total == total) {
                        s.x.push_back(allocs[i].frac);
                        s.y.push_back(rows[i].model);
                    }
                series.push_back(std::move(s));
            }
        SvgChart chart;
        chart.title = "tree allocation: model global hit probability";
        chart.x_label = "fraction of capacity at the leaves";
        chart.y_label = "global hit probability";
        chart.series = std::move(series);
        chart.write((dir / "fig8.svg").string());
        manifest.add_output("fig8.svg");
    }
    manifest.write();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"snmcache: shot-noise traffic and LRU cache analysis toolkit"};
    app.require_subcommand(1);

    std::vector<std::pair<Args, std::function<int(Args&)>>> dispatch;
    const auto make = [&](const std::string& name, const std::string& desc,
                          std::function<int(Args&)> fn) -> CLI::App* {
        dispatch.push_back({Args{}, std::move(fn)});
        Args& a = dispatch.back().first;
        a.kind = name;
        CLI::App* sub = app.add_subcommand(name, desc);
        add_common(sub, a);
        return sub;
    };
    // Reserve so Args references stay valid while options bind to them.
    dispatch.reserve(16);

    {
        make("generate", "Draw a synthetic SNM request trace", cmd_generate);
    }
    {
        CLI::App* sub = make("simulate", "Replay a trace through an LRU cache or tree",
                             cmd_simulate);
        sub->add_option("--trace", dispatch.back().first.trace_path, "Input trace CSV[.gz]");
        sub->add_option("--capacity", dispatch.back().first.capacity,
                        "Single-cache capacity when no --topology is given")
            ->capture_default_str();
    }
    {
        CLI::App* sub = make("solve", "Analytic hit-probability sweep over capacities",
                             cmd_solve);
        sub->add_option("--capacities", dispatch.back().first.capacities,
                        "Comma-separated capacity grid");
    }
    {
        CLI::App* sub = make("fit", "Fit an SNM config from a request trace", cmd_fit);
        sub->add_option("--trace", dispatch.back().first.trace_path, "Input trace CSV[.gz]")
            ->required();
        sub->add_option("--profile", dispatch.back().first.profile,
                        "Profile shape to impose: uniform|exponential|power_law")
            ->capture_default_str();
        sub->add_option("--horizon", dispatch.back().first.horizon,
                        "Observation window length in days (default: trace metadata)");
    }
    {
        CLI::App* sub = make("shuffle-study",
                             "Required cache size vs within-slice request shuffling",
                             cmd_shuffle_study);
        sub->add_option("--target", dispatch.back().first.target, "Target hit ratio")
            ->capture_default_str();
    }
    {
        CLI::App* sub = make("sweep", "Model curve plus replicated simulation", cmd_sweep);
        sub->add_option("--capacities", dispatch.back().first.capacities,
                        "Comma-separated capacity grid");
    }
    {
        CLI::App* sub = make("fig6", "Preset: single-class model vs simulation curves",
                             cmd_fig6);
        sub->add_option("--capacities", dispatch.back().first.capacities,
                        "Comma-separated capacity grid");
    }
    {
        CLI::App* sub = make("fig7", "Preset: multi-class scenarios and admission filtering",
                             cmd_fig7);
        sub->add_option("--capacities", dispatch.back().first.capacities,
                        "Comma-separated capacity grid");
    }
    {
        CLI::App* sub = make("fig8", "Preset: two-level tree capacity allocation", cmd_fig8);
        sub->add_option("--capacities", dispatch.back().first.capacities,
                        "Comma-separated total-capacity grid");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        emit_error(nullptr, "config", e.what(), kExitConfig);
        return kExitConfig;
    }

    for (std::size_t i = 0; i < dispatch.size(); ++i) {
        auto& [args, fn] = dispatch[i];
        if (!app.get_subcommands().empty() &&
            app.get_subcommands().front()->get_name() == args.kind) {
            fs::path dir;
            try {
                return fn(args);
            } catch (const ConfigError& e) {
                if (!args.out_dir.empty()) dir = args.out_dir;
                emit_error(dir.empty() ? nullptr : &dir, "config", e.what(), kExitConfig);
                return kExitConfig;
            } catch (const std::exception& e) {
                if (!args.out_dir.empty()) dir = args.out_dir;
                emit_error(dir.empty() ? nullptr : &dir, "numerical", e.what(), kExitNumerical);
                return kExitNumerical;
            }
        }
    }
    emit_error(nullptr, "config", "no subcommand selected", kExitConfig);
    return kExitConfig;
}
