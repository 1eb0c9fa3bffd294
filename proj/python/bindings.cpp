// Thin pybind11 layer over the core library. Configs and topologies travel as
// JSON strings so the Python surface stays stable while the C++ structs evolve.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <string>
#include <vector>

#include "snm/che.hpp"
#include "snm/fit.hpp"
#include "snm/generate.hpp"
#include "snm/network.hpp"
#include "snm/sim.hpp"
#include "snm/topology.hpp"
#include "snm/trace.hpp"
#include "snm/traffic.hpp"
#include "snm/warp.hpp"

namespace py = pybind11;
using namespace snm;

namespace {

TrafficConfig config_from_json(const std::string& text) {
    return TrafficConfig::from_json_string(text);
}

py::dict sim_result_to_dict(const SimResult& res) {
    py::dict d;
    d["global_hit_ratio"] = res.global_hit_ratio;
    d["measured_requests"] = res.measured_requests;
    py::dict nodes;
    for (const auto& [id, counts] : res.per_node) {
        py::dict n;
        n["hits"] = counts.hits;
        n["requests"] = counts.requests();
        n["hit_ratio"] = counts.hit_ratio();
        nodes[py::str(id)] = n;
    }
    d["per_node"] = nodes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_snmcache, m) {
    m.doc() = "Shot-noise video traffic modelling, LRU cache simulation and "
              "analytic hit-probability prediction";

    m.def("config_schema_roundtrip",
          [](const std::string& text) { return config_from_json(text).to_json_string(); },
          py::arg("config_json"),
          "Parse a traffic config from JSON and return its canonical form.");

    m.def("mean_volume",
          [](const std::string& cfg) { return config_from_json(cfg).mean_volume(); },
          py::arg("config_json"), "Mean per-content request volume of the mix.");

    m.def("request_rate",
          [](const std::string& cfg) { return config_from_json(cfg).request_rate(); },
          py::arg("config_json"), "Aggregate request rate, requests per day.");

    m.def(
        "generate_trace",
        [](const std::string& cfg, const std::string& path,
           std::optional<std::uint64_t> seed) {
            auto config = config_from_json(cfg);
            if (seed) config.seed = *seed;
            const auto trace = generate(config);
            trace.write_csv(path);
            return trace.measured_count();
        },
        py::arg("config_json"), py::arg("path"), py::arg("seed") = std::nullopt,
        "Draw a request trace and write it as CSV (gzip when the path ends in "
        ".gz). Returns the number of measured requests.");

    m.def(
        "simulate_trace",
        [](const std::string& path, std::int64_t capacity) {
            return sim_result_to_dict(simulate_single(RequestTrace::read_csv(path), capacity));
        },
        py::arg("trace_path"), py::arg("capacity"),
        "Replay a trace CSV through a single LRU cache.");

    m.def(
        "simulate",
        [](const std::string& cfg, std::int64_t capacity,
           std::optional<std::uint64_t> seed) {
            auto config = config_from_json(cfg);
            if (seed) config.seed = *seed;
            return sim_result_to_dict(simulate_single(generate(config), capacity));
        },
        py::arg("config_json"), py::arg("capacity"), py::arg("seed") = std::nullopt,
        "Generate a trace from the config and simulate a single LRU cache.");

    m.def(
        "phit",
        [](const std::string& cfg, double capacity) {
            return CheSolver(config_from_json(cfg)).phit_for_capacity(capacity);
        },
        py::arg("config_json"), py::arg("capacity"),
        "Analytic per-request hit probability of an LRU cache.");

    m.def(
        "capacity_for_phit",
        [](const std::string& cfg, double target) {
            return CheSolver(config_from_json(cfg)).capacity_for_phit(target);
        },
        py::arg("config_json"), py::arg("target"),
        "Smallest capacity reaching the target hit probability.");

    m.def(
        "filtered_phit",
        [](const std::string& cfg, double capacity, const std::vector<int>& filtered) {
            return CheSolver(config_from_json(cfg))
                .filtered_phit(capacity, std::set<int>(filtered.begin(), filtered.end()));
        },
        py::arg("config_json"), py::arg("capacity"), py::arg("filtered_classes"),
        "Hit probability when the given class indices are never admitted.");

    m.def(
        "solve_curve",
        [](const std::string& cfg, const std::vector<double>& capacities) {
            CheSolver solver(config_from_json(cfg));
            py::list rows;
            for (const auto& r : phit_vs_capacity_curve(solver, capacities)) {
                py::dict d;
                d["capacity"] = r.capacity;
                d["T_C_days"] = r.T_C;
                d["p_hit"] = r.p_hit;
                d["p_hit_small_approx"] = r.p_hit_small_approx;
                d["p_hit_large_asymptote"] = r.p_hit_large_asymptote;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config_json"), py::arg("capacities"),
        "Hit-probability sweep: one row per capacity with the exact value and "
        "the small/large-cache approximations.");

    m.def(
        "fit_trace",
        [](const std::string& path, const std::string& profile, double horizon) {
            const auto trace = RequestTrace::read_csv(path);
            return fit_config(trace, profile_kind_from_string(profile), horizon)
                .to_json_string();
        },
        py::arg("trace_path"), py::arg("profile") = std::string("exponential"),
        py::arg("horizon") = 0.0,
        "Fit traffic-model parameters to a trace; returns the fitted config as "
        "JSON.");

    m.def(
        "solve_star_network",
        [](const std::string& cfg, int n_leaves, std::int64_t leaf_capacity,
           std::int64_t root_capacity) {
            std::vector<CacheNode> nodes;
            CacheNode root{"root", root_capacity, {}};
            for (int i = 0; i < n_leaves; ++i) {
                const std::string id = "leaf" + std::to_string(i);
                root.children.push_back(id);
                nodes.push_back({id, leaf_capacity, {}});
            }
            nodes.push_back(root);
            const auto sol = solve_network(config_from_json(cfg),
                                           CacheTopology(std::move(nodes), "root"));
            py::dict d;
            d["global_phit_poisson"] = sol.global_phit_poisson;
            d["global_phit_improved"] = sol.global_phit_improved;
            d["exogenous_rate"] = sol.exogenous_rate;
            return d;
        },
        py::arg("config_json"), py::arg("n_leaves"), py::arg("leaf_capacity"),
        py::arg("root_capacity"),
        "Analytic solve of an n-leaf + root LRU tree; returns the global hit "
        "probabilities under both root approximations.");

    m.def(
        "shuffle_trace",
        [](const std::string& in_path, const std::string& out_path, std::size_t k,
           std::uint64_t seed) {
            const auto shuffled = shuffle_k_slices(RequestTrace::read_csv(in_path), k, seed);
            shuffled.write_csv(out_path);
            return shuffled.requests.size();
        },
        py::arg("trace_path"), py::arg("out_path"), py::arg("k"), py::arg("seed") = 1,
        "Permute content ids within k consecutive equal-count slices.");

    m.attr("__version__") = "0.1.0";
}
