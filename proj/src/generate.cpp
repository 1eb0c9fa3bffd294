#include "snm/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snm/rng.hpp"

namespace snm {

namespace {

struct IndexedRequest {
    Request req;
    std::uint64_t order;  // generation order, for deterministic tie-breaking
};

}  // namespace

RequestTrace generate(const TrafficConfig& config, const CacheTopology& topology,
                      const GenerateOptions& opts) {
    config.validate();
    const auto& leaves = topology.leaves();
    const std::size_t n_leaves = leaves.size();
    if (config.ingress.kind == IngressKind::SingleCache && n_leaves != 1)
        throw std::invalid_argument("generate: single-cache ingress needs a one-leaf topology");
    if (!config.ingress.node_weights.empty() && config.ingress.node_weights.size() != n_leaves)
        throw std::invalid_argument("generate: node_weights dimension mismatch");
    for (const auto& c : config.ingress.split_choices)
        if (c.split.size() != n_leaves)
            throw std::invalid_argument("generate: explicit split dimension mismatch");

    const double burn_in = config.effective_burn_in();
    const double emit_floor = opts.warm_window ? -*opts.warm_window : -burn_in;

    std::vector<double> class_weights;
    class_weights.reserve(config.classes.size());
    for (const auto& c : config.classes) class_weights.push_back(c.weight);

    Rng rng(config.seed);
    RequestTrace trace;
    trace.meta.config_hash = config.hash();
    trace.meta.seed = config.seed;
    trace.meta.horizon = config.horizon;
    trace.meta.burn_in = burn_in;
    trace.meta.ingress_ids = leaves;

    std::vector<IndexedRequest> pending;
    if (config.gamma > 0.0)
        pending.reserve(static_cast<std::size_t>(
            1.2 * config.gamma * (config.horizon + burn_in) * config.mean_volume() + 64));

    std::uint64_t next_id = 1;
    std::uint64_t order = 0;
    double tau = -burn_in;
    while (true) {
        if (config.gamma <= 0.0) break;
        tau += rng.exponential(config.gamma);
        if (tau > config.horizon) break;

        ContentInfo info;
        info.id = next_id++;
        info.tau = tau;
        info.class_index = static_cast<int>(rng.discrete(class_weights));
        const auto& cls = config.classes[static_cast<std::size_t>(info.class_index)];
        info.volume = cls.volumes.quantile(rng.uniform());

        // Per-content ingress split.
        std::uint32_t fixed_leaf = 0;
        const std::vector<double>* split = nullptr;
        switch (config.ingress.kind) {
            case IngressKind::SingleCache:
                break;
            case IngressKind::Unlocalized:
                split = config.ingress.node_weights.empty() ? nullptr : &config.ingress.node_weights;
                break;
            case IngressKind::FullyLocalized:
                fixed_leaf = static_cast<std::uint32_t>(rng.integer(n_leaves));
                break;
            case IngressKind::ExplicitSplit: {
                std::vector<double> ws;
                ws.reserve(config.ingress.split_choices.size());
                for (const auto& c : config.ingress.split_choices) ws.push_back(c.weight);
                split = &config.ingress.split_choices[rng.discrete(ws)].split;
                break;
            }
        }

        const std::uint64_t n_req = rng.poisson(info.volume);
        for (std::uint64_t i = 0; i < n_req; ++i) {
            const double t = tau + cls.profile.quantile(rng.uniform());
            std::uint32_t ingress = fixed_leaf;
            if (config.ingress.kind == IngressKind::Unlocalized)
                ingress = split ? static_cast<std::uint32_t>(rng.discrete(*split))
                                : static_cast<std::uint32_t>(rng.integer(n_leaves));
            else if (config.ingress.kind == IngressKind::ExplicitSplit)
                ingress = static_cast<std::uint32_t>(rng.discrete(*split));
            if (t < emit_floor) continue;
            pending.push_back({{t, info.id, ingress, t < 0.0 || t > config.horizon}, order++});
        }
        trace.contents.emplace(info.id, info);
    }

    std::sort(pending.begin(), pending.end(), [](const IndexedRequest& a, const IndexedRequest& b) {
        if (a.req.time != b.req.time) return a.req.time < b.req.time;
        return a.order < b.order;
    });
    trace.requests.reserve(pending.size());
    for (const auto& p : pending) trace.requests.push_back(p.req);
    return trace;
}

RequestTrace generate(const TrafficConfig& config, const GenerateOptions& opts) {
    return generate(config, CacheTopology::single(0), opts);
}

}  // namespace snm
