#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "snm/rng.hpp"
#include "snm/topology.hpp"
#include "snm/traffic.hpp"

namespace snm::test {

inline TrafficConfig single_class(double gamma, PopularityProfile profile,
                                  VolumeDistribution volumes, double horizon,
                                  std::uint64_t seed) {
    TrafficConfig cfg;
    cfg.gamma = gamma;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.classes.push_back({profile, volumes, 1.0, "c0", true});
    cfg.ingress = IngressModel::single();
    return cfg;
}

// Six-class mix modelled on realistic VoD traffic: a large stationary class
// of unpopular contents plus popular classes of increasing life-span.
inline TrafficConfig multi_class_scenario(int scenario, double gamma = 1e5,
                                          double horizon = 30.0, std::uint64_t seed = 1) {
    const double L[6] = {500.0, 2.0, 7.0, 30.0, 100.0, 1000.0};
    const double EV[6] = {1.61, 83.33, 75.0, 66.66, 50.0, 50.0};
    const double W[3][6] = {{0.85, 0.00, 0.00, 0.02, 0.02, 0.11},
                            {0.85, 0.00, 0.02, 0.02, 0.02, 0.09},
                            {0.85, 0.01, 0.02, 0.02, 0.02, 0.08}};
    TrafficConfig cfg;
    cfg.gamma = gamma;
    cfg.horizon = horizon;
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

inline TrafficConfig tree_scenario(bool localized, double gamma = 1e4, double horizon = 40.0,
                                   std::uint64_t seed = 1) {
    auto cfg = single_class(gamma,
                            PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0),
                            VolumeDistribution::pareto_with_mean(2.5, 3.0), horizon, seed);
    cfg.ingress = localized ? IngressModel::fully_localized() : IngressModel::unlocalized();
    return cfg;
}

inline CacheTopology two_level(int n_leaves, std::int64_t leaf_cap, std::int64_t root_cap) {
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

struct MeanErr {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
};

template <typename F>
MeanErr monte_carlo(F&& sample, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = sample(rng);
        s += v;
        s2 += v * v;
    }
    const double mean = s / static_cast<double>(n);
    const double var = s2 / static_cast<double>(n) - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

}  // namespace snm::test
