#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "snm/topology.hpp"
#include "snm/traffic.hpp"

namespace snm {

// A group of contents sharing a class and a per-leaf ingress split: a content
// of this flow with volume V sends requests to leaf f at rate V * share[f] *
// lambda(t - tau). Unlocalized traffic is one flow per class; fully localized
// traffic is one flow per (class, leaf) pair pinned to a single leaf.
struct Flow {
    std::size_t class_index = 0;
    double gamma = 0.0;                // content arrival rate of this flow
    std::vector<double> leaf_share;    // in topology.leaves() order, sums to 1
};

std::vector<Flow> flows_from_config(const TrafficConfig& config,
                                    const CacheTopology& topology);

// Discrete volume quadrature: atoms v with weights w summing to 1, built on
// the quantile transform (Gauss-Legendre on u = v_min / v for the Pareto
// laws, so the integrand stays smooth).
struct VolumeAtoms {
    std::vector<double> v;
    std::vector<double> w;
};
VolumeAtoms volume_atoms(const VolumeDistribution& volumes, int n);

struct NetworkOptions {
    int volume_nodes = 64;
    int age_points = 4096;
    double tail_eps = 1e-10;  // profile mass dropped beyond the age grid
};

struct NodeSolution {
    std::string id;
    double capacity = 0.0;
    double T_C = 0.0;
    bool never_fills = false;
    bool leaf = false;

    // Request accounting, requests/day. Forwarding always follows the
    // occupancy probability p_in (Poisson thinning), so conservation holds
    // exactly for the Poisson numbers.
    double incoming_rate = 0.0;
    double hit_rate_poisson = 0.0;
    double hit_rate_improved = 0.0;
    double forwarded_rate = 0.0;  // incoming - hit_rate_poisson

    // Same quantities re-integrated from the age grids, for checking that
    // the discretization conserves traffic.
    double incoming_rate_grid = 0.0;
    double forwarded_rate_grid = 0.0;

    // Intensity-weighted averages over flows and volumes, on the shared age
    // grid. At leaves p_in and both p_hit curves coincide (Poisson arrivals).
    std::vector<double> p_in;
    std::vector<double> p_hit_poisson;
    std::vector<double> p_hit_improved;
    std::vector<double> intensity;  // expected request intensity per content age

    double hit_ratio_poisson() const {
        return incoming_rate > 0.0 ? hit_rate_poisson / incoming_rate : 0.0;
    }
    double hit_ratio_improved() const {
        return incoming_rate > 0.0 ? hit_rate_improved / incoming_rate : 0.0;
    }
};

struct NetworkSolution {
    std::vector<double> ages;
    std::map<std::string, NodeSolution> nodes;
    double exogenous_rate = 0.0;  // requests/day entering the tree
    double global_phit_poisson = 0.0;
    double global_phit_improved = 0.0;
};

// Bottom-up solve of a leave-copy-everywhere LRU tree: leaves exactly via the
// single-cache analysis, inner nodes on an age grid with the expected miss
// intensity forwarded from their children. Both the plain Poisson
// approximation and the improved child-exclusion approximation are reported.
NetworkSolution solve_network(const TrafficConfig& config, const CacheTopology& topology,
                              const NetworkOptions& opts = {});

}  // namespace snm
