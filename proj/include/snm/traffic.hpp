#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snm/profile.hpp"
#include "snm/volume.hpp"

namespace snm {

struct ContentClass {
    PopularityProfile profile;
    VolumeDistribution volumes;
    double weight = 1.0;  // P{W = k}
    std::string label;
    bool cacheable = true;
};

enum class IngressKind { SingleCache, Unlocalized, FullyLocalized, ExplicitSplit };

std::string to_string(IngressKind k);
IngressKind ingress_kind_from_string(const std::string& s);

// How a content's requests are distributed over the leaves of the topology.
struct IngressModel {
    IngressKind kind = IngressKind::SingleCache;
    // Unlocalized: p_i over leaves, in leaf order; empty means uniform.
    std::vector<double> node_weights;
    // ExplicitSplit: candidate per-content split vectors with sampling weights.
    struct SplitChoice {
        double weight;
        std::vector<double> split;
    };
    std::vector<SplitChoice> split_choices;

    static IngressModel single();
    static IngressModel unlocalized(std::vector<double> node_weights = {});
    static IngressModel fully_localized();
    static IngressModel explicit_split(std::vector<SplitChoice> choices);
};

// Full SNM specification. Times in days, gamma in contents/day.
struct TrafficConfig {
    double gamma = 0.0;
    std::vector<ContentClass> classes;
    double horizon = 0.0;
    // Absent: 3 x largest class life-span, capped at 10 x horizon.
    std::optional<double> burn_in;
    IngressModel ingress;
    std::uint64_t seed = 0;

    double effective_burn_in() const;
    double mean_volume() const;    // E[V] across the mix
    double request_rate() const;   // gamma * E[V], requests/day
    void validate() const;

    static TrafficConfig from_json_file(const std::string& path);
    static TrafficConfig from_json_string(const std::string& text);
    std::string to_json_string() const;
    // FNV-1a hash of the canonical serialized form.
    std::uint64_t hash() const;
};

}  // namespace snm
