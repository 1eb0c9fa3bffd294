#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "snm/topology.hpp"
#include "snm/trace.hpp"
#include "snm/traffic.hpp"

namespace snm {

// Plain LRU over content ids; capacity counts contents.
class LruCache {
  public:
    explicit LruCache(std::int64_t capacity);

    // Look up id and promote it to most-recent. No insertion on miss.
    bool access(std::uint64_t id);
    // Insert at most-recent, evicting the least-recent entry when full.
    void insert(std::uint64_t id);
    std::size_t size() const { return map_.size(); }
    std::int64_t capacity() const { return capacity_; }

  private:
    std::int64_t capacity_;
    std::list<std::uint64_t> order_;  // front = most recent
    std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> map_;
};

// Class labels whose contents are never admitted; their requests always miss.
struct FilterPolicy {
    std::set<int> filtered_classes;
    bool empty() const { return filtered_classes.empty(); }
};

using ClassOf = std::function<int(std::uint64_t)>;

struct NodeCounts {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t requests() const { return hits + misses; }
    double hit_ratio() const {
        return requests() ? static_cast<double>(hits) / static_cast<double>(requests()) : 0.0;
    }
};

struct SimResult {
    std::map<std::string, NodeCounts> per_node;
    // Fraction of measured exogenous requests served by any cache.
    double global_hit_ratio = 0.0;
    std::uint64_t measured_requests = 0;
    // Optional per-measured-request hit flags (single-cache runs only).
    std::vector<bool> hit_sequence;
    // Replication statistics (filled by replicate()).
    double mean = 0.0;
    double ci_half_width = 0.0;
    std::size_t replications = 0;
};

struct SimOptions {
    std::optional<FilterPolicy> filter;
    ClassOf class_of;              // required when a filter is set
    bool record_hit_sequence = false;
    double measure_start = 0.0;    // extra offset for externally supplied traces
};

SimResult simulate_single(const RequestTrace& trace, std::int64_t capacity,
                          const SimOptions& opts = {});

// Leave-copy-everywhere tree: a request enters at its leaf, walks up on
// misses, and the content is copied into every cache on the traversed path.
SimResult simulate_tree(const RequestTrace& trace, const CacheTopology& topology,
                        const SimOptions& opts = {});

struct UnreachableTarget : std::runtime_error {
    double asymptote;
    explicit UnreachableTarget(double a)
        : std::runtime_error("target hit ratio unreachable"), asymptote(a) {}
};

struct RequiredSizeResult {
    std::int64_t capacity;       // smallest capacity meeting the target
    std::int64_t lower_bracket;  // largest tested capacity below the target
    double hit_ratio;
};

// Smallest LRU capacity whose measured hit ratio reaches target, by doubling
// then bisection. Throws UnreachableTarget when even a cache holding every
// distinct content falls short.
RequiredSizeResult required_cache_size(const RequestTrace& trace, double target_hit,
                                       const SimOptions& opts = {});

// Independent replications with distinct seeds; Student-t 95% interval.
SimResult replicate(const TrafficConfig& config, const CacheTopology& topology,
                    std::size_t n_runs,
                    const std::function<double(const RequestTrace&)>& measure);

struct CiStats {
    double mean = 0.0;
    double ci_half_width = 0.0;
};
CiStats student_t_ci(const std::vector<double>& values);

}  // namespace snm
