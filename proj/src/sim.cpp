#include "snm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>

#include "snm/generate.hpp"

namespace snm {

LruCache::LruCache(std::int64_t capacity) : capacity_(capacity) {
    if (capacity < 0) throw std::invalid_argument("lru: capacity >= 0");
}

bool LruCache::access(std::uint64_t id) {
    auto it = map_.find(id);
    if (it == map_.end()) return false;
    order_.splice(order_.begin(), order_, it->second);
    return true;
}

void LruCache::insert(std::uint64_t id) {
    if (capacity_ == 0) return;
    auto it = map_.find(id);
    if (it != map_.end()) {
        order_.splice(order_.begin(), order_, it->second);
        return;
    }
    if (static_cast<std::int64_t>(map_.size()) >= capacity_) {
        map_.erase(order_.back());
        order_.pop_back();
    }
    order_.push_front(id);
    map_[id] = order_.begin();
}

namespace {

int class_of_or_throw(const SimOptions& opts, std::uint64_t id) {
    if (!opts.class_of) throw std::runtime_error("filter requires a content class map");
    return opts.class_of(id);
}

bool measured(const Request& r, const SimOptions& opts) {
    return !r.pre_horizon && r.time >= opts.measure_start;
}

}  // namespace

SimResult simulate_single(const RequestTrace& trace, std::int64_t capacity,
                          const SimOptions& opts) {
    LruCache cache(capacity);
    SimResult res;
    auto& counts = res.per_node["cache"];
    const bool filtered = opts.filter && !opts.filter->empty();
    for (const auto& r : trace.requests) {
        const bool count = measured(r, opts);
        if (filtered &&
            opts.filter->filtered_classes.count(class_of_or_throw(opts, r.content_id))) {
            if (count) {
                ++counts.misses;
                if (opts.record_hit_sequence) res.hit_sequence.push_back(false);
            }
            continue;
        }
        const bool hit = cache.access(r.content_id);
        if (!hit) cache.insert(r.content_id);
        if (count) {
            hit ? ++counts.hits : ++counts.misses;
            if (opts.record_hit_sequence) res.hit_sequence.push_back(hit);
        }
    }
    res.measured_requests = counts.requests();
    res.global_hit_ratio = counts.hit_ratio();
    return res;
}

SimResult simulate_tree(const RequestTrace& trace, const CacheTopology& topology,
                        const SimOptions& opts) {
    std::unordered_map<std::string, LruCache> caches;
    for (const auto& n : topology.nodes()) caches.emplace(n.id, LruCache(n.capacity));
    SimResult res;
    for (const auto& n : topology.nodes()) res.per_node[n.id];
    const bool filtered = opts.filter && !opts.filter->empty();
    std::uint64_t global_hits = 0, global_total = 0;
    std::vector<std::string> path;
    for (const auto& r : trace.requests) {
        const std::string& leaf = trace.ingress_name(r.ingress);
        if (!topology.is_leaf(leaf))
            throw std::invalid_argument("simulate_tree: ingress " + leaf + " is not a leaf");
        const bool count = measured(r, opts);
        if (count) ++global_total;
        if (filtered &&
            opts.filter->filtered_classes.count(class_of_or_throw(opts, r.content_id))) {
            if (count)
                for (const std::string* id = &leaf; !id->empty(); id = &topology.parent(*id))
                    ++res.per_node[*id].misses;
            continue;
        }
        path.clear();
        bool served = false;
        for (const std::string* id = &leaf; !id->empty(); id = &topology.parent(*id)) {
            path.push_back(*id);
            const bool hit = caches.at(*id).access(r.content_id);
            if (count) {
                auto& c = res.per_node[*id];
                hit ? ++c.hits : ++c.misses;
            }
            if (hit) {
                served = true;
                break;
            }
        }
        if (count && served) ++global_hits;
        // Copy into the traversed caches, serving point towards the leaf.
        const std::size_t filled = served ? path.size() - 1 : path.size();
        for (std::size_t i = filled; i-- > 0;) caches.at(path[i]).insert(r.content_id);
    }
    res.measured_requests = global_total;
    res.global_hit_ratio =
        global_total ? static_cast<double>(global_hits) / static_cast<double>(global_total) : 0.0;
    return res;
}

RequiredSizeResult required_cache_size(const RequestTrace& trace, double target_hit,
                                       const SimOptions& opts) {
    if (!(target_hit > 0.0 && target_hit < 1.0))
        throw std::invalid_argument("required_cache_size: target in (0,1)");
    std::unordered_set<std::uint64_t> distinct;
    for (const auto& r : trace.requests) distinct.insert(r.content_id);
    const auto max_useful = static_cast<std::int64_t>(distinct.size());
    auto eval = [&](std::int64_t c) { return simulate_single(trace, c, opts).global_hit_ratio; };
    const double asymptote = eval(max_useful);
    if (asymptote < target_hit) throw UnreachableTarget(asymptote);

    std::int64_t lo = 0, hi = 1;
    double hi_ratio = eval(hi);
    while (hi_ratio < target_hit && hi < max_useful) {
        lo = hi;
        hi = std::min(hi * 2, max_useful);
        hi_ratio = eval(hi);
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        const double r = eval(mid);
        if (r >= target_hit) {
            hi = mid;
            hi_ratio = r;
        } else {
            lo = mid;
        }
    }
    return {hi, lo, hi_ratio};
}

CiStats student_t_ci(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("CI needs >= 2 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    if (var == 0.0) return {mean, 0.0};
    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(dist, 0.975);
    return {mean, t * std::sqrt(var / n)};
}

SimResult replicate(const TrafficConfig& config, const CacheTopology& topology,
                    std::size_t n_runs,
                    const std::function<double(const RequestTrace&)>& measure) {
    if (n_runs < 2) throw std::invalid_argument("replicate: n_runs >= 2");
    std::vector<std::future<double>> futures;
    futures.reserve(n_runs);
    for (std::size_t i = 0; i < n_runs; ++i) {
        TrafficConfig run_cfg = config;
        run_cfg.seed = config.seed + 0x9e3779b97f4a7c15ull * (i + 1);
        futures.push_back(std::async(std::launch::async, [run_cfg, &topology, &measure] {
            return measure(generate(run_cfg, topology));
        }));
    }
    std::vector<double> values;
    values.reserve(n_runs);
    for (auto& f : futures) values.push_back(f.get());
    const auto ci = student_t_ci(values);
    SimResult res;
    res.mean = ci.mean;
    res.ci_half_width = ci.ci_half_width;
    res.replications = n_runs;
    res.global_hit_ratio = ci.mean;
    return res;
}

}  // namespace snm
