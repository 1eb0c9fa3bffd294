#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace snm {

struct Request {
    double time = 0.0;             // days
    std::uint64_t content_id = 0;
    std::uint32_t ingress = 0;     // index into TraceMeta::ingress_ids
    bool pre_horizon = false;      // outside [0, horizon]: warm-up only
};

struct ContentInfo {
    std::uint64_t id = 0;
    double tau = 0.0;       // catalogue insertion time
    int class_index = 0;
    double volume = 0.0;    // expected request count V_m
};

struct TraceMeta {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double burn_in = 0.0;
    std::vector<std::string> ingress_ids;  // leaf names, indexed by Request::ingress
};

// Time-ordered request sequence plus optional per-content side data.
struct RequestTrace {
    std::vector<Request> requests;
    TraceMeta meta;
    // Present for generated traces; consumed by filtered simulation and fitting tests.
    std::unordered_map<std::uint64_t, ContentInfo> contents;

    std::size_t measured_count() const;
    const std::string& ingress_name(std::uint32_t idx) const;

    // CSV with header time_days,content_id,ingress_id,pre_horizon.
    // A .gz suffix selects gzip compression.
    void write_csv(const std::string& path) const;
    static RequestTrace read_csv(const std::string& path);

    // Sidecar with per-content id, class, tau, volume.
    void write_contents_csv(const std::string& path) const;
    void read_contents_csv(const std::string& path);
};

}  // namespace snm
