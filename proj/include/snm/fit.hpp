#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "snm/trace.hpp"
#include "snm/traffic.hpp"

namespace snm {

inline constexpr int kFitClasses = 6;

// Per-content summary measured from a trace: request count, the histogram
// life-span estimate L = N^2 * bin / sum(n_i^2) on one-day bins (only when
// the count is large enough to trust it), and per-ingress counts.
struct ContentStats {
    std::uint64_t id = 0;
    std::uint64_t count = 0;
    std::optional<double> life_span;  // days; present only when count >= 10
    double first = 0.0;               // first measured request time, days
    double last = 0.0;
    std::map<int, std::uint64_t> per_ingress;
};

using StatsMap = std::unordered_map<std::uint64_t, ContentStats>;

StatsMap estimate_stats(const RequestTrace& trace);

// Class 0 collects the low-volume contents (count < 10); classes 1-5 split
// the rest by estimated life-span: <=2, (2,5], (5,8], (8,13], >13 days.
int classify_one(const ContentStats& s);

struct ClassSummary {
    int index = 0;
    std::uint64_t contents = 0;
    std::uint64_t requests = 0;
    double content_share = 0.0;
    double request_share = 0.0;
    double mean_life_span = 0.0;  // NaN for class 0
    double mean_volume = 0.0;
};

struct ClassPartition {
    std::array<ClassSummary, kFitClasses> classes;
    std::unordered_map<std::uint64_t, int> membership;
};

ClassPartition classify(const StatsMap& stats);

void write_classification_csv(const ClassPartition& partition, const std::string& path);

// Rebuild a TrafficConfig from a trace: classes 1-4 get the requested profile
// shape with delta matched to the class-mean life-span and an empirical
// volume law; classes 0 and 5 are treated as stationary (uniform emission
// over the whole horizon). gamma and weights come from observed content
// counts per unit time; multi-ingress traces map to an unlocalized split
// proportional to per-ingress request volume.
TrafficConfig fit_config(const RequestTrace& trace, ProfileKind kind, double horizon);

// |intersection| / |union| of the two [first, last] request intervals.
double time_overlap_fraction(std::uint64_t content_id, const RequestTrace& a,
                             const RequestTrace& b);

// Entry (i, j): fraction of common contents classed i in `a` that are
// classed j in `b`. Rows with no contents stay all-zero.
std::array<std::array<double, kFitClasses>, kFitClasses> cross_classify(
    const RequestTrace& a, const RequestTrace& b);

// Pearson correlation of per-content request counts over the union
// catalogue; contents absent from one trace count zero there.
double request_count_correlation(const RequestTrace& a, const RequestTrace& b);

}  // namespace snm
