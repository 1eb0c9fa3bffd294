#include "snm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace snm {

namespace {
constexpr std::uint64_t kReliableCount = 10;
constexpr double kBinDays = 1.0;
constexpr double kDefaultZeta = 3.0;
}  // namespace

StatsMap estimate_stats(const RequestTrace& trace) {
    if (trace.requests.empty()) throw std::invalid_argument("estimate_stats: empty trace");
    StatsMap stats;
    // One-day histogram bins anchored at each content's first request, so the
    // life-span estimate is invariant under time shifts of the whole trace
    // and under permutations of the request order.
    for (const auto& r : trace.requests) {
        if (r.pre_horizon) continue;
        auto [it, fresh] = stats.try_emplace(r.content_id);
        auto& s = it->second;
        if (fresh) {
            s.id = r.content_id;
            s.first = r.time;
            s.last = r.time;
        }
        s.count += 1;
        s.first = std::min(s.first, r.time);
        s.last = std::max(s.last, r.time);
        ++s.per_ingress[static_cast<int>(r.ingress)];
    }
    std::unordered_map<std::uint64_t, std::unordered_map<std::int64_t, std::uint64_t>> bins;
    for (const auto& r : trace.requests) {
        if (r.pre_horizon) continue;
        const auto& s = stats.at(r.content_id);
        const auto bin = static_cast<std::int64_t>(std::floor((r.time - s.first) / kBinDays));
        ++bins[r.content_id][bin];
    }
    for (auto& [id, s] : stats) {
        if (s.count < kReliableCount) continue;
        double sq = 0.0;
        for (const auto& [bin, n] : bins[id]) sq += static_cast<double>(n) * static_cast<double>(n);
        const double n = static_cast<double>(s.count);
        s.life_span = n * n * kBinDays / sq;  // plug-in of L = 1 / integral(lambda^2)
    }
    return stats;
}

int classify_one(const ContentStats& s) {
    if (s.count < kReliableCount) return 0;
    const double L = s.life_span.value_or(0.0);
    if (L <= 2.0) return 1;
    if (L <= 5.0) return 2;
    if (L <= 8.0) return 3;
    if (L <= 13.0) return 4;
    return 5;
}

ClassPartition classify(const StatsMap& stats) {
    ClassPartition part;
    for (int i = 0; i < kFitClasses; ++i) part.classes[i].index = i;
    std::uint64_t total_contents = 0, total_requests = 0;
    std::array<double, kFitClasses> sum_L{}, sum_V{};
    for (const auto& [id, s] : stats) {
        const int k = classify_one(s);
        part.membership[id] = k;
        auto& c = part.classes[k];
        ++c.contents;
        c.requests += s.count;
        sum_V[k] += static_cast<double>(s.count);
        if (s.life_span) sum_L[k] += *s.life_span;
        ++total_contents;
        total_requests += s.count;
    }
    for (int k = 0; k < kFitClasses; ++k) {
        auto& c = part.classes[k];
        if (total_contents)
            c.content_share = static_cast<double>(c.contents) / static_cast<double>(total_contents);
        if (total_requests)
            c.request_share = static_cast<double>(c.requests) / static_cast<double>(total_requests);
        c.mean_volume = c.contents ? sum_V[k] / static_cast<double>(c.contents) : 0.0;
        c.mean_life_span = (k > 0 && c.contents)
                               ? sum_L[k] / static_cast<double>(c.contents)
                               : std::numeric_limits<double>::quiet_NaN();
    }
    return part;
}

void write_classification_csv(const ClassPartition& partition, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "class,contents,requests,pct_videos,pct_reqs,mean_life_span_days,mean_volume\n";
    char buf[256];
    for (const auto& c : partition.classes) {
        if (std::isnan(c.mean_life_span))
            std::snprintf(buf, sizeof(buf), "%d,%llu,%llu,%.6g,%.6g,,%.6g\n", c.index,
                          static_cast<unsigned long long>(c.contents),
                          static_cast<unsigned long long>(c.requests), 100.0 * c.content_share,
                          100.0 * c.request_share, c.mean_volume);
        else
            std::snprintf(buf, sizeof(buf), "%d,%llu,%llu,%.6g,%.6g,%.6g,%.6g\n", c.index,
                          static_cast<unsigned long long>(c.contents),
                          static_cast<unsigned long long>(c.requests), 100.0 * c.content_share,
                          100.0 * c.request_share, c.mean_life_span, c.mean_volume);
        out << buf;
    }
}

TrafficConfig fit_config(const RequestTrace& trace, ProfileKind kind, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("fit_config: horizon must be > 0");
    const auto stats = estimate_stats(trace);
    if (stats.size() < 2)
        throw std::invalid_argument("fit_config: trace has fewer than two contents");
    const auto part = classify(stats);

    double span = trace.meta.horizon;
    if (!(span > 0.0)) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& [id, s] : stats) {
            lo = std::min(lo, s.first);
            hi = std::max(hi, s.last);
        }
        span = hi - lo;
    }
    if (!(span > 0.0)) throw std::invalid_argument("fit_config: trace spans zero time");

    std::array<std::vector<double>, kFitClasses> volumes;
    for (const auto& [id, s] : stats)
        volumes[part.membership.at(id)].push_back(static_cast<double>(s.count));

    TrafficConfig cfg;
    cfg.gamma = static_cast<double>(stats.size()) / span;
    cfg.horizon = horizon;
    for (int k = 0; k < kFitClasses; ++k) {
        const auto& c = part.classes[k];
        if (!c.contents) continue;
        // Classes 0 and 5 are stationary: emit uniformly over the horizon.
        const PopularityProfile profile =
            (k == 0 || k == 5)
                ? PopularityProfile::uniform(horizon)
                : PopularityProfile::for_life_span(kind, c.mean_life_span,
                                                   kind == ProfileKind::PowerLaw
                                                       ? std::optional<double>(kDefaultZeta)
                                                       : std::nullopt);
        cfg.classes.push_back({profile, VolumeDistribution::empirical(volumes[k]),
                               c.content_share, "class" + std::to_string(k), true});
    }

    if (trace.meta.ingress_ids.size() > 1) {
        std::vector<double> shares(trace.meta.ingress_ids.size(), 0.0);
        double total = 0.0;
        for (const auto& [id, s] : stats)
            for (const auto& [ing, n] : s.per_ingress) {
                shares[static_cast<std::size_t>(ing)] += static_cast<double>(n);
                total += static_cast<double>(n);
            }
        for (auto& v : shares) v /= total;
        cfg.ingress = IngressModel::unlocalized(std::move(shares));
    } else {
        cfg.ingress = IngressModel::single();
    }
    cfg.validate();
    return cfg;
}

namespace {

// [first, last] measured-request interval of one content, or nullopt.
std::optional<std::pair<double, double>> content_interval(std::uint64_t id,
                                                          const RequestTrace& t) {
    std::optional<std::pair<double, double>> iv;
    for (const auto& r : t.requests) {
        if (r.pre_horizon || r.content_id != id) continue;
        if (!iv)
            iv = {r.time, r.time};
        else {
            iv->first = std::min(iv->first, r.time);
            iv->second = std::max(iv->second, r.time);
        }
    }
    return iv;
}

}  // namespace

double time_overlap_fraction(std::uint64_t content_id, const RequestTrace& a,
                             const RequestTrace& b) {
    const auto ia = content_interval(content_id, a);
    const auto ib = content_interval(content_id, b);
    if (!ia || !ib)
        throw std::invalid_argument("time_overlap_fraction: content missing from a trace");
    const double inter =
        std::max(0.0, std::min(ia->second, ib->second) - std::max(ia->first, ib->first));
    const double uni = std::max(ia->second, ib->second) - std::min(ia->first, ib->first);
    if (uni <= 0.0) return 1.0;  // both intervals degenerate and coincident
    return inter / uni;
}

std::array<std::array<double, kFitClasses>, kFitClasses> cross_classify(const RequestTrace& a,
                                                                        const RequestTrace& b) {
    const auto sa = estimate_stats(a);
    const auto sb = estimate_stats(b);
    const auto pa = classify(sa);
    const auto pb = classify(sb);
    std::array<std::array<double, kFitClasses>, kFitClasses> m{};
    std::array<double, kFitClasses> row_total{};
    for (const auto& [id, ka] : pa.membership) {
        const auto it = pb.membership.find(id);
        if (it == pb.membership.end()) continue;
        m[ka][it->second] += 1.0;
        row_total[ka] += 1.0;
    }
    for (int i = 0; i < kFitClasses; ++i)
        if (row_total[i] > 0.0)
            for (int j = 0; j < kFitClasses; ++j) m[i][j] /= row_total[i];
    return m;
}

double request_count_correlation(const RequestTrace& a, const RequestTrace& b) {
    std::unordered_map<std::uint64_t, std::pair<double, double>> counts;
    for (const auto& r : a.requests)
        if (!r.pre_horizon) counts[r.content_id].first += 1.0;
    for (const auto& r : b.requests)
        if (!r.pre_horizon) counts[r.content_id].second += 1.0;
    const auto n = static_cast<double>(counts.size());
    if (counts.size() < 2)
        throw std::invalid_argument("request_count_correlation: needs >= 2 contents");
    double mx = 0.0, my = 0.0;
    for (const auto& [id, c] : counts) {
        mx += c.first;
        my += c.second;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    bool identical = true;
    for (const auto& [id, c] : counts) {
        const double dx = c.first - mx, dy = c.second - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
        if (c.first != c.second) identical = false;
    }
    if (sxx == 0.0 || syy == 0.0) return identical ? 1.0 : 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace snm
