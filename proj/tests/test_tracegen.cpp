#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "helpers.hpp"
#include "snm/generate.hpp"
#include "snm/trace.hpp"
#include "snm/warp.hpp"

using namespace snm;
using snm::test::single_class;
using snm::test::two_level;

namespace {

TrafficConfig small_config(std::uint64_t seed) {
    return single_class(2000.0,
                        PopularityProfile::for_life_span(ProfileKind::Uniform, 7.0),
                        VolumeDistribution::pareto_with_mean(3.0, 3.0), 30.0, seed);
}

}  // namespace

TEST_CASE("zero rate gives an empty trace") {
    auto cfg = small_config(1);
    cfg.gamma = 0.0;
    const auto t = generate(cfg);
    CHECK(t.requests.empty());
}

TEST_CASE("generation is deterministic in the seed") {
    const auto a = generate(small_config(42));
    const auto b = generate(small_config(42));
    REQUIRE(a.requests.size() == b.requests.size());
    for (std::size_t i = 0; i < a.requests.size(); ++i) {
        CHECK(a.requests[i].time == b.requests[i].time);
        CHECK(a.requests[i].content_id == b.requests[i].content_id);
    }
    const auto c = generate(small_config(43));
    CHECK(a.requests.size() != c.requests.size());
}

TEST_CASE("total request count matches the compound-Poisson moments") {
    // contents ~ Poisson(gamma T); per-content count ~ Poisson(V):
    // E[total] = gamma T E[V], Var[total] = gamma T (E[V] + E[V^2]).
    const auto cfg = small_config(7);
    const double T = cfg.horizon + cfg.effective_burn_in();
    const double ev = 3.0, ev2 = VolumeDistribution::pareto_with_mean(3.0, 3.0).second_moment();
    const double mean = cfg.gamma * T * ev;
    const double sd = std::sqrt(cfg.gamma * T * (ev + ev2));
    const auto t = generate(cfg);
    CHECK(std::fabs(static_cast<double>(t.requests.size()) - mean) < 3.0 * sd);

    // measured-window rate estimates gamma E[V] within 3 sigma as well
    const double measured = static_cast<double>(t.measured_count());
    const double mean_m = cfg.gamma * cfg.horizon * ev;
    const double sd_m = std::sqrt(cfg.gamma * cfg.horizon * (ev + ev2));
    CHECK(std::fabs(measured - mean_m) < 4.0 * sd_m);  // window edges add slack
}

TEST_CASE("requests are time sorted and flagged outside the horizon") {
    const auto t = generate(small_config(3));
    for (std::size_t i = 1; i < t.requests.size(); ++i)
        CHECK(t.requests[i - 1].time <= t.requests[i].time);
    for (const auto& r : t.requests) {
        const bool outside = r.time < 0.0 || r.time > t.meta.horizon;
        CHECK(r.pre_horizon == outside);
    }
}

TEST_CASE("fully localized contents stick to one leaf") {
    auto cfg = snm::test::tree_scenario(true, 500.0, 10.0, 11);
    const auto topo = two_level(8, 10, 10);
    const auto t = generate(cfg, topo);
    std::map<std::uint64_t, std::set<std::uint32_t>> seen;
    for (const auto& r : t.requests) seen[r.content_id].insert(r.ingress);
    std::set<std::uint32_t> used;
    for (const auto& [id, s] : seen) {
        CHECK(s.size() == 1);
        used.insert(*s.begin());
    }
    CHECK(used.size() == 8);  // all leaves get traffic
}

TEST_CASE("unlocalized requests spread over leaves per request") {
    auto cfg = snm::test::tree_scenario(false, 500.0, 10.0, 11);
    const auto topo = two_level(4, 10, 10);
    const auto t = generate(cfg, topo);
    std::map<std::uint64_t, std::set<std::uint32_t>> seen;
    std::map<std::uint64_t, std::size_t> count;
    for (const auto& r : t.requests) {
        seen[r.content_id].insert(r.ingress);
        ++count[r.content_id];
    }
    std::size_t spread = 0, popular = 0;
    for (const auto& [id, s] : seen)
        if (count[id] >= 20) {
            ++popular;
            if (s.size() >= 3) ++spread;
        }
    REQUIRE(popular > 20);
    CHECK(spread == popular);  // a 20+-request content hits >= 3 of 4 leaves a.s.
}

TEST_CASE("explicit split rejects wrong dimensions") {
    auto cfg = small_config(1);
    cfg.ingress = IngressModel::explicit_split({{1.0, {0.5, 0.5}}});
    const auto topo = two_level(3, 1, 1);
    CHECK_THROWS(generate(cfg, topo));
}

TEST_CASE("per-content request times follow the profile law (KS)") {
    auto cfg = single_class(20.0, PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0),
                            VolumeDistribution::deterministic(1500.0), 30.0, 5);
    const auto t = generate(cfg);
    std::map<std::uint64_t, std::vector<double>> times;
    for (const auto& r : t.requests) times[r.content_id].push_back(r.time);
    const auto& prof = cfg.classes[0].profile;
    std::size_t tested = 0, passed = 0;
    for (auto& [id, ts] : times) {
        if (ts.size() < 1000) continue;
        const double tau = t.contents.at(id).tau;
        std::vector<double> u;
        for (double x : ts) u.push_back(prof.cdf(x - tau));
        std::sort(u.begin(), u.end());
        const double n = static_cast<double>(u.size());
        double ks = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double hi = static_cast<double>(i + 1) / n - u[i];
            const double lo = u[i] - static_cast<double>(i) / n;
            ks = std::max({ks, hi, lo});
        }
        ++tested;
        if (ks < 1.63 / std::sqrt(n)) ++passed;  // 1% critical value
    }
    REQUIRE(tested >= 20);
    CHECK(static_cast<double>(passed) >= 0.95 * static_cast<double>(tested));
}

TEST_CASE("trace CSV round trip, plain and gzip") {
    const auto t = generate(small_config(9));
    namespace fs = std::filesystem;
    for (const char* name : {"trace_rt.csv", "trace_rt.csv.gz"}) {
        const auto path = (fs::temp_directory_path() / name).string();
        t.write_csv(path);
        const auto back = RequestTrace::read_csv(path);
        REQUIRE(back.requests.size() == t.requests.size());
        for (std::size_t i = 0; i < t.requests.size(); i += 997) {
            CHECK(back.requests[i].time == doctest::Approx(t.requests[i].time).epsilon(1e-9));
            CHECK(back.requests[i].content_id == t.requests[i].content_id);
            CHECK(back.requests[i].pre_horizon == t.requests[i].pre_horizon);
        }
        fs::remove(path);
    }
    const auto side = (fs::temp_directory_path() / "trace_rt_contents.csv").string();
    t.write_contents_csv(side);
    RequestTrace shell;
    shell.read_contents_csv(side);
    CHECK(shell.contents.size() == t.contents.size());
    fs::remove(side);
}

TEST_CASE("warp preserves ids and order") {
    const auto t = generate(small_config(13));
    const auto w = VirtualTimeWarp({{0.0, 0.0}, {10.0, 4.0}, {20.0, 16.0}, {30.0, 30.0}});
    const auto t2 = warp(t, w);
    REQUIRE(t2.requests.size() == t.requests.size());
    std::map<std::uint64_t, std::size_t> before, after;
    for (std::size_t i = 0; i < t.requests.size(); ++i) {
        CHECK(t2.requests[i].content_id == t.requests[i].content_id);
        ++before[t.requests[i].content_id];
        ++after[t2.requests[i].content_id];
    }
    CHECK(before == after);
    for (std::size_t i = 1; i < t2.requests.size(); ++i)
        CHECK(t2.requests[i - 1].time <= t2.requests[i].time);

    const auto id = VirtualTimeWarp::identity();
    const auto t3 = warp(t, id);
    for (std::size_t i = 0; i < t.requests.size(); i += 1009)
        CHECK(t3.requests[i].time == t.requests[i].time);
}

TEST_CASE("warp validates its knots") {
    CHECK_THROWS(VirtualTimeWarp({{0.0, 0.0}, {1.0, 2.0}, {0.5, 3.0}}));   // t not increasing
    CHECK_THROWS(VirtualTimeWarp({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}}));   // w not increasing
    CHECK_THROWS(VirtualTimeWarp({{0.0, 0.0}, {2.0, 1.0}}));               // mean slope != 1
    CHECK_THROWS(VirtualTimeWarp({{1.0, 1.0}, {2.0, 2.0}}));               // must start at 0
    CHECK_NOTHROW(VirtualTimeWarp({{0.0, 0.0}, {1.0, 0.25}, {2.0, 2.0}}));
}

TEST_CASE("k-slice shuffle keeps timestamps and id multisets per slice") {
    const auto t = generate(small_config(17));
    const auto n = t.requests.size();

    const auto same = shuffle_k_slices(t, n, 1);  // singleton slices
    for (std::size_t i = 0; i < n; i += 499)
        CHECK(same.requests[i].content_id == t.requests[i].content_id);

    for (std::size_t k : {std::size_t{1}, std::size_t{24}}) {
        const auto sh = shuffle_k_slices(t, k, 1);
        REQUIRE(sh.requests.size() == n);
        const std::size_t per = n / k;
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t lo = s * per;
            const std::size_t hi = (s + 1 == k) ? n : lo + per;
            std::multiset<std::uint64_t> a, b;
            for (std::size_t i = lo; i < hi; ++i) {
                a.insert(t.requests[i].content_id);
                b.insert(sh.requests[i].content_id);
                CHECK(sh.requests[i].time == t.requests[i].time);
            }
            CHECK(a == b);
        }
        // determinism + non-triviality
        const auto sh2 = shuffle_k_slices(t, k, 1);
        const auto sh3 = shuffle_k_slices(t, k, 2);
        std::size_t same12 = 0, same13 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            same12 += sh.requests[i].content_id == sh2.requests[i].content_id;
            same13 += sh.requests[i].content_id == sh3.requests[i].content_id;
        }
        CHECK(same12 == n);
        CHECK(same13 < n);
    }
}

TEST_CASE("warm window clips old warm-up requests but keeps the population") {
    auto cfg = small_config(21);
    GenerateOptions opts;
    opts.warm_window = 2.0;
    const auto t = generate(cfg, CacheTopology::single(10), opts);
    for (const auto& r : t.requests) CHECK(r.time >= -2.0);
    CHECK(t.measured_count() > 0);
    // same seed, unclipped: measured requests identical
    const auto full = generate(cfg);
    CHECK(t.measured_count() == full.measured_count());
}
