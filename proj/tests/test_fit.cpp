#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "snm/fit.hpp"
#include "snm/generate.hpp"

using namespace snm;

namespace {

RequestTrace from_events(std::vector<Request> reqs, double horizon = 60.0,
                         std::vector<std::string> ingress = {"cache"}) {
    RequestTrace t;
    t.meta.horizon = horizon;
    t.meta.ingress_ids = std::move(ingress);
    std::sort(reqs.begin(), reqs.end(),
              [](const Request& a, const Request& b) { return a.time < b.time; });
    t.requests = std::move(reqs);
    return t;
}

std::vector<Request> content_block(std::uint64_t id, const std::vector<double>& times) {
    std::vector<Request> out;
    for (double t : times) out.push_back({t, id, 0, false});
    return out;
}

void append(std::vector<Request>& into, std::vector<Request> more) {
    into.insert(into.end(), more.begin(), more.end());
}

}  // namespace

TEST_CASE("life-span estimate on hand-built histograms") {
    // 20 requests spread 5 per day over 4 days: L = 20^2 / (4 * 5^2) = 4.
    std::vector<double> spread;
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i < 5; ++i) spread.push_back(10.0 + d + 0.1 + 0.15 * i);
    // 20 requests within one day: L = 20^2 / 20^2 = 1.
    std::vector<double> burst;
    for (int i = 0; i < 20; ++i) burst.push_back(30.0 + 0.04 * i);

    std::vector<Request> reqs;
    append(reqs, content_block(1, spread));
    append(reqs, content_block(2, burst));
    append(reqs, content_block(3, {5.0, 6.0, 7.0}));  // too few requests

    const auto stats = estimate_stats(from_events(std::move(reqs)));
    REQUIRE(stats.at(1).life_span.has_value());
    CHECK(*stats.at(1).life_span == doctest::Approx(4.0));
    CHECK(*stats.at(2).life_span == doctest::Approx(1.0));
    CHECK_FALSE(stats.at(3).life_span.has_value());
    CHECK(stats.at(3).count == 3);
    CHECK(stats.at(1).first == doctest::Approx(10.1));
    CHECK(stats.at(1).last == doctest::Approx(13.7).epsilon(1e-9));
}

TEST_CASE("stats do not depend on the request order") {
    Rng rng(3);
    std::vector<Request> reqs;
    for (std::uint64_t id = 1; id <= 40; ++id) {
        const double base = 30.0 * rng.uniform();
        const int n = 3 + static_cast<int>(rng.integer(40));
        for (int i = 0; i < n; ++i)
            reqs.push_back({base + 6.0 * rng.uniform(), id, 0, false});
    }
    auto sorted = from_events(reqs);
    std::shuffle(reqs.begin(), reqs.end(), std::mt19937(7));
    RequestTrace shuffled;
    shuffled.meta = sorted.meta;
    shuffled.requests = reqs;

    const auto a = estimate_stats(sorted);
    const auto b = estimate_stats(shuffled);
    REQUIRE(a.size() == b.size());
    for (const auto& [id, s] : a) {
        CHECK(b.at(id).count == s.count);
        CHECK(b.at(id).life_span.has_value() == s.life_span.has_value());
        if (s.life_span)
            CHECK(*b.at(id).life_span == doctest::Approx(*s.life_span).epsilon(1e-12));
    }
}

TEST_CASE("life-span estimates stay within their logical range") {
    const auto cfg = snm::test::single_class(
        300.0, PopularityProfile::for_life_span(ProfileKind::Exponential, 5.0),
        VolumeDistribution::pareto_with_mean(2.5, 20.0), 25.0, 12);
    const auto stats = estimate_stats(generate(cfg));
    for (const auto& [id, s] : stats) {
        if (!s.life_span) continue;
        const double span_days = s.last - s.first;
        CHECK(*s.life_span >= 1.0 - 1e-12);
        CHECK(*s.life_span <= span_days + 1.0 + 1e-12);
    }
}

TEST_CASE("classification thresholds") {
    const auto make = [](std::uint64_t count, std::optional<double> L) {
        ContentStats s;
        s.count = count;
        s.life_span = L;
        return s;
    };
    CHECK(classify_one(make(9, std::nullopt)) == 0);
    CHECK(classify_one(make(50, 1.5)) == 1);
    CHECK(classify_one(make(50, 2.0)) == 1);
    CHECK(classify_one(make(50, 3.5)) == 2);
    CHECK(classify_one(make(50, 5.0)) == 2);
    CHECK(classify_one(make(50, 6.0)) == 3);
    CHECK(classify_one(make(50, 8.0)) == 3);
    CHECK(classify_one(make(50, 9.0)) == 4);
    CHECK(classify_one(make(50, 13.0)) == 4);
    CHECK(classify_one(make(50, 20.0)) == 5);
}

TEST_CASE("partition shares sum to one and the CSV has six rows") {
    const auto cfg = snm::test::multi_class_scenario(3, 300.0, 20.0, 4);
    const auto stats = estimate_stats(generate(cfg));
    const auto part = classify(stats);
    double cshare = 0.0, rshare = 0.0;
    std::uint64_t contents = 0;
    for (const auto& c : part.classes) {
        cshare += c.content_share;
        rshare += c.request_share;
        contents += c.contents;
    }
    CHECK(cshare == doctest::Approx(1.0));
    CHECK(rshare == doctest::Approx(1.0));
    CHECK(contents == stats.size());
    CHECK(part.classes[0].contents > 0);  // the unpopular mass dominates
    CHECK(std::isnan(part.classes[0].mean_life_span));

    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "classes.csv").string();
    write_classification_csv(part, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "class,contents,requests,pct_videos,pct_reqs,mean_life_span_days,mean_volume");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == kFitClasses);
    fs::remove(path);
}

TEST_CASE("fit_config rebuilds rate, weights and volumes") {
    // short life spans relative to the window, so per-content request counts
    // are not truncated by the horizon
    TrafficConfig cfg;
    cfg.gamma = 400.0;
    cfg.horizon = 60.0;
    cfg.seed = 21;
    cfg.classes.push_back({PopularityProfile::for_life_span(ProfileKind::Exponential, 2.0),
                           VolumeDistribution::pareto_with_mean(2.5, 60.0), 0.5, "a", true});
    cfg.classes.push_back({PopularityProfile::for_life_span(ProfileKind::Exponential, 5.0),
                           VolumeDistribution::pareto_with_mean(2.5, 30.0), 0.5, "b", true});
    cfg.ingress = IngressModel::single();
    const auto trace = generate(cfg);
    const auto fitted = fit_config(trace, ProfileKind::Exponential, 60.0);

    double wsum = 0.0;
    for (const auto& c : fitted.classes) wsum += c.weight;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fitted.horizon == 60.0);
    // gamma: observed contents per day; burn-in spill-over adds ~25%
    CHECK(fitted.gamma == doctest::Approx(400.0).epsilon(0.35));

    // the overall mean volume roughly survives the round trip
    double true_ev = 0.0, fit_ev = 0.0;
    for (const auto& c : cfg.classes) true_ev += c.weight * c.volumes.mean();
    for (const auto& c : fitted.classes) fit_ev += c.weight * c.volumes.mean();
    CHECK(fit_ev == doctest::Approx(true_ev).epsilon(0.25));

    CHECK_THROWS(fit_config(trace, ProfileKind::Exponential, 0.0));
    RequestTrace tiny = from_events(content_block(1, {1.0, 2.0}));
    CHECK_THROWS(fit_config(tiny, ProfileKind::Exponential, 30.0));
}

TEST_CASE("fit recovers the life span of a single-class trace") {
    const auto cfg = snm::test::single_class(
        600.0, PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0),
        VolumeDistribution::pareto_with_mean(2.5, 50.0), 40.0, 31);
    const auto fitted = fit_config(generate(cfg), ProfileKind::Exponential, 40.0);
    // the class holding most requests should sit near the true life span
    double best_w = -1.0;
    const ContentClass* top = nullptr;
    for (const auto& c : fitted.classes) {
        const double reqs = c.weight * c.volumes.mean();
        if (reqs > best_w) {
            best_w = reqs;
            top = &c;
        }
    }
    REQUIRE(top != nullptr);
    CHECK(top->profile.life_span() == doctest::Approx(7.0).epsilon(0.35));
}

TEST_CASE("a low-volume-only trace collapses to the stationary class") {
    std::vector<Request> reqs;
    for (std::uint64_t id = 1; id <= 30; ++id)
        append(reqs, content_block(id, {1.0 + id * 0.3, 2.0 + id * 0.3}));
    const auto fitted = fit_config(from_events(std::move(reqs)), ProfileKind::Uniform, 60.0);
    REQUIRE(fitted.classes.size() == 1);
    CHECK(fitted.classes[0].weight == doctest::Approx(1.0));
    CHECK(fitted.classes[0].profile.kind() == ProfileKind::Uniform);
    CHECK(fitted.classes[0].profile.life_span() == doctest::Approx(60.0));
}

TEST_CASE("multi-ingress traces fit an unlocalized split") {
    auto cfg = snm::test::tree_scenario(false, 400.0, 20.0, 17);
    const auto topo = snm::test::two_level(4, 10, 10);
    const auto trace = generate(cfg, topo);
    const auto fitted = fit_config(trace, ProfileKind::Exponential, 20.0);
    REQUIRE(fitted.ingress.kind == IngressKind::Unlocalized);
    REQUIRE(fitted.ingress.node_weights.size() == 4);
    double sum = 0.0;
    for (double w : fitted.ingress.node_weights) {
        CHECK(w == doctest::Approx(0.25).epsilon(0.1));
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("time overlap of request intervals") {
    auto a = from_events(content_block(1, {0.0, 5.0, 10.0}));
    auto b = from_events(content_block(1, {2.0, 12.0}));
    CHECK(time_overlap_fraction(1, a, b) == doctest::Approx(8.0 / 12.0));
    CHECK(time_overlap_fraction(1, a, a) == doctest::Approx(1.0));
    auto c = from_events(content_block(1, {20.0, 25.0}));
    CHECK(time_overlap_fraction(1, a, c) == 0.0);
    CHECK_THROWS(time_overlap_fraction(99, a, b));
}

TEST_CASE("cross classification is row stochastic with a dominant diagonal") {
    const auto cfg = snm::test::multi_class_scenario(3, 300.0, 25.0, 8);
    const auto trace = generate(cfg);
    const auto m = cross_classify(trace, trace);
    for (int i = 0; i < kFitClasses; ++i) {
        double row = 0.0;
        for (int j = 0; j < kFitClasses; ++j) row += m[i][j];
        if (row > 0.0) {
            CHECK(row == doctest::Approx(1.0));
            CHECK(m[i][i] == doctest::Approx(1.0));  // identical traces: pure diagonal
        }
    }

    // two independent draws of the same process still mostly agree on the
    // extreme classes (0: unpopular, 5: long-lived)
    auto cfg2 = cfg;
    cfg2.seed = 9;
    const auto m2 = cross_classify(trace, generate(cfg2));
    CHECK(m2[0][0] > 0.5);
}

TEST_CASE("request count correlation") {
    const auto cfg = snm::test::multi_class_scenario(3, 300.0, 25.0, 8);
    const auto trace = generate(cfg);
    CHECK(request_count_correlation(trace, trace) == doctest::Approx(1.0));

    // doubling every request keeps a perfect linear relation
    auto doubled = trace;
    doubled.requests.insert(doubled.requests.end(), trace.requests.begin(), trace.requests.end());
    CHECK(request_count_correlation(trace, doubled) == doctest::Approx(1.0));

    // disjoint catalogues anti-correlate (each content is zero in one trace)
    std::vector<Request> ra, rb;
    Rng rng(5);
    for (std::uint64_t id = 1; id <= 50; ++id) {
        std::vector<double> times;
        for (std::uint64_t i = 0; i < 5 + rng.integer(20); ++i)
            times.push_back(20.0 * rng.uniform());
        append(id % 2 ? ra : rb, content_block(id, times));
    }
    CHECK(request_count_correlation(from_events(ra), from_events(rb)) < 0.0);

    RequestTrace tiny = from_events(content_block(1, {1.0}));
    CHECK_THROWS(request_count_correlation(tiny, tiny));
}
