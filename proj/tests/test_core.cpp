#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "snm/profile.hpp"
#include "snm/quadrature.hpp"
#include "snm/svg.hpp"
#include "snm/topology.hpp"
#include "snm/traffic.hpp"
#include "snm/volume.hpp"

using namespace snm;

TEST_CASE("quadrature integrates known functions") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    r = integrate([](double x) { return std::exp(-x); }, 0.0, 50.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    // integrable endpoint singularity
    r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-9, 1e-14);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("gauss-legendre rules are exact on polynomials") {
    for (int n : {4, 16, 64}) {
        const auto gl = gauss_legendre(n);
        REQUIRE(gl.nodes.size() == static_cast<std::size_t>(n));
        double w_sum = 0.0, x2 = 0.0;
        for (int i = 0; i < n; ++i) {
            w_sum += gl.weights[i];
            x2 += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
        }
        CHECK(w_sum == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("profile closed forms match the tabled examples") {
    CHECK(PopularityProfile::uniform(2.0).density(1.0) == doctest::Approx(0.5));
    CHECK(PopularityProfile::uniform(2.0).density(-0.5) == 0.0);
    CHECK(PopularityProfile::exponential(1.0).density(0.0) == doctest::Approx(1.0));
    CHECK(PopularityProfile::uniform(2.0).cdf(1.0) == doctest::Approx(0.5));
    CHECK(PopularityProfile::exponential(1.0).cdf(1e9) == doctest::Approx(1.0));
    // Lambda(t) = 1 - (t/delta + 1)^{1-zeta}: at t = delta = 4, zeta = 3 -> 0.75
    CHECK(PopularityProfile::power_law(3.0, 4.0).cdf(4.0) == doctest::Approx(0.75));
    CHECK(PopularityProfile::uniform(3.0).life_span() == doctest::Approx(3.0));
    CHECK(PopularityProfile::exponential(3.5).life_span() == doctest::Approx(7.0));
    CHECK(PopularityProfile::power_law(3.0, 4.0).life_span() == doctest::Approx(5.0));
}

TEST_CASE("for_life_span inverts the life-span formulas") {
    CHECK(PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0).delta() ==
          doctest::Approx(3.5));
    CHECK(PopularityProfile::for_life_span(ProfileKind::Uniform, 7.0).delta() ==
          doctest::Approx(7.0));
    const auto p = PopularityProfile::for_life_span(ProfileKind::PowerLaw, 5.0, 3.0);
    CHECK(p.delta() == doctest::Approx(4.0).epsilon(1e-12));
    for (ProfileKind k : {ProfileKind::Uniform, ProfileKind::Exponential, ProfileKind::PowerLaw}) {
        const auto q = PopularityProfile::for_life_span(
            k, 11.5, k == ProfileKind::PowerLaw ? std::optional<double>(2.25) : std::nullopt);
        CHECK(q.life_span() == doctest::Approx(11.5).epsilon(1e-12));
    }
    CHECK_THROWS(PopularityProfile::for_life_span(ProfileKind::PowerLaw, 5.0, 0.9));
}

TEST_CASE("life-span equals 1/integral(lambda^2) numerically on random parameters") {
    Rng rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const double delta = 0.2 + 20.0 * rng.uniform();
        PopularityProfile p = PopularityProfile::uniform(delta);
        switch (trial % 3) {
            case 0: p = PopularityProfile::uniform(delta); break;
            case 1: p = PopularityProfile::exponential(delta); break;
            case 2: p = PopularityProfile::power_law(1.5 + 3.0 * rng.uniform(), delta); break;
        }
        // geometric panels: the power-law tail can span many decades
        const double hi = p.tail_age(1e-13);
        std::vector<double> knots{0.0};
        for (double k = std::min(delta, hi); k < hi; k *= 4.0) knots.push_back(k);
        knots.push_back(hi);
        const auto sq = integrate_panels(
            [&](double t) { return p.density(t) * p.density(t); }, knots, 1e-11, 1e-16);
        REQUIRE(sq.converged);
        CHECK(1.0 / sq.value == doctest::Approx(p.life_span()).epsilon(1e-6));
        // normalization
        const auto mass =
            integrate_panels([&](double t) { return p.density(t); }, knots, 1e-9, 1e-14);
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("cdf is the antiderivative of density") {
    for (const auto& p :
         {PopularityProfile::uniform(3.0), PopularityProfile::exponential(2.0),
          PopularityProfile::power_law(2.5, 1.5)}) {
        const double h = 1e-6;
        for (double t = 0.05; t < 2.9; t += 0.1) {
            if (p.kind() == ProfileKind::Uniform && std::fabs(t - p.delta()) < 0.01) continue;
            const double fd = (p.cdf(t + h) - p.cdf(t - h)) / (2.0 * h);
            CHECK(fd == doctest::Approx(p.density(t)).epsilon(1e-6));
        }
        // quantile round trip
        for (double u = 0.0; u < 1.0; u += 0.09)
            CHECK(p.cdf(p.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    }
}

TEST_CASE("volume moments match closed forms") {
    CHECK(VolumeDistribution::pareto(3.0, 2.0).mean() == doctest::Approx(3.0));
    CHECK(VolumeDistribution::deterministic(5.0).second_moment() == doctest::Approx(25.0));
    const auto p = VolumeDistribution::pareto_with_mean(2.5, 3.0);
    CHECK(p.v_min() == doctest::Approx(1.8));
    CHECK(p.mean() == doctest::Approx(3.0));
    CHECK_THROWS_AS(VolumeDistribution::pareto(2.0, 1.0).second_moment(), std::domain_error);
    CHECK_THROWS_AS(VolumeDistribution::pareto(1.5, 1.0).second_moment(), std::domain_error);
    CHECK(VolumeDistribution::pareto(3.0, 2.0).second_moment() == doctest::Approx(12.0));
    const auto e = VolumeDistribution::empirical({1.0, 2.0, 3.0});
    CHECK(e.mean() == doctest::Approx(2.0));
    CHECK(e.second_moment() == doctest::Approx(14.0 / 3.0));
}

TEST_CASE("truncated pareto renormalizes and hits a requested mean") {
    const auto t = VolumeDistribution::truncated_pareto_with_mean(2.5, 1.61, 10.0);
    CHECK(t.mean() == doctest::Approx(1.61).epsilon(1e-9));
    CHECK(t.v_min() < 1.61);
    // v_max -> infinity recovers the untruncated law
    const auto far = VolumeDistribution::truncated_pareto(2.5, 1.8, 1e12);
    const auto plain = VolumeDistribution::pareto(2.5, 1.8);
    CHECK(far.mean() == doctest::Approx(plain.mean()).epsilon(1e-6));
    CHECK(far.mgf(-0.3) == doctest::Approx(plain.mgf(-0.3)).epsilon(1e-6));
}

TEST_CASE("mgf against a Monte-Carlo oracle") {
    const auto d = VolumeDistribution::pareto(3.0, 2.0);
    const double x = -0.5;
    const auto mc = snm::test::monte_carlo(
        [&](Rng& r) { return std::exp(x * d.quantile(r.uniform())); }, 10'000'000, 7);
    const double exact = d.mgf(x);
    CHECK(std::fabs(exact - mc.mean) < 3.0 * mc.se);
    CHECK(VolumeDistribution::deterministic(1.0).mgf(-1.0) ==
          doctest::Approx(std::exp(-1.0)));
    CHECK(d.mgf(0.0) == 1.0);
    CHECK_THROWS(d.mgf(0.5));
}

TEST_CASE("mgf derivatives and monotonicity") {
    for (const auto& d : {VolumeDistribution::pareto(2.5, 1.8),
                          VolumeDistribution::truncated_pareto(2.5, 1.0, 10.0),
                          VolumeDistribution::empirical({1.0, 4.0, 9.0})}) {
        double prev = 0.0;
        CHECK(d.mgf(0.0) == 1.0);
        for (double x = -3.0; x <= -0.25; x += 0.25) {
            const double v = d.mgf(x);
            CHECK(v > 0.0);
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= prev);  // non-decreasing in x
            prev = v;
            const double h = 1e-5;
            const double fd = (d.mgf(x + h) - d.mgf(x - h)) / (2.0 * h);
            CHECK(d.mgf_derivative(x) == doctest::Approx(fd).epsilon(1e-6));
            const double fd2 =
                (d.mgf_derivative(x + h) - d.mgf_derivative(x - h)) / (2.0 * h);
            CHECK(d.mgf_second_derivative(x) == doctest::Approx(fd2).epsilon(1e-5));
            CHECK(d.mgf_derivative(x) >= 0.0);
        }
    }
}

TEST_CASE("traffic config validation and JSON round trip") {
    auto cfg = snm::test::multi_class_scenario(3);
    cfg.validate();
    const auto text = cfg.to_json_string();
    const auto back = TrafficConfig::from_json_string(text);
    CHECK(back.hash() == cfg.hash());
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.classes.size() == cfg.classes.size());
    CHECK(back.classes[0].volumes.kind() == VolumeKind::TruncatedPareto);
    CHECK(back.classes[2].profile.life_span() == doctest::Approx(7.0));

    auto bad = cfg;
    bad.classes[0].weight = 0.5;  // weights no longer sum to 1
    CHECK_THROWS(bad.validate());
}

TEST_CASE("default burn-in rule") {
    auto cfg = snm::test::single_class(
        10.0, PopularityProfile::for_life_span(ProfileKind::Exponential, 7.0),
        VolumeDistribution::deterministic(2.0), 30.0, 1);
    CHECK(cfg.effective_burn_in() == doctest::Approx(21.0));  // 3 x L
    cfg.classes[0].profile = PopularityProfile::for_life_span(ProfileKind::Exponential, 500.0);
    CHECK(cfg.effective_burn_in() == doctest::Approx(300.0));  // capped at 10 x horizon
    cfg.burn_in = 5.0;
    CHECK(cfg.effective_burn_in() == doctest::Approx(5.0));
}

TEST_CASE("topology validation and round trip") {
    auto topo = snm::test::two_level(3, 10, 100);
    CHECK(topo.leaves().size() == 3);
    CHECK(topo.is_leaf("leaf0"));
    CHECK_FALSE(topo.is_leaf("root"));
    CHECK(topo.parent("leaf1") == "root");
    CHECK(topo.parent("root").empty());
    const auto back = CacheTopology::from_json_string(topo.to_json_string());
    CHECK(back.leaves() == topo.leaves());
    CHECK(back.node("root").capacity == 100);

    // not a tree: shared child
    CHECK_THROWS(CacheTopology({{"r", 1, {"a", "b"}}, {"a", 1, {"c"}}, {"b", 1, {"c"}},
                                {"c", 1, {}}},
                               "r"));
    // unreachable node
    CHECK_THROWS(CacheTopology({{"r", 1, {}}, {"x", 1, {}}}, "r"));
    // negative capacity
    CHECK_THROWS(CacheTopology({{"r", -2, {}}}, "r"));

    const auto resized = topo.with_capacities({{"root", 7}});
    CHECK(resized.node("root").capacity == 7);
    CHECK(resized.node("leaf0").capacity == 10);
}

TEST_CASE("svg renderer emits well-formed charts") {
    SvgChart chart;
    chart.title = "hit probability";
    chart.x_label = "C";
    chart.y_label = "p_hit";
    chart.log_x = true;
    chart.series.push_back({"model", {100.0, 1000.0, 10000.0}, {0.01, 0.1, 0.4}, false, ""});
    chart.series.push_back({"sim", {100.0, 1000.0, 10000.0}, {0.012, 0.09, 0.41}, true, ""});
    const auto svg = chart.render();
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("hit probability") != std::string::npos);
    const auto path = std::filesystem::temp_directory_path() / "snm_chart_test.svg";
    chart.write(path.string());
    CHECK(std::filesystem::file_size(path) > 500);
    std::filesystem::remove(path);
}
