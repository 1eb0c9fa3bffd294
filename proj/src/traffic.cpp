#include "snm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace snm {

using nlohmann::json;

std::string to_string(IngressKind k) {
    switch (k) {
        case IngressKind::SingleCache: return "single";
        case IngressKind::Unlocalized: return "unlocalized";
        case IngressKind::FullyLocalized: return "fully_localized";
        case IngressKind::ExplicitSplit: return "explicit_split";
    }
    return "?";
}

IngressKind ingress_kind_from_string(const std::string& s) {
    if (s == "single") return IngressKind::SingleCache;
    if (s == "unlocalized") return IngressKind::Unlocalized;
    if (s == "fully_localized") return IngressKind::FullyLocalized;
    if (s == "explicit_split") return IngressKind::ExplicitSplit;
    throw std::invalid_argument("unknown ingress kind: " + s);
}

IngressModel IngressModel::single() { return {}; }

IngressModel IngressModel::unlocalized(std::vector<double> node_weights) {
    IngressModel m;
    m.kind = IngressKind::Unlocalized;
    m.node_weights = std::move(node_weights);
    return m;
}

IngressModel IngressModel::fully_localized() {
    IngressModel m;
    m.kind = IngressKind::FullyLocalized;
    return m;
}

IngressModel IngressModel::explicit_split(std::vector<SplitChoice> choices) {
    IngressModel m;
    m.kind = IngressKind::ExplicitSplit;
    m.split_choices = std::move(choices);
    for (const auto& c : m.split_choices) {
        double s = 0.0;
        for (double p : c.split) {
            if (p < 0.0) throw std::invalid_argument("explicit split: negative entry");
            s += p;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw std::invalid_argument("explicit split: vector must sum to 1");
    }
    return m;
}

double TrafficConfig::effective_burn_in() const {
    if (burn_in) return *burn_in;
    double max_l = 0.0;
    for (const auto& c : classes) max_l = std::max(max_l, c.profile.life_span());
    return std::min(3.0 * max_l, 10.0 * horizon);
}

double TrafficConfig::mean_volume() const {
    double m = 0.0;
    for (const auto& c : classes) m += c.weight * c.volumes.mean();
    return m;
}

double TrafficConfig::request_rate() const { return gamma * mean_volume(); }

void TrafficConfig::validate() const {
    if (gamma < 0.0) throw std::invalid_argument("config: gamma must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
    if (burn_in && *burn_in < 0.0) throw std::invalid_argument("config: burn_in must be >= 0");
    if (classes.empty()) throw std::invalid_argument("config: no content classes");
    double wsum = 0.0;
    for (const auto& c : classes) {
        if (c.weight < 0.0) throw std::invalid_argument("config: negative class weight");
        wsum += c.weight;
    }
    if (std::fabs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("config: class weights must sum to 1");
}

namespace {

json profile_to_json(const PopularityProfile& p) {
    json j{{"kind", to_string(p.kind())}, {"delta", p.delta()}};
    if (p.kind() == ProfileKind::PowerLaw) j["zeta"] = p.zeta();
    return j;
}

PopularityProfile profile_from_json(const json& j) {
    const auto kind = profile_kind_from_string(j.at("kind").get<std::string>());
    std::optional<double> zeta;
    if (j.contains("zeta")) zeta = j.at("zeta").get<double>();
    if (j.contains("life_span")) return PopularityProfile::for_life_span(kind, j.at("life_span").get<double>(), zeta);
    const double delta = j.at("delta").get<double>();
    switch (kind) {
        case ProfileKind::Uniform: return PopularityProfile::uniform(delta);
        case ProfileKind::Exponential: return PopularityProfile::exponential(delta);
        case ProfileKind::PowerLaw: return PopularityProfile::power_law(*zeta, delta);
    }
    throw std::invalid_argument("bad profile");
}

json volume_to_json(const VolumeDistribution& v) {
    json j{{"kind", to_string(v.kind())}};
    switch (v.kind()) {
        case VolumeKind::Pareto:
            j["beta"] = v.beta();
            j["v_min"] = v.v_min();
            break;
        case VolumeKind::TruncatedPareto:
            j["beta"] = v.beta();
            j["v_min"] = v.v_min();
            j["v_max"] = v.v_max();
            break;
        case VolumeKind::Deterministic:
            j["value"] = v.value();
            break;
        case VolumeKind::Empirical:
            j["samples"] = v.samples();
            break;
    }
    return j;
}

VolumeDistribution volume_from_json(const json& j) {
    const auto kind = volume_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
        case VolumeKind::Pareto:
            if (j.contains("mean"))
                return VolumeDistribution::pareto_with_mean(j.at("beta").get<double>(),
                                                            j.at("mean").get<double>());
            return VolumeDistribution::pareto(j.at("beta").get<double>(),
                                              j.at("v_min").get<double>());
        case VolumeKind::TruncatedPareto:
            if (j.contains("mean"))
                return VolumeDistribution::truncated_pareto_with_mean(
                    j.at("beta").get<double>(), j.at("mean").get<double>(),
                    j.at("v_max").get<double>());
            return VolumeDistribution::truncated_pareto(j.at("beta").get<double>(),
                                                        j.at("v_min").get<double>(),
                                                        j.at("v_max").get<double>());
        case VolumeKind::Deterministic:
            return VolumeDistribution::deterministic(j.at("value").get<double>());
        case VolumeKind::Empirical:
            return VolumeDistribution::empirical(j.at("samples").get<std::vector<double>>());
    }
    throw std::invalid_argument("bad volume");
}

}  // namespace

std::string TrafficConfig::to_json_string() const {
    json j;
    j["schema_version"] = 1;
    j["gamma"] = gamma;
    j["horizon_days"] = horizon;
    if (burn_in) j["burn_in_days"] = *burn_in;
    j["seed"] = seed;
    json ji{{"kind", to_string(ingress.kind)}};
    if (!ingress.node_weights.empty()) ji["node_weights"] = ingress.node_weights;
    if (!ingress.split_choices.empty()) {
        ji["splits"] = json::array();
        for (const auto& c : ingress.split_choices)
            ji["splits"].push_back(json{{"weight", c.weight}, {"split", c.split}});
    }
    j["ingress"] = ji;
    j["classes"] = json::array();
    for (const auto& c : classes) {
        j["classes"].push_back(json{{"label", c.label},
                                    {"weight", c.weight},
                                    {"cacheable", c.cacheable},
                                    {"profile", profile_to_json(c.profile)},
                                    {"volumes", volume_to_json(c.volumes)}});
    }
    return j.dump(2);
}

TrafficConfig TrafficConfig::from_json_string(const std::string& text) {
    const auto j = json::parse(text);
    TrafficConfig cfg;
    cfg.gamma = j.at("gamma").get<double>();
    cfg.horizon = j.at("horizon_days").get<double>();
    if (j.contains("burn_in_days") && !j.at("burn_in_days").is_null())
        cfg.burn_in = j.at("burn_in_days").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("ingress")) {
        const auto& ji = j.at("ingress");
        cfg.ingress.kind = ingress_kind_from_string(ji.at("kind").get<std::string>());
        if (ji.contains("node_weights"))
            cfg.ingress.node_weights = ji.at("node_weights").get<std::vector<double>>();
        if (ji.contains("splits")) {
            std::vector<IngressModel::SplitChoice> choices;
            for (const auto& jc : ji.at("splits"))
                choices.push_back({jc.at("weight").get<double>(),
                                   jc.at("split").get<std::vector<double>>()});
            cfg.ingress = IngressModel::explicit_split(std::move(choices));
        }
    }
    for (const auto& jc : j.at("classes")) {
        ContentClass c{profile_from_json(jc.at("profile")), volume_from_json(jc.at("volumes")),
                       jc.at("weight").get<double>(),
                       jc.contains("label") ? jc.at("label").get<std::string>() : "",
                       !jc.contains("cacheable") || jc.at("cacheable").get<bool>()};
        cfg.classes.push_back(std::move(c));
    }
    cfg.validate();
    return cfg;
}

TrafficConfig TrafficConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::uint64_t TrafficConfig::hash() const {
    const std::string s = to_json_string();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace snm
