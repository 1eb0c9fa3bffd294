#include "snm/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace snm {

namespace {
constexpr double kMinZeta = 1.0 + 1e-6;
}

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Uniform: return "uniform";
        case ProfileKind::Exponential: return "exponential";
        case ProfileKind::PowerLaw: return "power_law";
    }
    return "?";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "uniform") return ProfileKind::Uniform;
    if (s == "exponential") return ProfileKind::Exponential;
    if (s == "power_law" || s == "powerlaw") return ProfileKind::PowerLaw;
    throw std::invalid_argument("unknown profile kind: " + s);
}

PopularityProfile::PopularityProfile(ProfileKind kind, double delta, double zeta)
    : kind_(kind), delta_(delta), zeta_(zeta) {
    if (!(delta > 0.0)) throw std::invalid_argument("profile: delta must be > 0");
    if (kind == ProfileKind::PowerLaw && !(zeta > kMinZeta))
        throw std::invalid_argument("profile: power-law exponent zeta must be > 1");
}

PopularityProfile PopularityProfile::uniform(double delta) {
    return {ProfileKind::Uniform, delta, 0.0};
}

PopularityProfile PopularityProfile::exponential(double delta) {
    return {ProfileKind::Exponential, delta, 0.0};
}

PopularityProfile PopularityProfile::power_law(double zeta, double delta) {
    return {ProfileKind::PowerLaw, delta, zeta};
}

PopularityProfile PopularityProfile::for_life_span(ProfileKind kind, double life_span,
                                                   std::optional<double> zeta) {
    if (!(life_span > 0.0)) throw std::invalid_argument("profile: life_span must be > 0");
    switch (kind) {
        case ProfileKind::Uniform:
            return uniform(life_span);  // L = delta
        case ProfileKind::Exponential:
            return exponential(life_span / 2.0);  // L = 2 delta
        case ProfileKind::PowerLaw: {
            if (!zeta) throw std::invalid_argument("profile: power-law needs zeta");
            const double z = *zeta;
            if (!(z > kMinZeta)) throw std::invalid_argument("profile: zeta must be > 1");
            // L = delta (2 zeta - 1) / (zeta - 1)^2
            return power_law(z, life_span * (z - 1.0) * (z - 1.0) / (2.0 * z - 1.0));
        }
    }
    throw std::invalid_argument("profile: bad kind");
}

double PopularityProfile::density(double t) const {
    if (t < 0.0) return 0.0;
    switch (kind_) {
        case ProfileKind::Uniform:
            return t <= delta_ ? 1.0 / delta_ : 0.0;
        case ProfileKind::Exponential:
            return std::exp(-t / delta_) / delta_;
        case ProfileKind::PowerLaw:
            return (zeta_ - 1.0) / delta_ * std::pow(t / delta_ + 1.0, -zeta_);
    }
    return 0.0;
}

double PopularityProfile::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
        case ProfileKind::Uniform:
            return t >= delta_ ? 1.0 : t / delta_;
        case ProfileKind::Exponential:
            return -std::expm1(-t / delta_);
        case ProfileKind::PowerLaw:
            return 1.0 - std::pow(t / delta_ + 1.0, 1.0 - zeta_);
    }
    return 0.0;
}

double PopularityProfile::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("profile: quantile needs u in [0,1)");
    switch (kind_) {
        case ProfileKind::Uniform:
            return u * delta_;
        case ProfileKind::Exponential:
            return -delta_ * std::log1p(-u);
        case ProfileKind::PowerLaw:
            return delta_ * (std::pow(1.0 - u, 1.0 / (1.0 - zeta_)) - 1.0);
    }
    return 0.0;
}

double PopularityProfile::life_span() const {
    switch (kind_) {
        case ProfileKind::Uniform:
            return delta_;
        case ProfileKind::Exponential:
            return 2.0 * delta_;
        case ProfileKind::PowerLaw:
            return delta_ * (2.0 * zeta_ - 1.0) / ((zeta_ - 1.0) * (zeta_ - 1.0));
    }
    return 0.0;
}

double PopularityProfile::tail_age(double eps) const {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("profile: eps in (0,1)");
    if (kind_ == ProfileKind::Uniform) return delta_;
    return quantile(1.0 - eps);
}

}  // namespace snm
