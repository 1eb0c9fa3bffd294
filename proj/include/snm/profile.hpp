#pragma once

#include <optional>
#include <string>

namespace snm {

enum class ProfileKind { Uniform, Exponential, PowerLaw };

std::string to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

// Normalized temporal popularity shape of a content. All times are in days.
// density() integrates to 1 and vanishes for negative ages.
class PopularityProfile {
  public:
    static PopularityProfile uniform(double delta);
    static PopularityProfile exponential(double delta);
    static PopularityProfile power_law(double zeta, double delta);

    // Inverts the life-span formula of the chosen shape to set delta.
    static PopularityProfile for_life_span(ProfileKind kind, double life_span,
                                           std::optional<double> zeta = std::nullopt);

    double density(double t) const;   // lambda(t), 1/days
    double cdf(double t) const;       // Lambda(t) = integral of lambda on [0, t]
    double quantile(double u) const;  // Lambda^{-1}(u), u in [0, 1)
    double life_span() const;         // 1 / integral of lambda^2

    // Age beyond which the remaining mass is below eps: Lambda^{-1}(1 - eps).
    // Infinite-support shapes return a finite truncation point.
    double tail_age(double eps) const;

    ProfileKind kind() const { return kind_; }
    double delta() const { return delta_; }
    double zeta() const { return zeta_; }

  private:
    PopularityProfile(ProfileKind kind, double delta, double zeta);
    ProfileKind kind_;
    double delta_;
    double zeta_;
};

}  // namespace snm
