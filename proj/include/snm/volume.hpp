#pragma once

#include <functional>
#include <string>
#include <vector>

namespace snm {

enum class VolumeKind { Pareto, TruncatedPareto, Deterministic, Empirical };

std::string to_string(VolumeKind k);
VolumeKind volume_kind_from_string(const std::string& s);

// Law of the expected per-content request volume V (requests per content).
// mgf(x) = E[exp(x V)] is only evaluated at x <= 0; for the heavy-tailed
// kinds it is computed by adaptive quadrature on the compact substitution
// u = v_min / v.
class VolumeDistribution {
  public:
    static VolumeDistribution pareto(double beta, double v_min);
    // v_min chosen so that the mean equals the requested value.
    static VolumeDistribution pareto_with_mean(double beta, double mean);
    static VolumeDistribution truncated_pareto(double beta, double v_min, double v_max);
    // v_min solved numerically so that the truncated mean matches.
    static VolumeDistribution truncated_pareto_with_mean(double beta, double mean,
                                                         double v_max);
    static VolumeDistribution deterministic(double value);
    static VolumeDistribution empirical(std::vector<double> samples);

    double mean() const;
    double second_moment() const;
    double mgf(double x) const;                    // E[e^{xV}], x <= 0
    double mgf_m1(double x) const;                 // E[e^{xV}] - 1, accurate for tiny |x|
    double mgf_derivative(double x) const;         // E[V e^{xV}], x <= 0
    double mgf_second_derivative(double x) const;  // E[V^2 e^{xV}], x < 0 (or x=0 if E[V^2] finite)
    double quantile(double u) const;        // inverse CDF, u in [0, 1)

    VolumeKind kind() const { return kind_; }
    double beta() const { return beta_; }
    double v_min() const { return v_min_; }
    double v_max() const { return v_max_; }
    double value() const { return value_; }
    const std::vector<double>& samples() const { return samples_; }

  private:
    VolumeDistribution() = default;
    double expect(const std::function<double(double)>& g) const;

    VolumeKind kind_ = VolumeKind::Deterministic;
    double beta_ = 0.0;
    double v_min_ = 0.0;
    double v_max_ = 0.0;  // only for TruncatedPareto
    double value_ = 0.0;  // only for Deterministic
    std::vector<double> samples_;  // only for Empirical, kept sorted
};

}  // namespace snm
