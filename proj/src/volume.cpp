#include "snm/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "snm/quadrature.hpp"

namespace snm {

namespace {
constexpr double kMgfRelTol = 1e-9;
}

std::string to_string(VolumeKind k) {
    switch (k) {
        case VolumeKind::Pareto: return "pareto";
        case VolumeKind::TruncatedPareto: return "truncated_pareto";
        case VolumeKind::Deterministic: return "deterministic";
        case VolumeKind::Empirical: return "empirical";
    }
    return "?";
}

VolumeKind volume_kind_from_string(const std::string& s) {
    if (s == "pareto") return VolumeKind::Pareto;
    if (s == "truncated_pareto") return VolumeKind::TruncatedPareto;
    if (s == "deterministic") return VolumeKind::Deterministic;
    if (s == "empirical") return VolumeKind::Empirical;
    throw std::invalid_argument("unknown volume kind: " + s);
}

VolumeDistribution VolumeDistribution::pareto(double beta, double v_min) {
    if (!(beta > 1.0)) throw std::invalid_argument("pareto: beta must be > 1");
    if (!(v_min > 0.0)) throw std::invalid_argument("pareto: v_min must be > 0");
    VolumeDistribution d;
    d.kind_ = VolumeKind::Pareto;
    d.beta_ = beta;
    d.v_min_ = v_min;
    return d;
}

VolumeDistribution VolumeDistribution::pareto_with_mean(double beta, double mean) {
    if (!(beta > 1.0)) throw std::invalid_argument("pareto: beta must be > 1");
    return pareto(beta, mean * (beta - 1.0) / beta);
}

VolumeDistribution VolumeDistribution::truncated_pareto(double beta, double v_min,
                                                        double v_max) {
    if (!(beta > 1.0)) throw std::invalid_argument("truncated_pareto: beta must be > 1");
    if (!(v_min > 0.0 && v_max > v_min))
        throw std::invalid_argument("truncated_pareto: need 0 < v_min < v_max");
    VolumeDistribution d;
    d.kind_ = VolumeKind::TruncatedPareto;
    d.beta_ = beta;
    d.v_min_ = v_min;
    d.v_max_ = v_max;
    return d;
}

VolumeDistribution VolumeDistribution::truncated_pareto_with_mean(double beta, double mean,
                                                                  double v_max) {
    if (!(mean > 0.0 && mean < v_max))
        throw std::invalid_argument("truncated_pareto: mean must lie in (0, v_max)");
    // Bisection on v_min: the truncated mean increases from 0 to v_max.
    double lo = mean * 1e-12, hi = v_max * (1.0 - 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_pareto(beta, mid, v_max).mean() < mean)
            lo = mid;
        else
            hi = mid;
    }
    return truncated_pareto(beta, 0.5 * (lo + hi), v_max);
}

VolumeDistribution VolumeDistribution::deterministic(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("deterministic: value must be > 0");
    VolumeDistribution d;
    d.kind_ = VolumeKind::Deterministic;
    d.value_ = value;
    return d;
}

VolumeDistribution VolumeDistribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical: no samples");
    for (double v : samples)
        if (!(v > 0.0)) throw std::invalid_argument("empirical: samples must be > 0");
    std::sort(samples.begin(), samples.end());
    VolumeDistribution d;
    d.kind_ = VolumeKind::Empirical;
    d.samples_ = std::move(samples);
    return d;
}

double VolumeDistribution::mean() const {
    switch (kind_) {
        case VolumeKind::Pareto:
            return beta_ * v_min_ / (beta_ - 1.0);
        case VolumeKind::TruncatedPareto: {
            const double r = v_min_ / v_max_;
            const double z = 1.0 - std::pow(r, beta_);
            return beta_ / (beta_ - 1.0) * v_min_ * (1.0 - std::pow(r, beta_ - 1.0)) / z;
        }
        case VolumeKind::Deterministic:
            return value_;
        case VolumeKind::Empirical:
            return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
                   static_cast<double>(samples_.size());
    }
    return 0.0;
}

double VolumeDistribution::second_moment() const {
    switch (kind_) {
        case VolumeKind::Pareto:
            if (!(beta_ > 2.0))
                throw std::domain_error("pareto: second moment infinite for beta <= 2");
            return beta_ * v_min_ * v_min_ / (beta_ - 2.0);
        case VolumeKind::TruncatedPareto: {
            const double r = v_min_ / v_max_;
            const double z = 1.0 - std::pow(r, beta_);
            if (std::fabs(beta_ - 2.0) < 1e-12)
                return 2.0 * v_min_ * v_min_ * std::log(v_max_ / v_min_) / z;
            return beta_ / (beta_ - 2.0) * v_min_ * v_min_ *
                   (1.0 - std::pow(r, beta_ - 2.0)) / z;
        }
        case VolumeKind::Deterministic:
            return value_ * value_;
        case VolumeKind::Empirical: {
            double s = 0.0;
            for (double v : samples_) s += v * v;
            return s / static_cast<double>(samples_.size());
        }
    }
    return 0.0;
}

// E[g(V)] via u = v_min / v on (0, 1]; the Pareto density maps to beta u^{beta-1}.
double VolumeDistribution::expect(const std::function<double(double)>& g) const {
    const double b = beta_;
    const double a = v_min_;
    double u_lo = 0.0, z = 1.0;
    if (kind_ == VolumeKind::TruncatedPareto) {
        u_lo = a / v_max_;
        z = 1.0 - std::pow(u_lo, b);
    }
    const auto f = [&](double u) { return g(a / u) * b * std::pow(u, b - 1.0); };
    const auto r = integrate(f, u_lo, 1.0, kMgfRelTol, 1e-300);
    if (!r.converged) throw std::runtime_error("volume quadrature did not converge");
    return r.value / z;
}

double VolumeDistribution::mgf(double x) const { return 1.0 + mgf_m1(x); }

// Computed through expm1 so the quadrature tolerance applies to E[e^{xV}] - 1
// itself; a tolerance relative to E[e^{xV}] ~ 1 would swamp tiny values.
double VolumeDistribution::mgf_m1(double x) const {
    if (x > 0.0 && (kind_ == VolumeKind::Pareto))
        throw std::domain_error("pareto mgf diverges for x > 0");
    if (x == 0.0) return 0.0;
    switch (kind_) {
        case VolumeKind::Deterministic:
            return std::expm1(x * value_);
        case VolumeKind::Empirical: {
            double s = 0.0;
            for (double v : samples_) s += std::expm1(x * v);
            return s / static_cast<double>(samples_.size());
        }
        default:
            return expect([x](double v) { return std::expm1(x * v); });
    }
}

double VolumeDistribution::mgf_derivative(double x) const {
    if (x > 0.0 && (kind_ == VolumeKind::Pareto))
        throw std::domain_error("pareto mgf diverges for x > 0");
    if (x == 0.0) return mean();
    switch (kind_) {
        case VolumeKind::Deterministic:
            return value_ * std::exp(x * value_);
        case VolumeKind::Empirical: {
            double s = 0.0;
            for (double v : samples_) s += v * std::exp(x * v);
            return s / static_cast<double>(samples_.size());
        }
        default:
            return expect([x](double v) { return v * std::exp(x * v); });
    }
}

double VolumeDistribution::mgf_second_derivative(double x) const {
    if (x > 0.0 && (kind_ == VolumeKind::Pareto))
        throw std::domain_error("pareto mgf diverges for x > 0");
    if (x == 0.0) return second_moment();
    switch (kind_) {
        case VolumeKind::Deterministic:
            return value_ * value_ * std::exp(x * value_);
        case VolumeKind::Empirical: {
            double s = 0.0;
            for (double v : samples_) s += v * v * std::exp(x * v);
            return s / static_cast<double>(samples_.size());
        }
        default:
            return expect([x](double v) { return v * v * std::exp(x * v); });
    }
}

double VolumeDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("volume: quantile needs u in [0,1)");
    switch (kind_) {
        case VolumeKind::Pareto:
            return v_min_ * std::pow(1.0 - u, -1.0 / beta_);
        case VolumeKind::TruncatedPareto: {
            const double z = 1.0 - std::pow(v_min_ / v_max_, beta_);
            return v_min_ * std::pow(1.0 - u * z, -1.0 / beta_);
        }
        case VolumeKind::Deterministic:
            return value_;
        case VolumeKind::Empirical: {
            const auto idx = static_cast<std::size_t>(u * static_cast<double>(samples_.size()));
            return samples_[std::min(idx, samples_.size() - 1)];
        }
    }
    return 0.0;
}

}  // namespace snm
