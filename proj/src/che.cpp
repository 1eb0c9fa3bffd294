#include "snm/che.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snm/quadrature.hpp"

namespace snm {

namespace {

constexpr double kQuadRelTol = 1e-9;
constexpr double kProfileTailEps = 1e-10;
constexpr double kTcCeiling = 1e9;  // days; beyond this the cache never fills
constexpr int kMgfKnots = 1200;
constexpr double kMgfXMin = 1e-12;

// Window mass Lambda(tau) - Lambda(tau - T); the MGF argument of Eqs. 8/9.
double window_mass(const PopularityProfile& p, double tau, double T_C) {
    if (std::isinf(T_C)) return p.cdf(tau);
    return p.cdf(tau) - p.cdf(tau - T_C);
}

// The per-panel convergence flag is stricter than needed: accept any result
// whose summed error estimate is small relative to the value.
void require_accurate(const QuadResult& r, const char* what) {
    if (!r.converged && r.error > 1e-7 * std::max(std::fabs(r.value), 1e-12))
        throw std::runtime_error(std::string("che: ") + what +
                                 " quadrature did not converge");
}

}  // namespace

std::vector<ClassSpec> class_specs_from_config(const TrafficConfig& config) {
    std::vector<ClassSpec> out;
    out.reserve(config.classes.size());
    for (const auto& c : config.classes)
        out.push_back({c.profile, c.volumes, c.weight, 1.0, c.label, c.cacheable});
    return out;
}

MgfCache::MgfCache(const VolumeDistribution& volumes, double scale) : scale_(scale) {
    mean_ = scale * volumes.mean();
    if (volumes.kind() == VolumeKind::Deterministic) {
        exact_ = true;
        value_ = scale * volumes.value();
        return;
    }
    x_.resize(kMgfKnots);
    phi_.resize(kMgfKnots);
    dphi_.resize(kMgfKnots);
    d2phi_.resize(kMgfKnots);
    const double ratio = std::pow(1.0 / kMgfXMin, 1.0 / (kMgfKnots - 1));
    double x = kMgfXMin;
    for (int i = 0; i < kMgfKnots; ++i, x *= ratio) {
        if (i == kMgfKnots - 1) x = 1.0;
        x_[i] = x;
        phi_[i] = volumes.mgf(-x * scale);
        dphi_[i] = scale * volumes.mgf_derivative(-x * scale);
        // E[(sV)^2 e^{-x sV}], the exact slope for Hermite interpolation of phi'.
        d2phi_[i] = scale * scale * volumes.mgf_second_derivative(-x * scale);
    }
}

double MgfCache::phi(double x) const {
    if (x <= 0.0) return 1.0;
    if (exact_) return std::exp(-x * value_);
    if (x < x_.front()) return 1.0 - mean_ * x;  // first-order Taylor, x < 1e-12
    if (x > x_.back()) x = x_.back();
    const auto it = std::lower_bound(x_.begin(), x_.end(), x);
    const std::size_t hi = std::min<std::size_t>(it - x_.begin(), x_.size() - 1);
    if (x_[hi] == x) return phi_[hi];
    const std::size_t lo = hi - 1;
    const double h = x_[hi] - x_[lo];
    const double t = (x - x_[lo]) / h;
    // Cubic Hermite with exact endpoint derivatives d phi / dx = -phi'.
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * phi_[lo] - h10 * h * dphi_[lo] + h01 * phi_[hi] - h11 * h * dphi_[hi];
}

double MgfCache::phi_prime(double x) const {
    if (x <= 0.0) return mean_;
    if (exact_) return value_ * std::exp(-x * value_);
    if (x < x_.front()) return mean_ - d2phi_.front() * x;
    if (x > x_.back()) x = x_.back();
    const auto it = std::lower_bound(x_.begin(), x_.end(), x);
    const std::size_t hi = std::min<std::size_t>(it - x_.begin(), x_.size() - 1);
    if (x_[hi] == x) return dphi_[hi];
    const std::size_t lo = hi - 1;
    const double h = x_[hi] - x_[lo];
    const double t = (x - x_[lo]) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * dphi_[lo] - h10 * h * d2phi_[lo] + h01 * dphi_[hi] - h11 * h * d2phi_[hi];
}

CheSolver::CheSolver(double gamma, std::vector<ClassSpec> classes)
    : gamma_(gamma), classes_(std::move(classes)) {
    if (gamma_ < 0.0) throw std::invalid_argument("che: gamma >= 0");
    if (classes_.empty()) throw std::invalid_argument("che: no classes");
    double wsum = 0.0;
    for (const auto& c : classes_) wsum += c.weight;
    if (std::fabs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("che: class weights must sum to 1");
    mgf_.reserve(classes_.size());
    tail_.reserve(classes_.size());
    for (const auto& c : classes_) {
        mgf_.emplace_back(c.volumes, c.scale);
        tail_.push_back(c.profile.tail_age(kProfileTailEps));
    }
}

CheSolver::CheSolver(const TrafficConfig& config)
    : CheSolver(config.gamma, class_specs_from_config(config)) {}

double CheSolver::mean_volume() const {
    double m = 0.0;
    for (const auto& c : classes_) m += c.weight * c.scale * c.volumes.mean();
    return m;
}

// integral over tau of 1 - phi_k(window(tau)); panels split at the kinks of
// the window function (0, T_C, delta, delta + T_C for the uniform shape).
double CheSolver::occupancy_integral(std::size_t k, double T_C) const {
    if (T_C <= 0.0) return 0.0;
    const auto& prof = classes_[k].profile;
    const auto& mgf = mgf_[k];
    const double tail = tail_[k];
    std::vector<double> knots{0.0, std::min(T_C, tail), std::max(T_C, tail), tail + T_C};
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const auto f = [&](double tau) { return 1.0 - mgf.phi(window_mass(prof, tau, T_C)); };
    const auto r = integrate_panels(f, knots, kQuadRelTol, 1e-14);
    require_accurate(r, "occupancy");
    return r.value;
}

// integral of lambda_k(tau) phi'_k(window(tau)) / E[V_k]; the class miss term
// of the hit-probability formula.
double CheSolver::miss_integral(std::size_t k, double T_C) const {
    const auto& prof = classes_[k].profile;
    const auto& mgf = mgf_[k];
    const double tail = tail_[k];
    if (T_C <= 0.0) return 1.0;
    std::vector<double> knots{0.0, std::isinf(T_C) ? tail : std::min(T_C, tail), tail};
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const auto f = [&](double tau) {
        return prof.density(tau) * mgf.phi_prime(window_mass(prof, tau, T_C));
    };
    const auto r = integrate_panels(f, knots, kQuadRelTol, 1e-14);
    require_accurate(r, "hit");
    return r.value / mgf.mean();
}

double CheSolver::capacity_of_Tc(double T_C) const {
    std::set<int> none;
    return capacity_of_Tc_masked(T_C, none);
}

double CheSolver::capacity_of_Tc_masked(double T_C, const std::set<int>& filter) const {
    if (T_C < 0.0) throw std::invalid_argument("che: T_C >= 0");
    double sum = 0.0;
    for (std::size_t k = 0; k < classes_.size(); ++k) {
        if (filter.count(static_cast<int>(k))) continue;
        sum += classes_[k].weight * occupancy_integral(k, T_C);
    }
    return gamma_ * sum;
}

CheSolution CheSolver::solve_Tc_filtered(double capacity, const std::set<int>& filter) const {
    if (capacity < 0.0) throw std::invalid_argument("che: capacity >= 0");
    CheSolution sol;
    sol.capacity = capacity;
    if (capacity == 0.0 || gamma_ == 0.0) return sol;

    double mean_vol = 0.0;
    for (std::size_t k = 0; k < classes_.size(); ++k)
        if (!filter.count(static_cast<int>(k)))
            mean_vol += classes_[k].weight * classes_[k].scale * classes_[k].volumes.mean();
    if (mean_vol <= 0.0) {
        sol.never_fills = true;
        sol.T_C = kInfiniteTc;
        return sol;
    }

    // Bracket: C(T) <= gamma E[V] T, so capacity / (gamma E[V]) is a lower bound.
    double lo = capacity / (gamma_ * mean_vol);
    double c_lo = capacity_of_Tc_masked(lo, filter);
    if (c_lo > capacity) {  // only possible through numerical slack
        lo = 0.0;
        c_lo = 0.0;
    }
    double hi = std::max(2.0 * lo, 1e-9);
    double c_hi = capacity_of_Tc_masked(hi, filter);
    while (c_hi < capacity) {
        if (hi > kTcCeiling) {
            sol.never_fills = true;
            sol.T_C = kInfiniteTc;
            sol.achieved_capacity = c_hi;
            return sol;
        }
        lo = hi;
        c_lo = c_hi;
        hi *= 2.0;
        c_hi = capacity_of_Tc_masked(hi, filter);
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double c_mid = capacity_of_Tc_masked(mid, filter);
        if (c_mid < capacity) {
            lo = mid;
            c_lo = c_mid;
        } else {
            hi = mid;
            c_hi = c_mid;
        }
        if ((hi - lo) < 1e-14 * hi) break;
        if (std::fabs(c_mid - capacity) <= 1e-10 * std::max(1.0, capacity)) {
            lo = hi = mid;
            break;
        }
    }
    sol.T_C = 0.5 * (lo + hi);
    sol.achieved_capacity = capacity_of_Tc_masked(sol.T_C, filter);
    sol.residual = std::fabs(sol.achieved_capacity - capacity) / std::max(1.0, capacity);
    return sol;
}

CheSolution CheSolver::solve_Tc(double capacity) const {
    std::set<int> none;
    auto sol = solve_Tc_filtered(capacity, none);
    sol.p_hit = hit_probability(sol.T_C);
    return sol;
}

// Per-request hit probability of the aggregate stream: class k carries a
// share w_k E[V_k] / E[V] of the requests, each hitting with the class
// conditional probability 1 - miss_integral. (Weighting the classes by w_k
// alone would average over contents instead of requests and disagrees with
// the simulated per-request ratio as soon as volumes differ across classes.)
double CheSolver::hit_probability(double T_C) const {
    if (T_C <= 0.0) return 0.0;
    const double ev = mean_volume();
    if (ev <= 0.0) return 0.0;
    double miss = 0.0;
    for (std::size_t k = 0; k < classes_.size(); ++k)
        miss += classes_[k].weight * mgf_[k].mean() / ev * miss_integral(k, T_C);
    return std::clamp(1.0 - miss, 0.0, 1.0);
}

double CheSolver::class_hit_probability(std::size_t k, double T_C) const {
    if (k >= classes_.size()) throw std::out_of_range("che: class index");
    if (T_C <= 0.0) return 0.0;
    return std::clamp(1.0 - miss_integral(k, T_C), 0.0, 1.0);
}

double CheSolver::small_cache_phit(double capacity) const {
    const double mean_vol = mean_volume();
    if (mean_vol <= 0.0 || gamma_ <= 0.0) return 0.0;
    const double T_C = capacity / (gamma_ * mean_vol);
    double sum = 0.0;
    for (const auto& c : classes_) {
        const double ev2 = c.scale * c.scale * c.volumes.second_moment();
        sum += c.weight / c.profile.life_span() * ev2;
    }
    return T_C * sum / mean_vol;
}

double CheSolver::large_cache_phit() const {
    double miss = 0.0;
    for (std::size_t k = 0; k < classes_.size(); ++k)
        miss += classes_[k].weight * (1.0 - mgf_[k].phi(1.0));
    return 1.0 - miss / mean_volume();
}

double CheSolver::phit_for_capacity(double capacity) const {
    return hit_probability(solve_Tc(capacity).T_C);
}

double CheSolver::capacity_for_phit(double target) const {
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("che: target hit probability in (0,1)");
    if (target >= large_cache_phit())
        throw std::domain_error("che: target exceeds the large-cache asymptote");
    double hi = std::max(1.0, gamma_ * mean_volume() * 1e-3);
    while (phit_for_capacity(hi) < target) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phit_for_capacity(mid) < target ? lo : hi) = mid;
        if (hi - lo < 1e-9 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double CheSolver::filtered_phit(double capacity, const std::set<int>& filter) const {
    bool any_unfiltered = false;
    for (std::size_t k = 0; k < classes_.size(); ++k)
        if (!filter.count(static_cast<int>(k))) any_unfiltered = true;
    if (!any_unfiltered) return 0.0;
    if (filter.empty()) return phit_for_capacity(capacity);
    const auto sol = solve_Tc_filtered(capacity, filter);
    // Request shares are taken over every class: filtered requests still
    // arrive, they just always miss.
    const double ev = mean_volume();
    double hit = 0.0;
    for (std::size_t k = 0; k < classes_.size(); ++k) {
        if (filter.count(static_cast<int>(k))) continue;  // filtered: all misses
        hit += classes_[k].weight * mgf_[k].mean() / ev * (1.0 - miss_integral(k, sol.T_C));
    }
    return std::clamp(hit, 0.0, 1.0);
}

double CheSolver::filtered_capacity_for_phit(double target, const std::set<int>& filter) const {
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("che: target hit probability in (0,1)");
    double hi = std::max(1.0, gamma_ * mean_volume() * 1e-3);
    int guard = 0;
    while (filtered_phit(hi, filter) < target) {
        hi *= 2.0;
        if (++guard > 80) throw std::domain_error("che: filtered target unreachable");
    }
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (filtered_phit(mid, filter) < target ? lo : hi) = mid;
        if (hi - lo < 1e-9 * hi) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<SweepRow> phit_vs_capacity_curve(const CheSolver& solver,
                                             const std::vector<double>& capacities) {
    std::vector<SweepRow> rows;
    rows.reserve(capacities.size());
    const double asym = solver.large_cache_phit();
    for (double c : capacities) {
        const auto sol = solver.solve_Tc(c);
        double small = std::numeric_limits<double>::quiet_NaN();
        try {
            small = solver.small_cache_phit(c);
        } catch (const std::domain_error&) {
            // infinite second moment: no small-cache closed form
        }
        rows.push_back({c, sol.T_C, sol.p_hit, small, asym});
    }
    return rows;
}

}  // namespace snm
