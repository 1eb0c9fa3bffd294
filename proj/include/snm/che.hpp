#pragma once

#include <limits>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "snm/profile.hpp"
#include "snm/traffic.hpp"
#include "snm/volume.hpp"

namespace snm {

// One traffic class as seen by the analysis. `scale` multiplies the request
// volume (used for per-leaf ingress shares in the network model): the
// effective volume law is scale * V.
struct ClassSpec {
    PopularityProfile profile;
    VolumeDistribution volumes;
    double weight = 1.0;
    double scale = 1.0;
    std::string label;
    bool cacheable = true;
};

std::vector<ClassSpec> class_specs_from_config(const TrafficConfig& config);

struct CheSolution {
    double T_C = 0.0;  // eviction time, days
    double p_hit = 0.0;
    double capacity = 0.0;           // requested occupancy
    double achieved_capacity = 0.0;  // C(T_C) at the returned root
    double residual = 0.0;           // |achieved - requested| / max(1, requested)
    bool never_fills = false;        // T_C pushed past the solver horizon
};

// Cached phi(-x) / phi'(-x) evaluations for the effective volume scale*V on
// x in [0, 1], Hermite-interpolated on a log grid.
class MgfCache {
  public:
    MgfCache(const VolumeDistribution& volumes, double scale);
    double phi(double x) const;        // E[exp(-x scale V)]
    double phi_prime(double x) const;  // E[scale V exp(-x scale V)]
    double mean() const { return mean_; }

  private:
    bool exact_ = false;  // deterministic law: closed form, no table
    double scale_ = 1.0;
    double value_ = 0.0;
    double mean_ = 0.0;
    std::vector<double> x_, phi_, dphi_, d2phi_;
};

// Single-cache LRU analysis under the shot-noise model: the eviction-time
// occupancy fixed point and the exact hit-probability integral, plus the
// small- and large-cache closed forms and the class-filtered variant.
class CheSolver {
  public:
    CheSolver(double gamma, std::vector<ClassSpec> classes);
    explicit CheSolver(const TrafficConfig& config);

    // Expected occupancy C(T_C); strictly increasing in T_C.
    double capacity_of_Tc(double T_C) const;
    CheSolution solve_Tc(double capacity) const;
    double hit_probability(double T_C) const;
    // Per-request hit probability conditional on class k.
    double class_hit_probability(std::size_t k, double T_C) const;

    double small_cache_phit(double capacity) const;
    double large_cache_phit() const;

    // solve_Tc then hit_probability.
    double phit_for_capacity(double capacity) const;
    // Inverse of the above; throws std::domain_error when target exceeds the
    // large-cache asymptote.
    double capacity_for_phit(double target) const;

    // LRU that never admits the classes in `filter` (by class index).
    double filtered_phit(double capacity, const std::set<int>& filter) const;
    CheSolution solve_Tc_filtered(double capacity, const std::set<int>& filter) const;
    double filtered_capacity_for_phit(double target, const std::set<int>& filter) const;

    double gamma() const { return gamma_; }
    const std::vector<ClassSpec>& classes() const { return classes_; }
    double mean_volume() const;  // sum_k w_k E[scale_k V_k]

    static constexpr double kInfiniteTc = std::numeric_limits<double>::infinity();

  private:
    double occupancy_integral(std::size_t k, double T_C) const;
    double miss_integral(std::size_t k, double T_C) const;
    double capacity_of_Tc_masked(double T_C, const std::set<int>& filter) const;

    double gamma_;
    std::vector<ClassSpec> classes_;
    std::vector<MgfCache> mgf_;
    std::vector<double> tail_;  // per-class profile truncation age
};

struct SweepRow {
    double capacity;
    double T_C;
    double p_hit;
    double p_hit_small_approx;
    double p_hit_large_asymptote;
};

std::vector<SweepRow> phit_vs_capacity_curve(const CheSolver& solver,
                                             const std::vector<double>& capacities);

}  // namespace snm
