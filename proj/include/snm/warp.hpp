#pragma once

#include <cstdint>
#include <vector>

#include "snm/trace.hpp"

namespace snm {

// Piecewise-linear strictly increasing virtual-time function w with w(0) = 0.
// Normalization note: the asymptotic condition lim w(t)/t = 1 is replaced by
// a finite-horizon surrogate, requiring the mean slope over the knot span to
// be 1 (checked to 1e-9). Outside the knot span w extrapolates linearly.
class VirtualTimeWarp {
  public:
    // knots: (t_j, w_j) pairs, strictly increasing in both coordinates,
    // starting at (0, 0).
    explicit VirtualTimeWarp(std::vector<std::pair<double, double>> knots);

    static VirtualTimeWarp identity();

    double operator()(double t) const;
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  private:
    std::vector<std::pair<double, double>> knots_;
};

// Remap every timestamp through w; ids and request order are untouched.
RequestTrace warp(const RequestTrace& trace, const VirtualTimeWarp& w);

// Partition the trace into k consecutive equal-count slices (last absorbs the
// remainder) and permute the content ids within each slice, leaving the
// timestamps in place.
RequestTrace shuffle_k_slices(const RequestTrace& trace, std::size_t k, std::uint64_t seed);

}  // namespace snm
