#include "snm/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snm/rng.hpp"

namespace snm {

VirtualTimeWarp::VirtualTimeWarp(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("warp: need >= 2 knots");
    if (knots_.front().first != 0.0 || knots_.front().second != 0.0)
        throw std::invalid_argument("warp: first knot must be (0, 0)");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].first > knots_[i - 1].first) ||
            !(knots_[i].second > knots_[i - 1].second))
            throw std::invalid_argument("warp: knots must be strictly increasing");
    }
    const double span_t = knots_.back().first - knots_.front().first;
    const double span_w = knots_.back().second - knots_.front().second;
    if (std::fabs(span_w / span_t - 1.0) > 1e-9)
        throw std::invalid_argument("warp: mean slope over the knot span must be 1");
}

VirtualTimeWarp VirtualTimeWarp::identity() {
    return VirtualTimeWarp({{0.0, 0.0}, {1.0, 1.0}});
}

double VirtualTimeWarp::operator()(double t) const {
    // Locate the segment; extrapolate with the end slopes outside the span.
    std::size_t hi = 1;
    if (t >= knots_.back().first) {
        hi = knots_.size() - 1;
    } else if (t > knots_.front().first) {
        hi = static_cast<std::size_t>(
            std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const auto& k) { return v < k.first; }) -
            knots_.begin());
    }
    const auto& [t0, w0] = knots_[hi - 1];
    const auto& [t1, w1] = knots_[hi];
    return w0 + (t - t0) * (w1 - w0) / (t1 - t0);
}

RequestTrace warp(const RequestTrace& trace, const VirtualTimeWarp& w) {
    RequestTrace out = trace;
    for (auto& r : out.requests) r.time = w(r.time);
    return out;
}

RequestTrace shuffle_k_slices(const RequestTrace& trace, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("shuffle: k >= 1");
    if (k > trace.requests.size()) throw std::invalid_argument("shuffle: k exceeds request count");
    RequestTrace out = trace;
    const std::size_t n = out.requests.size();
    const std::size_t slice = n / k;
    Rng rng(seed);
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t begin = s * slice;
        const std::size_t end = (s + 1 == k) ? n : begin + slice;
        // Fisher-Yates over the content ids only.
        for (std::size_t i = end - 1; i > begin; --i) {
            const std::size_t j = begin + static_cast<std::size_t>(rng.integer(i - begin + 1));
            std::swap(out.requests[i].content_id, out.requests[j].content_id);
        }
    }
    return out;
}

}  // namespace snm
