#pragma once

#include <optional>

#include "snm/topology.hpp"
#include "snm/trace.hpp"
#include "snm/traffic.hpp"

namespace snm {

struct GenerateOptions {
    // Only emit warm-up requests newer than -warm_window. Content arrivals
    // still span the full burn-in so the active population is stationary at
    // t = 0. Absent: emit everything back to -burn_in.
    std::optional<double> warm_window;
};

// Draw a synthetic SNM request trace. Contents arrive as Poisson(gamma) on
// [-burn_in, horizon]; each content's request count is Poisson(V_m) and its
// request times are inverse-CDF samples of the class profile shifted by tau_m.
RequestTrace generate(const TrafficConfig& config, const CacheTopology& topology,
                      const GenerateOptions& opts = {});

// Single-cache convenience overload.
RequestTrace generate(const TrafficConfig& config, const GenerateOptions& opts = {});

}  // namespace snm
