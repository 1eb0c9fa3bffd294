#include "snm/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "snm/che.hpp"
#include "snm/quadrature.hpp"

namespace snm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTcCeiling = 1e9;  // days

// Linear interpolation into a cumulative curve sampled on the uniform age
// grid; clamps to 0 below and to the final mass above.
double cum_at(const std::vector<double>& cum, double x, double dt) {
    if (!(x > 0.0)) return 0.0;
    const double pos = x / dt;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= cum.size()) return cum.back();
    const double frac = pos - static_cast<double>(i);
    return cum[i] + (cum[i + 1] - cum[i]) * frac;
}

std::vector<double> trapezoid_cumsum(const std::vector<double>& f, double dt) {
    std::vector<double> cum(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        cum[i] = cum[i - 1] + 0.5 * (f[i - 1] + f[i]) * dt;
    return cum;
}

double trapezoid(const std::vector<double>& f, double dt) {
    double s = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) s += 0.5 * (f[i - 1] + f[i]) * dt;
    return s;
}

// Per-flow, per-volume-atom expected miss intensity leaving a node, as a
// function of content age, plus its running integral.
struct FlowCurves {
    std::vector<std::vector<double>> mu;   // [atom][age]
    std::vector<std::vector<double>> cum;  // [atom][age]
};

struct NodeState {
    NodeSolution sol;
    std::map<std::size_t, FlowCurves> out;  // flow index -> outgoing curves
};

}  // namespace

std::vector<Flow> flows_from_config(const TrafficConfig& config,
                                    const CacheTopology& topology) {
    config.validate();
    const auto& leaves = topology.leaves();
    const std::size_t F = leaves.size();
    std::vector<Flow> flows;
    const auto push = [&](std::size_t k, double gamma, std::vector<double> share) {
        if (gamma <= 0.0) return;
        flows.push_back({k, gamma, std::move(share)});
    };
    for (std::size_t k = 0; k < config.classes.size(); ++k) {
        const double g = config.gamma * config.classes[k].weight;
        switch (config.ingress.kind) {
            case IngressKind::SingleCache: {
                if (F != 1)
                    throw std::invalid_argument(
                        "network: single-cache ingress needs a single leaf");
                push(k, g, {1.0});
                break;
            }
            case IngressKind::Unlocalized: {
                std::vector<double> share = config.ingress.node_weights;
                if (share.empty())
                    share.assign(F, 1.0 / static_cast<double>(F));
                if (share.size() != F)
                    throw std::invalid_argument("network: node_weights size != leaf count");
                push(k, g, std::move(share));
                break;
            }
            case IngressKind::FullyLocalized: {
                for (std::size_t f = 0; f < F; ++f) {
                    std::vector<double> share(F, 0.0);
                    share[f] = 1.0;
                    push(k, g / static_cast<double>(F), std::move(share));
                }
                break;
            }
            case IngressKind::ExplicitSplit: {
                for (const auto& choice : config.ingress.split_choices) {
                    if (choice.split.size() != F)
                        throw std::invalid_argument("network: split size != leaf count");
                    push(k, g * choice.weight, choice.split);
                }
                break;
            }
        }
    }
    return flows;
}

VolumeAtoms volume_atoms(const VolumeDistribution& volumes, int n) {
    if (n < 1) throw std::invalid_argument("volume_atoms: n >= 1");
    VolumeAtoms a;
    switch (volumes.kind()) {
        case VolumeKind::Deterministic:
            a.v = {volumes.value()};
            a.w = {1.0};
            return a;
        case VolumeKind::Empirical: {
            const auto& s = volumes.samples();
            if (s.size() <= static_cast<std::size_t>(n)) {
                a.v = s;
                a.w.assign(s.size(), 1.0 / static_cast<double>(s.size()));
            } else {
                a.v.reserve(n);
                a.w.assign(n, 1.0 / static_cast<double>(n));
                for (int i = 0; i < n; ++i)
                    a.v.push_back(volumes.quantile((i + 0.5) / static_cast<double>(n)));
            }
            return a;
        }
        case VolumeKind::Pareto:
        case VolumeKind::TruncatedPareto: {
            // u = v_min / v; the density maps to beta u^{beta-1} on (u_lo, 1].
            const double beta = volumes.beta();
            const double v_min = volumes.v_min();
            double u_lo = 0.0, z = 1.0;
            if (volumes.kind() == VolumeKind::TruncatedPareto) {
                u_lo = v_min / volumes.v_max();
                z = 1.0 - std::pow(u_lo, beta);
            }
            const auto gl = gauss_legendre(n);
            const double mid = 0.5 * (u_lo + 1.0), half = 0.5 * (1.0 - u_lo);
            a.v.reserve(n);
            a.w.reserve(n);
            for (int i = 0; i < n; ++i) {
                const double u = mid + half * gl.nodes[i];
                a.v.push_back(v_min / u);
                a.w.push_back(gl.weights[i] * half * beta * std::pow(u, beta - 1.0) / z);
            }
            return a;
        }
    }
    throw std::logic_error("volume_atoms: unknown kind");
}

namespace {

class NetworkBuilder {
  public:
    NetworkBuilder(const TrafficConfig& config, const CacheTopology& topology,
                   const NetworkOptions& opts)
        : config_(config), topology_(topology), opts_(opts) {
        if (opts_.age_points < 16) throw std::invalid_argument("network: age_points >= 16");
        flows_ = flows_from_config(config, topology);
        atoms_.reserve(config.classes.size());
        double tail = 0.0;
        for (const auto& c : config.classes) {
            atoms_.push_back(volume_atoms(c.volumes, opts_.volume_nodes));
            tail = std::max(tail, c.profile.tail_age(opts_.tail_eps));
        }
        a_max_ = tail;
        dt_ = a_max_ / static_cast<double>(opts_.age_points - 1);
        ages_.resize(opts_.age_points);
        for (int i = 0; i < opts_.age_points; ++i) ages_[i] = i * dt_;
    }

    NetworkSolution run() {
        NetworkSolution out;
        out.ages = ages_;
        for (const auto& f : flows_)
            out.exogenous_rate += f.gamma * config_.classes[f.class_index].volumes.mean();

        // Children are strictly deeper than their parents, so one bottom-up
        // pass (deepest first) is a complete fixed point on a tree.
        std::vector<std::string> order;
        for (const auto& n : topology_.nodes()) order.push_back(n.id);
        std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
            return depth(a) > depth(b);
        });
        for (const auto& id : order) {
            if (topology_.is_leaf(id))
                states_.emplace(id, solve_leaf(id));
            else
                states_.emplace(id, solve_parent(id));
        }

        double hit_p = 0.0, hit_i = 0.0;
        for (auto& [id, st] : states_) {
            hit_p += st.sol.hit_rate_poisson;
            hit_i += st.sol.hit_rate_improved;
            out.nodes.emplace(id, std::move(st.sol));
        }
        if (out.exogenous_rate > 0.0) {
            out.global_phit_poisson = hit_p / out.exogenous_rate;
            out.global_phit_improved = hit_i / out.exogenous_rate;
        }
        return out;
    }

  private:
    int depth(const std::string& id) const {
        int d = 0;
        for (const std::string* p = &topology_.parent(id); !p->empty();
             p = &topology_.parent(*p))
            ++d;
        return d;
    }

    std::size_t leaf_index(const std::string& id) const {
        const auto& leaves = topology_.leaves();
        const auto it = std::find(leaves.begin(), leaves.end(), id);
        return static_cast<std::size_t>(it - leaves.begin());
    }

    double window(const PopularityProfile& prof, double a, double T) const {
        if (T <= 0.0) return 0.0;
        if (std::isinf(T)) return prof.cdf(a);
        return prof.cdf(a) - prof.cdf(a - T);
    }

    NodeState solve_leaf(const std::string& id) const {
        const std::size_t f_idx = leaf_index(id);
        NodeState st;
        st.sol.id = id;
        st.sol.leaf = true;
        st.sol.capacity = static_cast<double>(topology_.node(id).capacity);

        struct Active {
            std::size_t flow;
            double share;
        };
        std::vector<Active> active;
        double gamma_leaf = 0.0;
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            const double s = flows_[i].leaf_share[f_idx];
            if (s > 0.0) {
                active.push_back({i, s});
                gamma_leaf += flows_[i].gamma;
            }
        }
        const int N = opts_.age_points;
        st.sol.p_in.assign(N, 0.0);
        st.sol.intensity.assign(N, 0.0);
        if (active.empty()) {
            st.sol.p_hit_poisson = st.sol.p_in;
            st.sol.p_hit_improved = st.sol.p_in;
            return st;
        }

        std::vector<ClassSpec> specs;
        std::set<int> filter;
        for (std::size_t j = 0; j < active.size(); ++j) {
            const auto& fl = flows_[active[j].flow];
            const auto& cls = config_.classes[fl.class_index];
            specs.push_back({cls.profile, cls.volumes, fl.gamma / gamma_leaf,
                             active[j].share, cls.label, cls.cacheable});
            if (!cls.cacheable) filter.insert(static_cast<int>(j));
        }
        const CheSolver solver(gamma_leaf, specs);
        const auto che = solver.solve_Tc_filtered(st.sol.capacity, filter);
        st.sol.T_C = che.T_C;
        st.sol.never_fills = che.never_fills;

        for (std::size_t j = 0; j < active.size(); ++j) {
            const auto& fl = flows_[active[j].flow];
            const auto& cls = config_.classes[fl.class_index];
            const double s = active[j].share;
            const double in_rate = fl.gamma * s * cls.volumes.mean();
            const double phit =
                cls.cacheable ? solver.class_hit_probability(j, st.sol.T_C) : 0.0;
            st.sol.incoming_rate += in_rate;
            st.sol.hit_rate_poisson += in_rate * phit;

            const auto& at = atoms_[fl.class_index];
            FlowCurves curves;
            curves.mu.resize(at.v.size());
            curves.cum.resize(at.v.size());
            for (std::size_t a = 0; a < at.v.size(); ++a) {
                auto& mu = curves.mu[a];
                mu.resize(N);
                double in_grid = 0.0, prev = 0.0;
                for (int i = 0; i < N; ++i) {
                    const double lam = at.v[a] * s * cls.profile.density(ages_[i]);
                    const double pin =
                        cls.cacheable
                            ? 1.0 - std::exp(-at.v[a] * s *
                                             window(cls.profile, ages_[i], st.sol.T_C))
                            : 0.0;
                    mu[i] = lam * (1.0 - pin);
                    st.sol.intensity[i] += fl.gamma * at.w[a] * lam;
                    st.sol.p_in[i] += fl.gamma * at.w[a] * lam * pin;
                    if (i > 0) in_grid += 0.5 * (prev + lam) * dt_;
                    prev = lam;
                }
                curves.cum[a] = trapezoid_cumsum(mu, dt_);
                st.sol.incoming_rate_grid += fl.gamma * at.w[a] * in_grid;
                st.sol.forwarded_rate_grid += fl.gamma * at.w[a] * curves.cum[a].back();
            }
            st.out.emplace(active[j].flow, std::move(curves));
        }
        st.sol.hit_rate_improved = st.sol.hit_rate_poisson;
        st.sol.forwarded_rate = st.sol.incoming_rate - st.sol.hit_rate_poisson;
        for (int i = 0; i < N; ++i)
            st.sol.p_in[i] =
                st.sol.intensity[i] > 0.0 ? st.sol.p_in[i] / st.sol.intensity[i] : 0.0;
        st.sol.p_hit_poisson = st.sol.p_in;
        st.sol.p_hit_improved = st.sol.p_in;
        return st;
    }

    // Occupancy of one (flow, atom) stream at eviction time T, from the
    // aggregated cumulative miss curve: grid part plus the analytic
    // extension for ages beyond the grid, where the incoming intensity is
    // zero but previously requested contents may still be cached.
    double stream_occupancy(const std::vector<double>& cum, double T) const {
        const int N = opts_.age_points;
        double s = 0.0, prev = 0.0;
        for (int i = 1; i < N; ++i) {
            const double cur = 1.0 - std::exp(-(cum[i] - cum_at(cum, ages_[i] - T, dt_)));
            s += 0.5 * (prev + cur) * dt_;
            prev = cur;
        }
        const double end = cum.back();
        // For a > a_max: p_in(a) = 1 - exp(-(end - cum(a - T))).
        s += std::max(0.0, T - a_max_) * (1.0 - std::exp(-end));
        const double b0 = std::max(a_max_ - T, 0.0);
        if (b0 < a_max_) {
            const auto g = [&](double b) {
                return 1.0 - std::exp(-(end - cum_at(cum, b, dt_)));
            };
            const auto i0 = static_cast<std::size_t>(b0 / dt_) + 1;
            double x = b0, gx = g(b0);
            for (std::size_t i = i0; i < static_cast<std::size_t>(N); ++i) {
                const double gy = g(ages_[i]);
                s += 0.5 * (gx + gy) * (ages_[i] - x);
                x = ages_[i];
                gx = gy;
            }
        }
        return s;
    }

    NodeState solve_parent(const std::string& id) {
        NodeState st;
        st.sol.id = id;
        st.sol.capacity = static_cast<double>(topology_.node(id).capacity);
        const auto& children = topology_.node(id).children;
        const int N = opts_.age_points;

        // Aggregate incoming curves: per flow and atom, the sum of the
        // children's miss intensities (the expected-intensity propagation).
        struct InFlow {
            std::vector<std::vector<double>> mu, cum;          // aggregated
            std::vector<const FlowCurves*> child;              // per child
        };
        std::map<std::size_t, InFlow> in;
        for (std::size_t c = 0; c < children.size(); ++c) {
            const auto& cst = states_.at(children[c]);
            for (const auto& [fi, curves] : cst.out) {
                auto& slot = in[fi];
                if (slot.mu.empty()) {
                    slot.mu.assign(curves.mu.size(), std::vector<double>(N, 0.0));
                    slot.cum.assign(curves.mu.size(), std::vector<double>(N, 0.0));
                    slot.child.assign(children.size(), nullptr);
                }
                slot.child[c] = &curves;
                for (std::size_t a = 0; a < curves.mu.size(); ++a)
                    for (int i = 0; i < N; ++i) {
                        slot.mu[a][i] += curves.mu[a][i];
                        slot.cum[a][i] += curves.cum[a][i];
                    }
            }
        }

        for (const auto& [fi, flow_in] : in) {
            const auto& at = atoms_[flows_[fi].class_index];
            for (std::size_t a = 0; a < flow_in.cum.size(); ++a)
                st.sol.incoming_rate_grid +=
                    flows_[fi].gamma * at.w[a] * flow_in.cum[a].back();
        }
        for (const auto& cid : children) {
            st.sol.incoming_rate += states_.at(cid).sol.forwarded_rate;
        }

        // Eviction time from the occupancy constraint under the Poisson
        // surrogate; cacheable flows only.
        const auto occupancy = [&](double T) {
            double c = 0.0;
            for (const auto& [fi, flow_in] : in) {
                if (!config_.classes[flows_[fi].class_index].cacheable) continue;
                const auto& at = atoms_[flows_[fi].class_index];
                for (std::size_t a = 0; a < flow_in.cum.size(); ++a)
                    c += flows_[fi].gamma * at.w[a] * stream_occupancy(flow_in.cum[a], T);
            }
            return c;
        };
        double T_p = 0.0;
        if (st.sol.capacity > 0.0 && st.sol.incoming_rate_grid > 0.0) {
            double lo = st.sol.capacity / st.sol.incoming_rate_grid;
            if (occupancy(lo) > st.sol.capacity) lo = 0.0;
            double hi = std::max(2.0 * lo, 1e-9);
            while (occupancy(hi) < st.sol.capacity) {
                if (hi > kTcCeiling) {
                    st.sol.never_fills = true;
                    break;
                }
                lo = hi;
                hi *= 2.0;
            }
            if (st.sol.never_fills) {
                T_p = kInf;
            } else {
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double c_mid = occupancy(mid);
                    (c_mid < st.sol.capacity ? lo : hi) = mid;
                    if (hi - lo < 1e-12 * hi) break;
                    if (std::fabs(c_mid - st.sol.capacity) <=
                        1e-9 * std::max(1.0, st.sol.capacity))
                        break;
                }
                T_p = 0.5 * (lo + hi);
            }
        } else if (st.sol.capacity > 0.0) {
            st.sol.never_fills = true;
            T_p = kInf;
        }
        st.sol.T_C = T_p;

        // Hit integrals: the plain Poisson approximation (p_hit = p_in) and
        // the improved one, which conditions on the arriving child c': no
        // request can have come through c' within its own eviction window,
        // so hits need either an older arrival from anyone or a recent
        // arrival from a different child.
        st.sol.p_in.assign(N, 0.0);
        st.sol.p_hit_improved.assign(N, 0.0);
        st.sol.intensity.assign(N, 0.0);
        double hit_grid_p = 0.0, hit_grid_i = 0.0;
        std::vector<double> pin_row(N), numer_row(N);
        for (auto& [fi, flow_in] : in) {
            const bool cacheable = config_.classes[flows_[fi].class_index].cacheable;
            const auto& at = atoms_[flows_[fi].class_index];
            const double g = flows_[fi].gamma;
            for (std::size_t a = 0; a < flow_in.mu.size(); ++a) {
                const auto& mu = flow_in.mu[a];
                const auto& M = flow_in.cum[a];
                for (int i = 0; i < N; ++i) {
                    pin_row[i] = cacheable
                                     ? 1.0 - std::exp(-(M[i] - cum_at(M, ages_[i] - T_p, dt_)))
                                     : 0.0;
                    numer_row[i] = 0.0;
                }
                if (cacheable && T_p > 0.0) {
                    for (std::size_t c = 0; c < children.size(); ++c) {
                        if (!flow_in.child[c]) continue;
                        const auto& cmu = flow_in.child[c]->mu[a];
                        const auto& ccum = flow_in.child[c]->cum[a];
                        const double T_c = states_.at(children[c]).sol.T_C;
                        const double m = std::min(T_c, T_p);
                        for (int i = 0; i < N; ++i) {
                            if (cmu[i] == 0.0) continue;
                            const double am = ages_[i] - m;
                            const double older =
                                cum_at(M, am, dt_) - cum_at(M, ages_[i] - T_p, dt_);
                            const double others = (M[i] - cum_at(M, am, dt_)) -
                                                  (ccum[i] - cum_at(ccum, am, dt_));
                            const double ph = 1.0 - std::exp(-older - std::max(others, 0.0));
                            numer_row[i] += cmu[i] * ph;
                        }
                    }
                }
                double acc_p = 0.0, acc_i = 0.0;
                for (int i = 1; i < N; ++i) {
                    acc_p += 0.5 * (mu[i - 1] * pin_row[i - 1] + mu[i] * pin_row[i]) * dt_;
                    acc_i += 0.5 * (numer_row[i - 1] + numer_row[i]) * dt_;
                }
                hit_grid_p += g * at.w[a] * acc_p;
                hit_grid_i += g * at.w[a] * acc_i;
                for (int i = 0; i < N; ++i) {
                    st.sol.intensity[i] += g * at.w[a] * mu[i];
                    st.sol.p_in[i] += g * at.w[a] * mu[i] * pin_row[i];
                    st.sol.p_hit_improved[i] += g * at.w[a] * numer_row[i];
                }
                // Outgoing miss curves reuse the aggregated buffers in place.
                auto& out_mu = flow_in.mu[a];
                for (int i = 0; i < N; ++i) out_mu[i] *= (1.0 - pin_row[i]);
                flow_in.cum[a] = trapezoid_cumsum(out_mu, dt_);
            }
        }
        const double ratio_p =
            st.sol.incoming_rate_grid > 0.0 ? hit_grid_p / st.sol.incoming_rate_grid : 0.0;
        const double ratio_i =
            st.sol.incoming_rate_grid > 0.0 ? hit_grid_i / st.sol.incoming_rate_grid : 0.0;
        st.sol.hit_rate_poisson = st.sol.incoming_rate * std::clamp(ratio_p, 0.0, 1.0);
        st.sol.hit_rate_improved = st.sol.incoming_rate * std::clamp(ratio_i, 0.0, 1.0);
        st.sol.forwarded_rate = st.sol.incoming_rate - st.sol.hit_rate_poisson;

        for (int i = 0; i < N; ++i) {
            const double w = st.sol.intensity[i];
            st.sol.p_in[i] = w > 0.0 ? st.sol.p_in[i] / w : 0.0;
            st.sol.p_hit_improved[i] =
                w > 0.0 ? std::clamp(st.sol.p_hit_improved[i] / w, 0.0, 1.0) : 0.0;
        }
        st.sol.p_hit_poisson = st.sol.p_in;

        for (auto& [fi, flow_in] : in) {
            FlowCurves curves;
            curves.mu = std::move(flow_in.mu);
            curves.cum = std::move(flow_in.cum);
            const auto& at = atoms_[flows_[fi].class_index];
            for (std::size_t a = 0; a < curves.cum.size(); ++a)
                st.sol.forwarded_rate_grid +=
                    flows_[fi].gamma * at.w[a] * curves.cum[a].back();
            st.out.emplace(fi, std::move(curves));
        }
        return st;
    }

    const TrafficConfig& config_;
    const CacheTopology& topology_;
    NetworkOptions opts_;
    std::vector<Flow> flows_;
    std::vector<VolumeAtoms> atoms_;
    std::vector<double> ages_;
    double a_max_ = 0.0;
    double dt_ = 0.0;
    std::map<std::string, NodeState> states_;
};

}  // namespace

NetworkSolution solve_network(const TrafficConfig& config, const CacheTopology& topology,
                              const NetworkOptions& opts) {
    return NetworkBuilder(config, topology, opts).run();
}

}  // namespace snm
