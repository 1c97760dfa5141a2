#pragma once

// Adversarial instances: the truncated universal graph with its phase
// schedule, the finite lower-bound instance, and ratio measurement.

#include "bifreq/allocation.hpp"
#include "bifreq/checker.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace bifreq {

/// A request for more resources than the configured guard allows.
class ScaleRefusal : public std::runtime_error {
public:
    ScaleRefusal(std::string what, BigInt required, BigInt cap)
        : std::runtime_error(std::move(what)), required(std::move(required)), cap(std::move(cap))
    {
    }
    BigInt required;
    BigInt cap;
};

inline constexpr std::int64_t kMaxUniversalHorizon = 1000;
inline constexpr std::int64_t kMaxExportEdges = 5'000'000;

struct UniversalVertex {
    Side side;
    std::int64_t t, k;
    auto operator<=>(const UniversalVertex&) const = default;
};

inline std::string universal_id(const UniversalVertex& v)
{
    return std::string(to_string(v.side)) + ":" + std::to_string(v.t) + ":" + std::to_string(v.k);
}

/// (t,k)_A ~ (t',k')_B iff k + k' <= max(t, t').
constexpr bool universal_adjacent(std::int64_t t, std::int64_t k, std::int64_t t2, std::int64_t k2)
{
    return k + k2 <= std::max(t, t2);
}

/// The universal graph truncated at horizon T: vertices (t,k)_c with
/// 1 <= k <= t <= T. Adjacency is evaluated from the rule, never stored.
class UniversalGraph {
public:
    explicit UniversalGraph(std::int64_t horizon) : m_T(horizon)
    {
        if (horizon < 1) throw std::invalid_argument("universal graph horizon must be at least 1");
        if (horizon > kMaxUniversalHorizon) {
            throw ScaleRefusal("universal graph horizon " + std::to_string(horizon) + " exceeds the limit " +
                                   std::to_string(kMaxUniversalHorizon),
                               horizon, kMaxUniversalHorizon);
        }
        m_half = static_cast<std::size_t>(horizon * (horizon + 1) / 2);
        m_coords.reserve(2 * m_half);
        for (Side c : {Side::A, Side::B}) {
            for (std::int64_t t = 1; t <= horizon; ++t) {
                for (std::int64_t k = 1; k <= t; ++k) m_coords.push_back({c, t, k});
            }
        }
    }

    std::int64_t horizon() const { return m_T; }
    std::size_t vertex_count() const { return 2 * m_half; }
    Side side(VertexId v) const { return m_coords[v].side; }
    const UniversalVertex& coords(VertexId v) const { return m_coords[v]; }
    std::string id(VertexId v) const { return universal_id(m_coords[v]); }

    VertexId index(Side c, std::int64_t t, std::int64_t k) const
    {
        if (t < 1 || t > m_T || k < 1 || k > t) throw std::out_of_range("no universal vertex (" + std::to_string(t) +
                                                                        "," + std::to_string(k) + ")");
        return (c == Side::B ? m_half : 0) + static_cast<std::size_t>(t * (t - 1) / 2 + k - 1);
    }

    bool adjacent(VertexId u, VertexId w) const
    {
        const auto& a = m_coords[u];
        const auto& b = m_coords[w];
        return a.side != b.side && universal_adjacent(a.t, a.k, b.t, b.k);
    }

    template <class F>
    void for_each_neighbor(VertexId v, F&& f) const
    {
        const auto [c, t, k] = m_coords[v];
        const Side o = other(c);
        for (std::int64_t t2 = 1; t2 <= m_T; ++t2) {
            const std::int64_t kmax = std::min(t2, std::max(t, t2) - k);
            for (std::int64_t k2 = 1; k2 <= kmax; ++k2) f(index(o, t2, k2));
        }
    }

    std::int64_t degree(VertexId v) const
    {
        const auto [c, t, k] = m_coords[v];
        // rows t' <= t contribute min(t', t - k); rows t' > t contribute t' - k
        const std::int64_t d = t - k;
        std::int64_t n = d * (d + 1) / 2 + d * (t - d);
        n += (m_T * (m_T + 1) / 2 - t * (t + 1) / 2) - (m_T - t) * k;
        return n;
    }

    std::int64_t edge_count() const
    {
        std::int64_t n = 0;
        for (VertexId v = 0; v < m_half; ++v) n += degree(v);
        return n;
    }

    /// Static optimum of a load vector: per-row prefix maxima of the B side
    /// answer, for each loaded A vertex, the best neighbor in every row.
    std::int64_t max_edge_load_sum(std::span<const std::int64_t> loads) const
    {
        std::int64_t best = 0;
        for (auto l : loads) best = std::max(best, l);
        std::vector<std::vector<std::int64_t>> prefix(static_cast<std::size_t>(m_T + 1));
        for (std::int64_t t = 1; t <= m_T; ++t) {
            auto& row = prefix[t];
            row.assign(static_cast<std::size_t>(t + 1), 0);
            for (std::int64_t k = 1; k <= t; ++k) row[k] = std::max(row[k - 1], loads[index(Side::B, t, k)]);
        }
        for (VertexId v = 0; v < m_half; ++v) {
            const std::int64_t a = loads[v];
            if (a == 0) continue;
            const auto [c, t, k] = m_coords[v];
            for (std::int64_t t2 = 1; t2 <= m_T; ++t2) {
                const std::int64_t kmax = std::min(t2, std::max(t, t2) - k);
                if (kmax >= 1) best = std::max(best, a + prefix[t2][kmax]);
            }
        }
        return best;
    }

private:
    std::int64_t m_T;
    std::size_t m_half = 0;
    std::vector<UniversalVertex> m_coords;
};

namespace detail {

/// 2D prefix maximum over [1..i] x [1..j] under point updates that only grow.
class PrefixMax2D {
public:
    PrefixMax2D(std::int64_t n1, std::int64_t n2)
        : m_n1(n1), m_n2(n2), m_tree(static_cast<std::size_t>((n1 + 1) * (n2 + 1)), 0)
    {
    }

    void raise(std::int64_t i, std::int64_t j, std::int64_t value)
    {
        for (std::int64_t x = i; x <= m_n1; x += x & -x) {
            for (std::int64_t y = j; y <= m_n2; y += y & -y) {
                auto& cell = m_tree[static_cast<std::size_t>(x * (m_n2 + 1) + y)];
                cell = std::max(cell, value);
            }
        }
    }

    std::int64_t query(std::int64_t i, std::int64_t j) const
    {
        std::int64_t best = 0;
        for (std::int64_t x = std::min(i, m_n1); x > 0; x -= x & -x) {
            for (std::int64_t y = std::min(j, m_n2); y > 0; y -= y & -y) {
                best = std::max(best, m_tree[static_cast<std::size_t>(x * (m_n2 + 1) + y)]);
            }
        }
        return best;
    }

private:
    std::int64_t m_n1, m_n2;
    std::vector<std::int64_t> m_tree;
};

} // namespace detail

/// Neighbor-load maximum on the universal graph in O(log^2 T).
///
/// Neighbors of (t,k) in rows t' <= t are those with k' <= t - k; in rows
/// t' > t those with t' - k' >= k. Each side keeps one prefix-max tree per
/// region, the second indexed by reversed (t', t' - k').
class UniversalNeighborLoads {
public:
    explicit UniversalNeighborLoads(const UniversalGraph& g)
        : m_graph(&g), m_loads(g.vertex_count(), 0),
          m_low{detail::PrefixMax2D(g.horizon(), g.horizon()), detail::PrefixMax2D(g.horizon(), g.horizon())},
          m_high{detail::PrefixMax2D(g.horizon(), g.horizon()), detail::PrefixMax2D(g.horizon(), g.horizon())}
    {
    }

    std::int64_t load(VertexId v) const { return m_loads[v]; }
    std::span<const std::int64_t> loads() const { return m_loads; }

    void set_load(VertexId v, std::int64_t l)
    {
        if (l < m_loads[v]) throw std::logic_error("universal loads never decrease");
        m_loads[v] = l;
        const auto [c, t, k] = m_graph->coords(v);
        const std::int64_t T = m_graph->horizon();
        const int s = static_cast<int>(c);
        m_low[s].raise(t, k, l);
        m_high[s].raise(T + 1 - t, T - (t - k), l);
    }

    std::int64_t max_neighbor_load(VertexId v) const
    {
        const auto [c, t, k] = m_graph->coords(v);
        const std::int64_t T = m_graph->horizon();
        const int o = static_cast<int>(other(c));
        std::int64_t best = 0;
        if (t - k >= 1) best = m_low[o].query(t, t - k);
        if (T - t >= 1 && T - k >= 1) best = std::max(best, m_high[o].query(T - t, T - k));
        return best;
    }

private:
    const UniversalGraph* m_graph;
    std::vector<std::int64_t> m_loads;
    std::array<detail::PrefixMax2D, 2> m_low;
    std::array<detail::PrefixMax2D, 2> m_high;
};

/// Per frequency, side and row: the smallest k holding the frequency. A
/// vertex (t,k) collides with row t' of the other side iff that minimum is
/// at most max(t, t') - k.
class UniversalCollisions {
public:
    explicit UniversalCollisions(const UniversalGraph& g) : m_graph(&g) {}

    std::optional<VertexId> find_holder(VertexId u, Frequency f, std::span<const FrequencySet>) const
    {
        auto it = m_rows.find(f);
        if (it == m_rows.end()) return std::nullopt;
        const auto [c, t, k] = m_graph->coords(u);
        const Side o = other(c);
        const auto& rows = it->second[static_cast<int>(o)];
        for (std::int64_t t2 = 1; t2 < static_cast<std::int64_t>(rows.size()); ++t2) {
            if (rows[t2] <= std::max(t, t2) - k) return m_graph->index(o, t2, rows[t2]);
        }
        return std::nullopt;
    }

    void record(VertexId u, Frequency f)
    {
        const auto [c, t, k] = m_graph->coords(u);
        auto [it, fresh] = m_rows.try_emplace(f);
        if (fresh) {
            for (auto& side : it->second) side.assign(static_cast<std::size_t>(m_graph->horizon() + 1), kNone);
        }
        auto& cell = it->second[static_cast<int>(c)][t];
        cell = std::min(cell, k);
    }

private:
    static constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max() / 4;
    const UniversalGraph* m_graph;
    std::map<Frequency, std::array<std::vector<std::int64_t>, 2>> m_rows;
};

template <>
struct neighbor_load_index<UniversalGraph> {
    using type = UniversalNeighborLoads;
};

template <>
struct collision_index<UniversalGraph> {
    using type = UniversalCollisions;
};

/// Requests of phase t: k requests at every (t,k)_c, in (side, t, k,
/// repetition) order.
inline std::vector<VertexId> phase_requests(const UniversalGraph& g, std::int64_t t)
{
    std::vector<VertexId> out;
    for (Side c : {Side::A, Side::B}) {
        for (std::int64_t k = 1; k <= t; ++k) out.insert(out.end(), static_cast<std::size_t>(k), g.index(c, t, k));
    }
    return out;
}

/// All phases 1..T concatenated.
inline std::vector<VertexId> universal_requests(const UniversalGraph& g)
{
    std::vector<VertexId> out;
    for (std::int64_t t = 1; t <= g.horizon(); ++t) {
        auto phase = phase_requests(g, t);
        out.insert(out.end(), phase.begin(), phase.end());
    }
    return out;
}

namespace detail {

/// Validity of a universal-graph assignment, grown one complete row at a
/// time. Kept apart from the allocator's own index: it reads the finished
/// sets and compares whole rows by their per-frequency minimum k.
class UniversalValidity {
public:
    explicit UniversalValidity(const UniversalGraph& g) : m_graph(&g) {}

    /// Adds row t of both sides; returns a conflicting pair if one appears.
    std::optional<std::pair<VertexId, VertexId>> absorb_row(std::int64_t t, std::span<const FrequencySet> sets)
    {
        std::vector<Frequency> touched;
        for (Side c : {Side::A, Side::B}) {
            for (std::int64_t k = 1; k <= t; ++k) {
                for (const Band& b : sets[m_graph->index(c, t, k)].bands()) {
                    for (std::int64_t i = b.first; i <= b.last; ++i) {
                        const Frequency f{b.pool, i};
                        auto [it, fresh] = m_rows.try_emplace(f);
                        if (fresh) {
                            for (auto& side : it->second) {
                                side.assign(static_cast<std::size_t>(m_graph->horizon() + 1), kNone);
                            }
                        }
                        auto& cell = it->second[static_cast<int>(c)][t];
                        if (cell == kNone) touched.push_back(f);
                        cell = std::min(cell, k);
                    }
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (const Frequency& f : touched) {
            const auto& rows = m_rows[f];
            for (Side c : {Side::A, Side::B}) {
                const std::int64_t k = rows[static_cast<int>(c)][t];
                if (k == kNone) continue;
                const Side o = other(c);
                const auto& theirs = rows[static_cast<int>(o)];
                for (std::int64_t t2 = 1; t2 <= t; ++t2) {
                    if (theirs[t2] != kNone && universal_adjacent(t, k, t2, theirs[t2])) {
                        return std::pair{m_graph->index(c, t, k), m_graph->index(o, t2, theirs[t2])};
                    }
                }
            }
        }
        return std::nullopt;
    }

private:
    static constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max() / 4;
    const UniversalGraph* m_graph;
    std::map<Frequency, std::array<std::vector<std::int64_t>, 2>> m_rows;
};

} // namespace detail

struct PhaseRecord {
    std::int64_t t = 0;
    std::int64_t opt = 0;         // recomputed static optimum
    std::int64_t allocator_t = 0; // the allocator's running optimum
    std::int64_t used = 0;        // distinct frequencies so far
    std::int64_t bound = 0;       // floor(r t) + lambda
    bool within = true;           // used <= r t + lambda
};

struct RunReport {
    std::string system;
    GoldenNumber r;
    std::int64_t lambda = 0;
    std::vector<PhaseRecord> phases;

    bool all_within() const
    {
        return std::all_of(phases.begin(), phases.end(), [](const PhaseRecord& p) { return p.within; });
    }
    bool opt_matches() const
    {
        return std::all_of(phases.begin(), phases.end(), [](const PhaseRecord& p) { return p.opt == p.t; });
    }
};

struct RunOptions {
    std::optional<GoldenNumber> r;     // defaults to the system's claim
    std::optional<std::int64_t> lambda;
    bool verify_phases = true;         // independent validity and optimum per phase
};

/// Replays the phase script of the universal graph through the allocator.
/// Collisions and F1 breaches abort with the allocator's exception.
inline RunReport run_universal(const FSystemSpec& sys, std::int64_t horizon, const RunOptions& opt = {})
{
    const UniversalGraph g(horizon);
    Allocator<UniversalGraph> alloc(g, sys);
    detail::UniversalValidity validity(g);
    RunReport report{sys.name, opt.r.value_or(sys.claimed_ratio), opt.lambda.value_or(sys.claimed_lambda), {}};

    for (std::int64_t t = 1; t <= horizon; ++t) {
        for (VertexId v : phase_requests(g, t)) alloc.allocate(v);
        PhaseRecord rec;
        rec.t = t;
        rec.allocator_t = alloc.current_t();
        rec.used = alloc.distinct_used();
        const GoldenNumber rt = report.r * GoldenNumber(t);
        rec.bound = rt.floor().convert_to<std::int64_t>() + report.lambda;
        rec.within = GoldenNumber(rec.used - report.lambda) <= rt;
        if (opt.verify_phases) {
            rec.opt = static_opt(g, alloc.loads());
            for (Side c : {Side::A, Side::B}) {
                for (std::int64_t k = 1; k <= t; ++k) {
                    const VertexId v = g.index(c, t, k);
                    if (alloc.assigned(v).size() != alloc.load(v)) {
                        throw std::logic_error("vertex " + g.id(v) + " holds " + std::to_string(alloc.assigned(v).size()) +
                                               " frequencies for load " + std::to_string(alloc.load(v)));
                    }
                }
            }
            if (auto clash = validity.absorb_row(t, alloc.assignment())) {
                const auto shared = set_intersection(alloc.assigned(clash->first), alloc.assigned(clash->second));
                throw CollisionError("adjacent vertices " + g.id(clash->first) + " and " + g.id(clash->second) +
                                         " share " + to_string(shared),
                                     clash->first, clash->second, shared.min_canonical());
            }
        } else {
            rec.opt = t;
        }
        report.phases.push_back(rec);
    }
    return report;
}

/// max over phases of (used - lambda) / opt.
inline Rational measure_ratio(const RunReport& report, std::int64_t lambda)
{
    if (report.phases.empty()) throw std::invalid_argument("cannot measure the ratio of an empty report");
    Rational best = Rational(report.phases.front().used - lambda) / report.phases.front().opt;
    for (const auto& p : report.phases) best = std::max(best, Rational(p.used - lambda) / p.opt);
    return best;
}

/// The universal graph as an explicit instance (graph file plus request ids).
inline GraphSpec universal_graph_spec(const UniversalGraph& g, std::int64_t max_edges = kMaxExportEdges)
{
    const std::int64_t edges = g.edge_count();
    if (edges > max_edges) {
        throw ScaleRefusal("universal graph with horizon " + std::to_string(g.horizon()) + " has " +
                               std::to_string(edges) + " edges, above the export limit " + std::to_string(max_edges),
                           edges, max_edges);
    }
    GraphSpec spec;
    for (VertexId v = 0; v < g.vertex_count(); ++v) spec.add_vertex(g.id(v), g.side(v));
    spec.edges.reserve(static_cast<std::size_t>(edges));
    for (VertexId v = 0; v < g.vertex_count() / 2; ++v) {
        g.for_each_neighbor(v, [&](VertexId w) { spec.edges.emplace_back(g.id(v), g.id(w)); });
    }
    return spec;
}

struct LowerBoundInstance {
    BigInt theta;
    std::int64_t lambda = 0;
    std::vector<UniversalVertex> vertices; // sorted by (t, side, k)
    GraphSpec graph;
    std::vector<std::string> requests;     // vertex ids, phase ordered
};

/// Finite subgraph of the universal graph on the families (t_i,t_i),
/// (2t_i,t_i), (3t_i,2t_i), (3t_i/2,t_i) for i = 0..theta, both sides, with
/// t_i = 6 theta lambda 2^i. Refuses when t_theta exceeds scale_cap.
inline LowerBoundInstance lower_bound_instance(const BigInt& theta, std::int64_t lambda, std::int64_t scale_cap)
{
    if (theta < 1) throw std::invalid_argument("theta must be at least 1");
    if (lambda < 1) throw std::invalid_argument("lambda must be at least 1");
    const BigInt top = theta <= 100000 ? gamma_level(theta, lambda, theta.convert_to<std::int64_t>())
                                       : BigInt(-1);
    if (top < 0 || top > scale_cap) {
        const std::string shown = top < 0 ? "6*" + theta.str() + "*" + std::to_string(lambda) + "*2^" + theta.str()
                                          : top.str();
        throw ScaleRefusal("t_theta = " + shown + " exceeds the scale cap " + std::to_string(scale_cap), top,
                           scale_cap);
    }
    LowerBoundInstance out;
    out.theta = theta;
    out.lambda = lambda;
    const std::int64_t n = theta.convert_to<std::int64_t>();
    for (std::int64_t i = 0; i <= n; ++i) {
        const std::int64_t ti = gamma_level(theta, lambda, i).convert_to<std::int64_t>();
        for (Side c : {Side::A, Side::B}) {
            for (auto [t, k] : {std::pair{ti, ti}, {2 * ti, ti}, {3 * ti, 2 * ti}, {3 * ti / 2, ti}}) {
                out.vertices.push_back({c, t, k});
            }
        }
    }
    std::sort(out.vertices.begin(), out.vertices.end(), [](const UniversalVertex& x, const UniversalVertex& y) {
        return std::tie(x.t, x.side, x.k) < std::tie(y.t, y.side, y.k);
    });
    out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()), out.vertices.end());

    for (const auto& v : out.vertices) out.graph.add_vertex(universal_id(v), v.side);
    for (const auto& a : out.vertices) {
        if (a.side != Side::A) continue;
        for (const auto& b : out.vertices) {
            if (b.side == Side::B && universal_adjacent(a.t, a.k, b.t, b.k)) {
                out.graph.edges.emplace_back(universal_id(a), universal_id(b));
            }
        }
    }
    // Phases in increasing t; within a phase (side, k, repetition) order.
    for (const auto& v : out.vertices) {
        out.requests.insert(out.requests.end(), static_cast<std::size_t>(v.k), universal_id(v));
    }
    return out;
}

} // namespace bifreq
