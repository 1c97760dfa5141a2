#pragma once

// Static optimum and allocation for bipartite graphs, an exhaustive optimum
// oracle, and the incremental allocator driven by an F-system.

#include "bifreq/fsystem.hpp"
#include "bifreq/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bifreq {

struct BipartiteInstance {
    BipartiteGraph graph;
    std::vector<std::int64_t> loads;
};

/// max over edges of l_u + l_v, and at least the largest single load.
template <Topology G>
std::int64_t static_opt(const G& g, std::span<const std::int64_t> loads)
{
    if constexpr (requires { g.max_edge_load_sum(loads); }) {
        return g.max_edge_load_sum(loads);
    } else {
        std::int64_t best = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            best = std::max(best, loads[v]);
            g.for_each_neighbor(v, [&](VertexId w) { best = std::max(best, loads[v] + loads[w]); });
        }
        return best;
    }
}

inline std::int64_t static_opt(const BipartiteInstance& inst) { return static_opt(inst.graph, inst.loads); }

/// Optimal offline allocation with plain frequencies: A-side vertices get
/// 1..l_u, B-side vertices get w-l_u+1..w where w is the static optimum.
inline std::vector<FrequencySet> static_allocate(const BipartiteInstance& inst)
{
    const std::int64_t omega = static_opt(inst);
    std::vector<FrequencySet> out(inst.graph.vertex_count());
    for (VertexId v = 0; v < out.size(); ++v) {
        const std::int64_t l = inst.loads[v];
        out[v] = inst.graph.side(v) == Side::A ? FrequencySet::band(PoolTag::Plain, 1, l)
                                               : FrequencySet::band(PoolTag::Plain, omega - l + 1, omega);
    }
    return out;
}

namespace detail {

class BruteForceSearch {
public:
    BruteForceSearch(const BipartiteInstance& inst, int palette) : m_inst(inst), m_palette(palette)
    {
        m_masks.assign(inst.graph.vertex_count(), 0);
    }

    bool feasible() { return place(0); }

private:
    bool place(VertexId v)
    {
        if (v == m_masks.size()) return true;
        const int need = static_cast<int>(m_inst.loads[v]);
        unsigned blocked = 0;
        for (VertexId w : m_inst.graph.neighbors(v)) {
            if (w < v) blocked |= m_masks[w];
        }
        const unsigned full = (1u << m_palette) - 1;
        for (unsigned mask = 0; mask <= full; ++mask) {
            if (std::popcount(mask) != need || (mask & blocked)) continue;
            m_masks[v] = mask;
            if (place(v + 1)) return true;
        }
        m_masks[v] = 0;
        return false;
    }

    const BipartiteInstance& m_inst;
    int m_palette;
    std::vector<unsigned> m_masks;
};

} // namespace detail

/// Exact minimum number of distinct frequencies, by exhaustive search over
/// palettes 0, 1, 2, ... Declines (nullopt) when the total load exceeds
/// budget_cap.
inline std::optional<std::int64_t> brute_force_opt(const BipartiteInstance& inst, std::int64_t budget_cap = 10)
{
    std::int64_t total = 0;
    for (auto l : inst.loads) {
        if (l < 0) throw std::invalid_argument("negative load");
        total += l;
    }
    if (total > budget_cap || total > 24) return std::nullopt;
    for (int palette = 0; palette <= total; ++palette) {
        if (detail::BruteForceSearch(inst, palette).feasible()) return palette;
    }
    return total;
}

/// The F-system returned a set too small for the requested load.
class F1Breach : public std::runtime_error {
public:
    F1Breach(Side side, std::int64_t t, std::int64_t k, std::int64_t size)
        : std::runtime_error("F-system breaks F1 at F^" + std::string(to_string(side)) + "_{" + std::to_string(t) +
                             "," + std::to_string(k) + "}: size " + std::to_string(size) + " < " + std::to_string(k)),
          side(side), t(t), k(k), size(size)
    {
    }
    Side side;
    std::int64_t t, k, size;
};

/// Two adjacent vertices hold the same frequency.
class CollisionError : public std::runtime_error {
public:
    CollisionError(std::string what, VertexId vertex, VertexId neighbor, Frequency frequency)
        : std::runtime_error(std::move(what)), vertex(vertex), neighbor(neighbor), frequency(frequency)
    {
    }
    VertexId vertex;
    VertexId neighbor;
    Frequency frequency;
};

/// Loads per vertex with a neighbor-maximum query by scanning adjacency.
template <Topology G>
class ScanNeighborLoads {
public:
    explicit ScanNeighborLoads(const G& g) : m_graph(&g), m_loads(g.vertex_count(), 0) {}

    std::int64_t load(VertexId v) const { return m_loads[v]; }
    void set_load(VertexId v, std::int64_t l) { m_loads[v] = l; }
    std::span<const std::int64_t> loads() const { return m_loads; }

    std::int64_t max_neighbor_load(VertexId v) const
    {
        std::int64_t best = 0;
        m_graph->for_each_neighbor(v, [&](VertexId w) { best = std::max(best, m_loads[w]); });
        return best;
    }

private:
    const G* m_graph;
    std::vector<std::int64_t> m_loads;
};

/// Finds a neighbor already holding a frequency by scanning adjacency.
template <Topology G>
class ScanCollisions {
public:
    explicit ScanCollisions(const G& g) : m_graph(&g) {}

    std::optional<VertexId> find_holder(VertexId u, Frequency f, std::span<const FrequencySet> assigned) const
    {
        std::optional<VertexId> hit;
        m_graph->for_each_neighbor(u, [&](VertexId w) {
            if (!hit && assigned[w].contains(f)) hit = w;
        });
        return hit;
    }

    void record(VertexId, Frequency) {}

private:
    const G* m_graph;
};

/// Topologies can supply faster indexes by specializing these.
template <class G>
struct neighbor_load_index {
    using type = ScanNeighborLoads<G>;
};

template <class G>
struct collision_index {
    using type = ScanCollisions<G>;
};

/// Incremental allocator built from an F-system.
///
/// On a request at u on side c the running optimum t is updated, k becomes
/// the new load of u, and u receives the smallest frequency (canonical order)
/// of F^c_{t,k} it does not hold yet. (F1) guarantees one exists and (F2)
/// that no neighbor holds it.
template <Topology G>
class Allocator {
public:
    struct Options {
        bool check_neighbors = true; // scan the neighborhood after every step
    };

    Allocator(const G& g, FSystemSpec sys, Options opt = {})
        : m_graph(&g), m_sys(std::move(sys)), m_opt(opt), m_loads(g), m_collisions(g), m_assigned(g.vertex_count())
    {
    }

    Frequency allocate(VertexId u)
    {
        if (u >= m_graph->vertex_count()) throw std::out_of_range("vertex " + std::to_string(u) + " does not exist");
        const Side c = m_graph->side(u);
        const std::int64_t k = m_loads.load(u) + 1;
        const std::int64_t t = std::max({m_t, k, k + m_loads.max_neighbor_load(u)});
        const FrequencySet candidates = m_sys(c, t, k);
        if (candidates.size() < k) throw F1Breach(c, t, k, candidates.size());
        const Frequency f = set_difference(candidates, m_assigned[u]).min_canonical();
        if (m_opt.check_neighbors) {
            if (auto w = m_collisions.find_holder(u, f, m_assigned)) {
                throw CollisionError("frequency " + to_string(f) + " assigned to vertex " + std::to_string(u) +
                                         " is already held by neighbor " + std::to_string(*w),
                                     u, *w, f);
            }
        }
        m_loads.set_load(u, k);
        m_collisions.record(u, f);
        m_t = t;
        m_assigned[u].insert(f);
        m_used.insert(f);
        return f;
    }

    std::int64_t current_t() const { return m_t; }
    std::int64_t load(VertexId v) const { return m_loads.load(v); }
    std::span<const std::int64_t> loads() const { return m_loads.loads(); }
    const FrequencySet& assigned(VertexId v) const { return m_assigned[v]; }
    const std::vector<FrequencySet>& assignment() const { return m_assigned; }
    std::int64_t distinct_used() const { return m_used.size(); }
    const FrequencySet& used() const { return m_used; }
    const FSystemSpec& system() const { return m_sys; }

private:
    const G* m_graph;
    FSystemSpec m_sys;
    Options m_opt;
    typename neighbor_load_index<G>::type m_loads;
    typename collision_index<G>::type m_collisions;
    std::vector<FrequencySet> m_assigned;
    FrequencySet m_used;
    std::int64_t m_t = 0;
};

/// Conditions (i) and (ii) for a complete assignment: |L_v| = l_v and
/// adjacent sets are disjoint. Returns the first offending edge, if any.
template <Topology G>
std::optional<std::pair<VertexId, VertexId>> find_conflict(const G& g, std::span<const FrequencySet> sets)
{
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        std::optional<VertexId> hit;
        g.for_each_neighbor(v, [&](VertexId w) {
            if (!hit && v < w && intersects(sets[v], sets[w])) hit = w;
        });
        if (hit) return std::pair{v, *hit};
    }
    return std::nullopt;
}

} // namespace bifreq
