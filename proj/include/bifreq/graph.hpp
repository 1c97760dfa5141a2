#pragma once

// Bipartite conflict graphs with named vertices.

#include "bifreq/frequency.hpp"

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bifreq {

using VertexId = std::size_t;

/// Anything the allocator can run on: vertices 0..n-1 with a side each and
/// an enumerable neighborhood.
template <class G>
concept Topology = requires(const G& g, VertexId v) {
    { g.vertex_count() } -> std::convertible_to<std::size_t>;
    { g.side(v) } -> std::same_as<Side>;
    g.for_each_neighbor(v, [](VertexId) {});
};

class NotBipartite : public std::runtime_error {
public:
    NotBipartite(std::string what, std::vector<std::string> witness)
        : std::runtime_error(std::move(what)), m_witness(std::move(witness))
    {
    }

    /// Vertex ids along an odd cycle (or an inconsistent path for given sides).
    const std::vector<std::string>& witness() const { return m_witness; }

private:
    std::vector<std::string> m_witness;
};

/// Input description of a graph; sides are optional per vertex.
struct GraphSpec {
    std::vector<std::string> ids;
    std::vector<std::optional<Side>> sides;
    std::vector<std::pair<std::string, std::string>> edges;

    void add_vertex(std::string id, std::optional<Side> side = std::nullopt)
    {
        ids.push_back(std::move(id));
        sides.push_back(side);
    }
};

namespace detail {

inline std::vector<std::string> join_paths(const std::vector<std::string>& ids, const std::vector<VertexId>& parent,
                                           VertexId u, VertexId w)
{
    // Walk both ends up the BFS tree to their lowest common ancestor.
    std::vector<VertexId> up_u{u}, up_w{w};
    for (VertexId x = u; parent[x] != x;) up_u.push_back(x = parent[x]);
    for (VertexId x = w; parent[x] != x;) up_w.push_back(x = parent[x]);
    while (up_u.size() > 1 && up_w.size() > 1 && up_u[up_u.size() - 2] == up_w[up_w.size() - 2]) {
        up_u.pop_back();
        up_w.pop_back();
    }
    std::vector<std::string> out;
    for (VertexId x : up_u) out.push_back(ids[x]);
    for (auto it = up_w.rbegin() + 1; it != up_w.rend(); ++it) out.push_back(ids[*it]);
    return out;
}

} // namespace detail

class BipartiteGraph {
public:
    BipartiteGraph() = default;

    /// Validates the edge list and assigns sides. Vertices with a given side
    /// keep it; the rest are 2-colored by BFS in input order, each new root
    /// taking side A. Throws NotBipartite on an odd cycle or inconsistent sides.
    static BipartiteGraph build(const GraphSpec& spec)
    {
        BipartiteGraph g;
        const std::size_t n = spec.ids.size();
        g.m_ids = spec.ids;
        g.m_adj.resize(n);
        for (VertexId v = 0; v < n; ++v) {
            if (!g.m_index.emplace(spec.ids[v], v).second) {
                throw std::invalid_argument("duplicate vertex id \"" + spec.ids[v] + "\"");
            }
        }
        for (const auto& [a, b] : spec.edges) {
            const VertexId u = g.require(a), w = g.require(b);
            if (u == w) throw NotBipartite("self-loop at \"" + a + "\"", {a});
            g.m_adj[u].push_back(w);
            g.m_adj[w].push_back(u);
        }
        for (auto& nbrs : g.m_adj) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
        g.m_sides = g.color(spec.sides);
        return g;
    }

    std::size_t vertex_count() const { return m_ids.size(); }
    Side side(VertexId v) const { return m_sides[v]; }
    const std::string& id(VertexId v) const { return m_ids[v]; }
    std::span<const VertexId> neighbors(VertexId v) const { return m_adj[v]; }

    template <class F>
    void for_each_neighbor(VertexId v, F&& f) const
    {
        for (VertexId w : m_adj[v]) f(w);
    }

    std::optional<VertexId> find(const std::string& id) const
    {
        auto it = m_index.find(id);
        if (it == m_index.end()) return std::nullopt;
        return it->second;
    }

    VertexId require(const std::string& id) const
    {
        if (auto v = find(id)) return *v;
        throw std::invalid_argument("unknown vertex id \"" + id + "\"");
    }

    /// Each undirected edge once, as (smaller id index, larger id index).
    std::vector<std::pair<VertexId, VertexId>> edges() const
    {
        std::vector<std::pair<VertexId, VertexId>> out;
        for (VertexId v = 0; v < m_adj.size(); ++v) {
            for (VertexId w : m_adj[v]) {
                if (v < w) out.emplace_back(v, w);
            }
        }
        return out;
    }

private:
    std::vector<Side> color(const std::vector<std::optional<Side>>& given) const
    {
        const std::size_t n = m_ids.size();
        auto given_side = [&](VertexId v) -> std::optional<Side> { return v < given.size() ? given[v] : std::nullopt; };
        std::vector<std::optional<Side>> side(n);
        std::vector<VertexId> parent(n);
        std::vector<VertexId> roots;
        for (VertexId v = 0; v < n; ++v) {
            if (given_side(v)) roots.push_back(v);
        }
        for (VertexId v = 0; v < n; ++v) {
            if (!given_side(v)) roots.push_back(v);
        }
        for (VertexId root : roots) {
            if (side[root]) continue;
            side[root] = given_side(root).value_or(Side::A);
            parent[root] = root;
            std::deque<VertexId> queue{root};
            while (!queue.empty()) {
                const VertexId u = queue.front();
                queue.pop_front();
                for (VertexId w : m_adj[u]) {
                    if (!side[w]) {
                        side[w] = other(*side[u]);
                        parent[w] = u;
                        if (given_side(w) && *given_side(w) != *side[w]) {
                            auto path = detail::join_paths(m_ids, parent, w, root);
                            throw NotBipartite("given sides are inconsistent along the path from \"" + m_ids[root] +
                                                   "\" to \"" + m_ids[w] + "\"",
                                               path);
                        }
                        queue.push_back(w);
                    } else if (*side[w] == *side[u]) {
                        auto cycle = detail::join_paths(m_ids, parent, u, w);
                        std::string msg = "graph is not bipartite: odd cycle";
                        for (const auto& id : cycle) msg += " " + id;
                        throw NotBipartite(msg, cycle);
                    }
                }
            }
        }
        std::vector<Side> out(n);
        for (VertexId v = 0; v < n; ++v) out[v] = *side[v];
        return out;
    }

    std::vector<std::string> m_ids;
    std::vector<Side> m_sides;
    std::vector<std::vector<VertexId>> m_adj;
    std::map<std::string, VertexId> m_index;
};

/// BFS 2-coloring of an undirected graph given as ids and edges.
inline std::vector<Side> bipartition(const std::vector<std::string>& ids,
                                     const std::vector<std::pair<std::string, std::string>>& edges)
{
    GraphSpec spec{ids, std::vector<std::optional<Side>>(ids.size()), edges};
    const auto g = BipartiteGraph::build(spec);
    std::vector<Side> out;
    for (VertexId v = 0; v < g.vertex_count(); ++v) out.push_back(g.side(v));
    return out;
}

} // namespace bifreq
