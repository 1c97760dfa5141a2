#include "bifreq/allocation.hpp"

#include "mutants.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace bifreq;

namespace {

BipartiteInstance make(std::vector<std::string> ids, std::vector<std::pair<std::string, std::string>> edges,
                       std::vector<std::int64_t> loads)
{
    GraphSpec spec;
    for (auto& id : ids) spec.add_vertex(id);
    spec.edges = std::move(edges);
    return {BipartiteGraph::build(spec), std::move(loads)};
}

BipartiteInstance random_instance(std::mt19937_64& rng, int max_vertices, int max_total)
{
    std::uniform_int_distribution<int> nv(1, max_vertices);
    const int n = nv(rng);
    // Fixed sides make every generated edge bipartite.
    GraphSpec spec;
    std::bernoulli_distribution coin(0.5);
    std::vector<Side> sides;
    for (int v = 0; v < n; ++v) {
        sides.push_back(coin(rng) ? Side::A : Side::B);
        spec.add_vertex("v" + std::to_string(v), sides.back());
    }
    for (int u = 0; u < n; ++u) {
        for (int w = u + 1; w < n; ++w) {
            if (sides[u] != sides[w] && coin(rng)) spec.edges.emplace_back("v" + std::to_string(u), "v" + std::to_string(w));
        }
    }
    std::vector<std::int64_t> loads(n, 0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_int_distribution<int> total_dist(0, max_total);
    const int total = total_dist(rng);
    for (int i = 0; i < total; ++i) ++loads[pick(rng)];
    return {BipartiteGraph::build(spec), loads};
}

bool valid(const BipartiteInstance& inst, const std::vector<FrequencySet>& sets)
{
    for (VertexId v = 0; v < inst.graph.vertex_count(); ++v) {
        if (sets[v].size() != inst.loads[v]) return false;
    }
    return !find_conflict(inst.graph, std::span<const FrequencySet>(sets));
}

std::int64_t distinct(const std::vector<FrequencySet>& sets)
{
    FrequencySet all;
    for (const auto& s : sets) all |= s;
    return all.size();
}

} // namespace

TEST(Bipartition, Examples)
{
    EXPECT_EQ(bipartition({"u", "v"}, {{"u", "v"}}), (std::vector<Side>{Side::A, Side::B}));
    EXPECT_EQ(bipartition({"u", "v", "w"}, {{"u", "v"}, {"v", "w"}}), (std::vector<Side>{Side::A, Side::B, Side::A}));
    EXPECT_EQ(bipartition({"x"}, {}), (std::vector<Side>{Side::A}));
}

TEST(Bipartition, TriangleNamesAnOddCycle)
{
    try {
        bipartition({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
        FAIL() << "expected NotBipartite";
    } catch (const NotBipartite& e) {
        const auto& w = e.witness();
        ASSERT_EQ(w.size(), 3u);
        EXPECT_EQ(std::set<std::string>(w.begin(), w.end()), (std::set<std::string>{"a", "b", "c"}));
    }
}

TEST(Bipartition, OddCycleWitnessIsACycle)
{
    // 5-cycle with a pendant path.
    std::vector<std::string> ids{"p", "a", "b", "c", "d", "e"};
    std::vector<std::pair<std::string, std::string>> edges{{"p", "a"}, {"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}, {"e", "a"}};
    try {
        bipartition(ids, edges);
        FAIL();
    } catch (const NotBipartite& e) {
        const auto& w = e.witness();
        EXPECT_EQ(w.size() % 2, 1u);
        std::set<std::pair<std::string, std::string>> es;
        for (auto [x, y] : edges) {
            es.insert({x, y});
            es.insert({y, x});
        }
        for (std::size_t i = 0; i < w.size(); ++i) EXPECT_TRUE(es.count({w[i], w[(i + 1) % w.size()]}));
    }
}

TEST(Bipartition, GivenSidesAreRespectedOrRejected)
{
    GraphSpec spec;
    spec.add_vertex("u", Side::B);
    spec.add_vertex("v");
    spec.edges = {{"u", "v"}};
    const auto g = BipartiteGraph::build(spec);
    EXPECT_EQ(g.side(0), Side::B);
    EXPECT_EQ(g.side(1), Side::A);

    GraphSpec bad;
    bad.add_vertex("u", Side::A);
    bad.add_vertex("v", Side::A);
    bad.edges = {{"u", "v"}};
    EXPECT_THROW(BipartiteGraph::build(bad), NotBipartite);
}

TEST(Graph, InputErrors)
{
    GraphSpec dup;
    dup.add_vertex("u");
    dup.add_vertex("u");
    EXPECT_THROW(BipartiteGraph::build(dup), std::invalid_argument);
    GraphSpec unknown;
    unknown.add_vertex("u");
    unknown.edges = {{"u", "zz"}};
    EXPECT_THROW(BipartiteGraph::build(unknown), std::invalid_argument);
    GraphSpec loop;
    loop.add_vertex("u");
    loop.edges = {{"u", "u"}};
    EXPECT_THROW(BipartiteGraph::build(loop), NotBipartite);
}

TEST(StaticOpt, Examples)
{
    EXPECT_EQ(static_opt(make({"u", "v"}, {{"u", "v"}}, {3, 2})), 5);
    EXPECT_EQ(static_opt(make({"x"}, {}, {4})), 4);
    EXPECT_EQ(static_opt(make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, {1, 2, 1})), 3);
}

TEST(BruteForce, Examples)
{
    EXPECT_EQ(brute_force_opt(make({"u", "v"}, {{"u", "v"}}, {3, 2})), 5);
    EXPECT_EQ(brute_force_opt(make({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}}, {1, 1, 1, 1})), 2);
    EXPECT_EQ(brute_force_opt(make({"x"}, {}, {3})), 3);
    EXPECT_EQ(brute_force_opt(make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, {1, 2, 1})), 3);
    EXPECT_FALSE(brute_force_opt(make({"x"}, {}, {11})).has_value());
    EXPECT_EQ(brute_force_opt(make({"x"}, {}, {11}), 12), 11);
}

TEST(StaticOpt, EqualsBruteForceOnRandomInstances)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 400; ++i) {
        const auto inst = random_instance(rng, 5, 9);
        const auto brute = brute_force_opt(inst);
        ASSERT_TRUE(brute.has_value());
        ASSERT_EQ(static_opt(inst), *brute) << "instance " << i;
    }
}

TEST(StaticAllocate, Examples)
{
    const auto edge = make({"u", "v"}, {{"u", "v"}}, {2, 3});
    const auto sets = static_allocate(edge);
    EXPECT_EQ(sets[0].to_global(), (std::vector<std::int64_t>{1, 2}));
    EXPECT_EQ(sets[1].to_global(), (std::vector<std::int64_t>{3, 4, 5}));

    const auto star = make({"c", "l1", "l2", "l3"}, {{"c", "l1"}, {"c", "l2"}, {"c", "l3"}}, {2, 1, 1, 1});
    const auto s2 = static_allocate(star);
    EXPECT_EQ(s2[0].to_global(), (std::vector<std::int64_t>{1, 2}));
    for (int i = 1; i <= 3; ++i) EXPECT_EQ(s2[i].to_global(), std::vector<std::int64_t>{3});

    const auto zero = make({"u", "v"}, {{"u", "v"}}, {0, 0});
    for (const auto& s : static_allocate(zero)) EXPECT_TRUE(s.empty());
}

TEST(StaticAllocate, ValidAndOptimalOnRandomInstances)
{
    std::mt19937_64 rng(37);
    for (int i = 0; i < 300; ++i) {
        const auto inst = random_instance(rng, 8, 30);
        const auto sets = static_allocate(inst);
        ASSERT_TRUE(valid(inst, sets));
        EXPECT_EQ(distinct(sets), static_opt(inst));
    }
}

TEST(Allocator, FirstRequestTakesSmallestOfFirstSet)
{
    const auto inst = make({"u", "v"}, {{"u", "v"}}, {0, 0});
    Allocator<BipartiteGraph> alloc(inst.graph, golden_system());
    EXPECT_EQ(alloc.distinct_used(), 0);
    const Frequency f = alloc.allocate(0);
    EXPECT_EQ(alloc.current_t(), 1);
    EXPECT_EQ(f, golden_system()(Side::A, 1, 1).min_canonical());
}

TEST(Allocator, TrivialSystemUsesPrivatePrefixes)
{
    const auto inst = make({"u", "v"}, {{"u", "v"}}, {0, 0});
    Allocator<BipartiteGraph> alloc(inst.graph, trivial_system());
    for (int i = 0; i < 3; ++i) alloc.allocate(0);
    for (int i = 0; i < 2; ++i) alloc.allocate(1);
    EXPECT_EQ(alloc.assigned(0), FrequencySet::band(PoolTag::PrivateA, 1, 3));
    EXPECT_EQ(alloc.assigned(1), FrequencySet::band(PoolTag::PrivateB, 1, 2));
    EXPECT_EQ(alloc.distinct_used(), 5);
    EXPECT_EQ(alloc.current_t(), 5);
}

TEST(Allocator, RandomStreamsStayValidAndTrackOptimum)
{
    std::mt19937_64 rng(41);
    for (const auto& sys : {trivial_system(), half_system(), golden_system()}) {
        for (int trial = 0; trial < 40; ++trial) {
            auto inst = random_instance(rng, 10, 0);
            Allocator<BipartiteGraph> alloc(inst.graph, sys);
            std::uniform_int_distribution<int> pick(0, static_cast<int>(inst.graph.vertex_count()) - 1);
            for (int step = 0; step < 60; ++step) {
                const VertexId v = pick(rng);
                alloc.allocate(v);
                ++inst.loads[v];
                ASSERT_EQ(alloc.current_t(), static_opt(inst));
            }
            ASSERT_TRUE(valid(inst, alloc.assignment()));
            ASSERT_LE(GoldenNumber(alloc.distinct_used()),
                      sys.claimed_ratio * GoldenNumber(alloc.current_t()) + GoldenNumber(sys.claimed_lambda));
        }
    }
}

TEST(Allocator, Deterministic)
{
    const auto inst = make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, {0, 0, 0});
    const std::vector<VertexId> stream{0, 1, 1, 2, 0, 2, 2, 1};
    auto run = [&] {
        Allocator<BipartiteGraph> alloc(inst.graph, golden_system());
        for (VertexId v : stream) alloc.allocate(v);
        return alloc.assignment();
    };
    EXPECT_EQ(run(), run());
}

TEST(Allocator, F1BreachIsAHardError)
{
    const auto inst = make({"u"}, {}, {0});
    Allocator<BipartiteGraph> alloc(inst.graph, bifreq::testing::golden_plus_zero());
    EXPECT_THROW(alloc.allocate(0), F1Breach);
}

TEST(Allocator, CollisionIsDetected)
{
    const auto inst = make({"u", "v"}, {{"u", "v"}}, {0, 0});
    Allocator<BipartiteGraph> alloc(inst.graph, bifreq::testing::shared_prefix_system());
    alloc.allocate(0);
    try {
        alloc.allocate(1);
        FAIL() << "expected a collision";
    } catch (const CollisionError& e) {
        EXPECT_EQ(e.vertex, 1u);
        EXPECT_EQ(e.neighbor, 0u);
        EXPECT_EQ(e.frequency, (Frequency{PoolTag::Plain, 1}));
    }
}

TEST(Allocator, UnknownVertex)
{
    const auto inst = make({"u"}, {}, {0});
    Allocator<BipartiteGraph> alloc(inst.graph, trivial_system());
    EXPECT_THROW(alloc.allocate(5), std::out_of_range);
}
