#include "bifreq/checker.hpp"

#include "mutants.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <tuple>

using namespace bifreq;
using namespace bifreq::testing;

namespace {

std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>> quads(const std::vector<Violation>& v)
{
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>> out;
    for (const auto& x : v) out.insert({x.t, x.k, x.t2, x.k2});
    return out;
}

} // namespace

TEST(CheckF1, BuiltInSystemsPass)
{
    EXPECT_TRUE(check_f1(trivial_system(), 100).empty());
    EXPECT_TRUE(check_f1(half_system(), 300).empty());
    EXPECT_TRUE(check_f1(golden_system(), 300).empty());
}

TEST(CheckF1, PlusZeroMutantFailsAtSmallT)
{
    const auto sys = golden_plus_zero();
    const auto v = check_f1(sys, 40);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().kind, ViolationKind::F1);
    EXPECT_EQ(v.front().t, 1);
    EXPECT_EQ(v.front().k, 1);
    EXPECT_EQ(v.front().lhs, GoldenNumber(0));
    for (const auto& x : v) EXPECT_TRUE(recheck(sys, x)) << x.describe();
}

TEST(CheckF1, ParallelAndSerialAgree)
{
    const auto sys = golden_plus_zero();
    const auto serial = check_f1(sys, 60, 1);
    const auto parallel = check_f1(sys, 60, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(std::tie(serial[i].side, serial[i].t, serial[i].k), std::tie(parallel[i].side, parallel[i].t, parallel[i].k));
    }
}

TEST(CheckF1, RejectsEmptyHorizon) { EXPECT_THROW(check_f1(trivial_system(), 0), std::invalid_argument); }

TEST(CheckF2, BuiltInSystemsPass)
{
    EXPECT_TRUE(check_f2(trivial_system(), 30).empty());
    EXPECT_TRUE(check_f2(half_system(), 50).empty());
    EXPECT_TRUE(check_f2(golden_system(), 50).empty());
}

TEST(CheckF2, FullSharedMutantCollidesAtHalfLoads)
{
    const auto sys = half_with_full_shared();
    const auto v = check_f2(sys, 16, 2);
    ASSERT_FALSE(v.empty());
    for (const auto& x : v) {
        EXPECT_LE(x.k + x.k2, std::max(x.t, x.t2));
        EXPECT_FALSE(x.witness.empty());
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(v.size(), 200); ++i) EXPECT_TRUE(recheck(sys, v[i]));
    // Direct construction: t' = t, k = k' = t/2 shares the symmetric frequency t/2 + 1.
    for (std::int64_t t = 2; t <= 16; t += 2) {
        const Frequency f{PoolTag::Symmetric, t / 2 + 1};
        EXPECT_TRUE(sys(Side::A, t, t / 2).contains(f));
        EXPECT_TRUE(sys(Side::B, t, t / 2).contains(f));
        bool found = false;
        for (const auto& x : v) found = found || (x.t == t && x.k == t / 2 && x.t2 == t && x.k2 == t / 2 && x.witness.contains(f));
        EXPECT_TRUE(found) << t;
    }
}

TEST(CheckF2, ReducedSweepMatchesUnreducedOnMutants)
{
    for (const auto& sys : {half_with_full_shared(), shared_prefix_system(), golden_plus_zero(), golden_system()}) {
        EXPECT_EQ(quads(check_f2(sys, 12)), quads(check_f2_unreduced(sys, 12))) << sys.name;
    }
}

TEST(CheckF2, UnreducedPassesForBuiltIns)
{
    EXPECT_TRUE(check_f2_unreduced(golden_system(), 10).empty());
    EXPECT_TRUE(check_f2_unreduced(half_system(), 10).empty());
}

TEST(Competitiveness, TrivialUnionIsExactlyTwoT)
{
    const auto sys = trivial_system();
    sweep_levels(sys, 400, [](std::int64_t t, const FrequencySet& a, const FrequencySet& b, const FrequencySet& u) {
        ASSERT_EQ(u.size(), 2 * t);
        ASSERT_EQ(a.size(), t);
        ASSERT_EQ(b.size(), t);
    });
    EXPECT_TRUE(check_competitiveness(sys, GoldenNumber(2), 0, 400).empty());
    const auto v = check_competitiveness(sys, GoldenNumber(2) - GoldenNumber::fraction(1, 100), 0, 50);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().t, 1);
    EXPECT_EQ(v.size(), 50u);
    EXPECT_EQ(min_lambda(sys, GoldenNumber(2), 300), GoldenNumber(0));
}

TEST(Competitiveness, IncrementalUnionMatchesScratchAtRandomCheckpoints)
{
    std::mt19937_64 rng(17);
    for (const auto& sys : {golden_system(), half_system()}) {
        std::set<std::int64_t> checkpoints;
        std::uniform_int_distribution<std::int64_t> pick(1, 300);
        while (checkpoints.size() < 20) checkpoints.insert(pick(rng));
        sweep_levels(sys, 300, [&](std::int64_t t, const FrequencySet& a, const FrequencySet& b, const FrequencySet& u) {
            if (!checkpoints.count(t)) return;
            EXPECT_EQ(a, side_union(sys, Side::A, t));
            EXPECT_EQ(b, side_union(sys, Side::B, t));
            EXPECT_EQ(u, cumulative_union(sys, t));
        });
    }
}

TEST(Competitiveness, ClaimedConstantsHoldOnModerateHorizon)
{
    EXPECT_TRUE(check_competitiveness(golden_system(), constants().r0, 8, 800).empty());
    EXPECT_TRUE(check_competitiveness(half_system(), GoldenNumber::fraction(3, 2), 2, 800).empty());
    EXPECT_LE(min_lambda(golden_system(), constants().r0, 800), GoldenNumber(8));
    EXPECT_LE(min_lambda(half_system(), GoldenNumber::fraction(3, 2), 800), GoldenNumber(2));
}

TEST(Competitiveness, ViolationsRecheck)
{
    const auto sys = golden_system();
    const GoldenNumber r = GoldenNumber::fraction(142, 100);
    const auto v = check_competitiveness(sys, r, 0, 60);
    ASSERT_FALSE(v.empty());
    for (const auto& x : v) EXPECT_TRUE(recheck(sys, x, r, 0));
}

TEST(Competitiveness, RatioBelowOneRejected)
{
    EXPECT_THROW(check_competitiveness(trivial_system(), GoldenNumber::fraction(1, 2), 0, 5), std::invalid_argument);
    EXPECT_THROW(min_lambda(trivial_system(), GoldenNumber::fraction(1, 2), 5), std::invalid_argument);
}

TEST(SharedStats, TrivialHasNoSharedFrequencies)
{
    for (std::int64_t t : {2, 10, 40}) {
        const auto s = shared_stats(trivial_system(), t);
        EXPECT_TRUE(s.s_t.empty());
        EXPECT_TRUE(s.s_2t_t.empty());
        EXPECT_TRUE(s.z_3t2_t.empty());
    }
    EXPECT_THROW(shared_stats(trivial_system(), 3), std::invalid_argument);
}

TEST(SharedStats, GoldenLemmaBoundsAtOneHundred)
{
    const auto sys = golden_system();
    const auto& r0 = constants().r0;
    const auto s = shared_stats(sys, 100);
    EXPECT_GE(GoldenNumber(s.s_t.size()), (GoldenNumber(2) - r0) * 100 - 8);
    EXPECT_GE(GoldenNumber(s.s_2t_t.size()), (GoldenNumber(6) - GoldenNumber(4) * r0) * 100 - 16);
    EXPECT_TRUE(s.s_t.is_subset_of(s.f_union_a));
    EXPECT_TRUE(s.s_t.is_subset_of(s.f_union_b));
    EXPECT_TRUE(s.s_2t_t.is_subset_of(s.s_2t));
    EXPECT_FALSE(intersects(sys(Side::A, 200, 100), sys(Side::B, 200, 100)));
}

TEST(LemmaChain, BuiltInSystemsHoldOnSmallHorizon)
{
    EXPECT_TRUE(lemma_chain_check(golden_system(), constants().r0, 8, 80).empty());
    EXPECT_TRUE(lemma_chain_check(half_system(), GoldenNumber::fraction(3, 2), 2, 80).empty());
    EXPECT_TRUE(lemma_chain_check(trivial_system(), GoldenNumber(2), 0, 80).empty());
}

TEST(LemmaChain, TrivialRightHandSidesAreNonPositive)
{
    for (std::int64_t t = 2; t <= 40; t += 2) {
        const auto l = detail::lemma_sides(shared_stats(trivial_system(), t), GoldenNumber(2), 0);
        EXPECT_EQ(l.lemma2_rhs, GoldenNumber(0));
        EXPECT_LT(l.lemma3_rhs, GoldenNumber(0));
    }
}

TEST(LemmaChain, FalseClaimsProduceRecheckableViolations)
{
    const auto sys = trivial_system();
    const auto v = lemma_chain_check(sys, GoldenNumber(1), 0, 20);
    ASSERT_FALSE(v.empty());
    std::set<ViolationKind> kinds;
    for (const auto& x : v) {
        kinds.insert(x.kind);
        EXPECT_TRUE(recheck(sys, x, GoldenNumber(1), 0)) << x.describe();
    }
    EXPECT_TRUE(kinds.count(ViolationKind::Competitiveness));
    EXPECT_TRUE(kinds.count(ViolationKind::Lemma2));
}

TEST(LemmaChain, BrokenPreconditionsAreReported)
{
    const auto v = lemma_chain_check(shared_prefix_system(), GoldenNumber(1), 0, 10);
    bool saw_f2 = false;
    for (const auto& x : v) saw_f2 = saw_f2 || x.kind == ViolationKind::F2;
    EXPECT_TRUE(saw_f2);
}

TEST(Falsifier, ThetaSelection)
{
    const GoldenNumber bound = GoldenNumber::fraction(10, 7);
    for (const GoldenNumber& r : {GoldenNumber::fraction(142, 100), GoldenNumber::fraction(993, 700), GoldenNumber(1),
                                  GoldenNumber::fraction(1428, 1000)}) {
        std::int64_t expected = 1;
        while (!(r < bound - GoldenNumber::fraction(1, expected))) ++expected;
        EXPECT_EQ(select_theta(r), expected) << r;
    }
    EXPECT_EQ(select_theta(GoldenNumber::fraction(142, 100)), 117);
    EXPECT_THROW(select_theta(bound), std::invalid_argument);
    EXPECT_THROW(select_theta(constants().r0), std::invalid_argument);
    EXPECT_THROW(select_theta(GoldenNumber::fraction(3, 2)), std::invalid_argument);
}

TEST(Falsifier, TrivialClaimRefutedAtFirstLevel)
{
    const auto v = falsify(trivial_system(), GoldenNumber::fraction(10, 7) - GoldenNumber::fraction(1, 100), 0, 50, 10);
    EXPECT_EQ(v.outcome, FalsifyVerdict::Outcome::Refuted);
    ASSERT_FALSE(v.violations.empty());
    EXPECT_EQ(v.violations.front().kind, ViolationKind::Competitiveness);
    EXPECT_EQ(v.violations.front().t, 1);
}

TEST(Falsifier, CertificateWhenNothingFailsInHorizon)
{
    // A huge additive constant hides the excess on a short horizon.
    const auto v = falsify(golden_system(), GoldenNumber::fraction(142, 100), 1000, 200, 20);
    EXPECT_EQ(v.outcome, FalsifyVerdict::Outcome::Certificate);
    EXPECT_TRUE(v.violations.empty());
    EXPECT_TRUE(v.trace.entries.empty());
    EXPECT_EQ(v.trace.theta, 117);
    EXPECT_EQ(v.contradiction_index, 117);
    EXPECT_EQ(v.forced_gamma, Rational(3));
    EXPECT_EQ(v.required_horizon, BigInt(3) * 6 * 117 * 1000 * (BigInt(1) << 117));
    EXPECT_FALSE(v.caveat.empty());
}

TEST(Falsifier, GammaTraceMatchesSharedStats)
{
    const auto sys = half_system();
    const auto trace = gamma_trace(sys, 1, 1, 100);
    ASSERT_EQ(trace.entries.size(), 2u); // i = 0, 1 (t = 6, 12); i <= theta stops there
    for (const auto& e : trace.entries) {
        EXPECT_EQ(e.t, 6 * (std::int64_t(1) << e.i));
        const auto s = shared_stats(sys, e.t);
        EXPECT_EQ(e.gamma, Rational(set_union(s.s_t, s.z_3t2_t).size(), e.t));
    }
    const auto longer = gamma_trace(sys, 3, 1, 300);
    ASSERT_EQ(longer.entries.size(), 3u); // t = 18, 36, 72; 3 * 144 > 300
    EXPECT_EQ(longer.entries.back().t, 72);
}

TEST(Falsifier, GoldenMissingClaimRefutedDirectly)
{
    const auto v = falsify(golden_system(), GoldenNumber::fraction(142, 100), 8, 1000, 0);
    EXPECT_EQ(v.outcome, FalsifyVerdict::Outcome::Refuted);
    ASSERT_FALSE(v.violations.empty());
    EXPECT_LE(v.violations.front().t, 1000);
    EXPECT_TRUE(recheck(golden_system(), v.violations.front(), GoldenNumber::fraction(142, 100), 8));
}

TEST(Reports, JsonShape)
{
    CheckReport r{"golden", 10, 5, 0, constants().r0, 8, {}, {}};
    r.violations = check_f1(golden_plus_zero(), 3);
    const auto j = to_json(r);
    for (const char* key : {"system", "horizon", "claims", "violations", "gamma_trace"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["violations"].size(), r.violations.size());
    EXPECT_EQ(j["claims"]["r"], "18/11 - 1/11*sqrt5");
}
