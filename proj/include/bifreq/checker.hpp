#pragma once

// Finite-horizon verification of F-systems: the size property (F1), the
// cross-side disjointness property (F2), competitiveness, the shared-frequency
// inequalities behind the 10/7 lower bound, and a falsifier for claimed ratios
// below 10/7.

#include "bifreq/fsystem.hpp"
#include "bifreq/golden.hpp"
#include "bifreq/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace bifreq {

enum class ViolationKind { F1, F2, Competitiveness, Lemma2, Lemma3, Lemma4, Lemma5, Recurrence };

inline std::string_view to_string(ViolationKind k)
{
    switch (k) {
    case ViolationKind::F1: return "F1";
    case ViolationKind::F2: return "F2";
    case ViolationKind::Competitiveness: return "Competitiveness";
    case ViolationKind::Lemma2: return "Lemma2";
    case ViolationKind::Lemma3: return "Lemma3";
    case ViolationKind::Lemma4: return "Lemma4";
    case ViolationKind::Lemma5: return "Lemma5";
    case ViolationKind::Recurrence: return "Recurrence";
    }
    return "?";
}

/// A failed inequality with the parameters needed to re-evaluate it.
///
///  F1              side, t, k:        lhs = |F^side_{t,k}|, rhs = k, needs lhs >= rhs
///  F2              (t, k) on A, (t2, k2) on B, witness = the intersection
///  Competitiveness t:                 lhs = |U_t|, rhs = r t + lambda, needs lhs <= rhs
///  Lemma2..5, Recurrence  even t:     needs lhs >= rhs
struct Violation {
    ViolationKind kind = ViolationKind::F1;
    Side side = Side::A;
    std::int64_t t = 0;
    std::int64_t k = 0;
    std::int64_t t2 = 0;
    std::int64_t k2 = 0;
    GoldenNumber lhs;
    GoldenNumber rhs;
    FrequencySet witness;

    std::string describe() const
    {
        const std::string ts = std::to_string(t), ks = std::to_string(k);
        switch (kind) {
        case ViolationKind::F1:
            return "F1: |F^" + std::string(to_string(side)) + "_{" + ts + "," + ks + "}| = " + lhs.to_string() +
                   " < " + ks;
        case ViolationKind::F2:
            return "F2: F^A_{" + ts + "," + ks + "} and F^B_{" + std::to_string(t2) + "," + std::to_string(k2) +
                   "} share " + to_string(witness);
        case ViolationKind::Competitiveness:
            return "Competitiveness: |U_" + ts + "| = " + lhs.to_string() + " > " + rhs.to_string();
        default:
            return std::string(to_string(kind)) + " at t=" + ts + ": " + lhs.to_string() + " < " + rhs.to_string();
        }
    }
};

namespace detail {

inline void sort_violations(std::vector<Violation>& v)
{
    std::sort(v.begin(), v.end(), [](const Violation& x, const Violation& y) {
        return std::tie(x.kind, x.t, x.side, x.k, x.t2, x.k2) < std::tie(y.kind, y.t, y.side, y.k, y.t2, y.k2);
    });
}

inline void check_horizon(std::int64_t t_max)
{
    if (t_max < 1) throw std::invalid_argument("horizon must be at least 1");
}

} // namespace detail

/// Every c in {A,B} and 1 <= k <= t <= t_max with |F^c_{t,k}| < k.
inline std::vector<Violation> check_f1(const FSystemSpec& sys, std::int64_t t_max, unsigned jobs = default_jobs())
{
    detail::check_horizon(t_max);
    std::vector<std::vector<Violation>> found(jobs);
    parallel_for(1, t_max + 1, jobs, [&](unsigned w, std::int64_t t) {
        for (Side c : {Side::A, Side::B}) {
            for (std::int64_t k = 1; k <= t; ++k) {
                const auto n = sys(c, t, k).size();
                if (n < k) found[w].push_back({ViolationKind::F1, c, t, k, 0, 0, GoldenNumber(n), GoldenNumber(k), {}});
            }
        }
    });
    std::vector<Violation> out;
    for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
    detail::sort_violations(out);
    return out;
}

/// All sets F^c_{t,k} for 1 <= k <= t <= t_max, indexed [side][t][k].
class SetTable {
public:
    SetTable(const FSystemSpec& sys, std::int64_t t_max, unsigned jobs = default_jobs()) : m_t_max(t_max)
    {
        for (auto& side : m_sets) side.resize(static_cast<std::size_t>(t_max + 1));
        parallel_for(1, t_max + 1, jobs, [&](unsigned, std::int64_t t) {
            for (Side c : {Side::A, Side::B}) {
                auto& row = m_sets[static_cast<int>(c)][static_cast<std::size_t>(t)];
                row.resize(static_cast<std::size_t>(t + 1));
                for (std::int64_t k = 1; k <= t; ++k) row[static_cast<std::size_t>(k)] = sys(c, t, k);
            }
        });
    }

    std::int64_t horizon() const { return m_t_max; }

    const FrequencySet& operator()(Side c, std::int64_t t, std::int64_t k) const
    {
        return m_sets[static_cast<int>(c)][static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
    }

private:
    std::int64_t m_t_max;
    std::vector<std::vector<FrequencySet>> m_sets[2];
};

namespace detail {

inline Violation f2_violation(Side larger, std::int64_t t, std::int64_t k, std::int64_t t2, std::int64_t k2,
                              FrequencySet witness)
{
    // Orient as (A-parameters, B-parameters).
    if (larger == Side::B) {
        std::swap(t, t2);
        std::swap(k, k2);
    }
    return {ViolationKind::F2, Side::A, t, k, t2, k2, GoldenNumber(), GoldenNumber(), std::move(witness)};
}

} // namespace detail

/// F^A_{t,k} and F^B_{t',k'} are disjoint whenever k + k' <= max(t, t').
/// Enumerates the side with the larger t first; by symmetry of the condition
/// this covers every quadruple once.
inline std::vector<Violation> check_f2(const FSystemSpec& sys, std::int64_t t_max, unsigned jobs = default_jobs())
{
    detail::check_horizon(t_max);
    const SetTable table(sys, t_max, jobs);
    std::vector<std::vector<Violation>> found(jobs);
    parallel_for(1, t_max + 1, jobs, [&](unsigned w, std::int64_t t) {
        for (Side c : {Side::A, Side::B}) {
            for (std::int64_t k = 1; k <= t; ++k) {
                const FrequencySet& x = table(c, t, k);
                for (std::int64_t t2 = 1; t2 <= t; ++t2) {
                    if (t2 == t && c == Side::B) continue; // counted from side A
                    const std::int64_t k2_max = std::min(t2, t - k);
                    for (std::int64_t k2 = 1; k2 <= k2_max; ++k2) {
                        const FrequencySet& y = table(other(c), t2, k2);
                        if (intersects(x, y)) found[w].push_back(detail::f2_violation(c, t, k, t2, k2, set_intersection(x, y)));
                    }
                }
            }
        }
    });
    std::vector<Violation> out;
    for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
    detail::sort_violations(out);
    return out;
}

/// F2 over all quadruples without the symmetry reduction. Quartic in t_max;
/// used as a cross-check on small horizons.
inline std::vector<Violation> check_f2_unreduced(const FSystemSpec& sys, std::int64_t t_max)
{
    detail::check_horizon(t_max);
    const SetTable table(sys, t_max, 1);
    std::vector<Violation> out;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        for (std::int64_t k = 1; k <= t; ++k) {
            for (std::int64_t t2 = 1; t2 <= t_max; ++t2) {
                for (std::int64_t k2 = 1; k2 <= t2; ++k2) {
                    if (k + k2 > std::max(t, t2)) continue;
                    const auto& x = table(Side::A, t, k);
                    const auto& y = table(Side::B, t2, k2);
                    if (intersects(x, y)) {
                        out.push_back({ViolationKind::F2, Side::A, t, k, t2, k2, {}, {}, set_intersection(x, y)});
                    }
                }
            }
        }
    }
    detail::sort_violations(out);
    return out;
}

/// Walks t = 1..t_max maintaining F^A_t, F^B_t (the per-side unions of
/// F^c_{tau,kappa} over kappa <= tau <= t) and calls
/// on_level(t, F^A_t, F^B_t, U_t) with U_t = F^A_t u F^B_t.
template <class OnLevel>
void sweep_levels(const FSystemSpec& sys, std::int64_t t_max, OnLevel&& on_level)
{
    FrequencySet union_a, union_b;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        for (std::int64_t k = 1; k <= t; ++k) {
            union_a |= sys(Side::A, t, k);
            union_b |= sys(Side::B, t, k);
        }
        const FrequencySet all = set_union(union_a, union_b);
        on_level(t, union_a, union_b, all);
    }
}

/// F^c_t recomputed from scratch.
inline FrequencySet side_union(const FSystemSpec& sys, Side c, std::int64_t t)
{
    FrequencySet out;
    for (std::int64_t tau = 1; tau <= t; ++tau) {
        for (std::int64_t kappa = 1; kappa <= tau; ++kappa) out |= sys(c, tau, kappa);
    }
    return out;
}

/// U_t = F^A_t u F^B_t recomputed from scratch.
inline FrequencySet cumulative_union(const FSystemSpec& sys, std::int64_t t)
{
    return set_union(side_union(sys, Side::A, t), side_union(sys, Side::B, t));
}

/// Every t <= t_max with |U_t| - lambda > r t, compared exactly.
inline std::vector<Violation> check_competitiveness(const FSystemSpec& sys, const GoldenNumber& r, std::int64_t lambda,
                                                    std::int64_t t_max)
{
    detail::check_horizon(t_max);
    if (r < GoldenNumber(1)) throw std::invalid_argument("competitive ratio must be at least 1");
    std::vector<Violation> out;
    sweep_levels(sys, t_max, [&](std::int64_t t, const FrequencySet&, const FrequencySet&, const FrequencySet& all) {
        const GoldenNumber bound = r * GoldenNumber(t) + GoldenNumber(lambda);
        const GoldenNumber used(all.size());
        if (used > bound) out.push_back({ViolationKind::Competitiveness, Side::A, t, 0, 0, 0, used, bound, {}});
    });
    return out;
}

/// max over 1 <= t <= t_max of |U_t| - r t: the smallest additive constant
/// for which the system is r-competitive on the tested horizon.
inline GoldenNumber min_lambda(const FSystemSpec& sys, const GoldenNumber& r, std::int64_t t_max)
{
    detail::check_horizon(t_max);
    if (r < GoldenNumber(1)) throw std::invalid_argument("competitive ratio must be at least 1");
    std::optional<GoldenNumber> best;
    sweep_levels(sys, t_max, [&](std::int64_t t, const FrequencySet&, const FrequencySet&, const FrequencySet& all) {
        GoldenNumber excess = GoldenNumber(all.size()) - r * GoldenNumber(t);
        if (!best || excess > *best) best = std::move(excess);
    });
    return *best;
}

/// Shared-frequency sets at an even level t:
///   S_t        = F^A_t n F^B_t
///   S_{2t,t}   = S_{2t} n (F^A_{2t,t} u F^B_{2t,t})
///   Z_{3t/2,t} = F^A_{3t/2,t} n F^B_{3t/2,t}
///   Z_{3t,2t}  = F^A_{3t,2t} n F^B_{3t,2t}
struct SharedStats {
    std::int64_t t = 0;
    FrequencySet f_union_a;
    FrequencySet f_union_b;
    FrequencySet s_t;
    FrequencySet s_2t;
    FrequencySet s_2t_t;
    FrequencySet z_3t2_t;
    FrequencySet z_3t_2t;
};

namespace detail {

struct Level {
    FrequencySet a, b;
};

inline SharedStats make_shared_stats(const FSystemSpec& sys, std::int64_t t, const Level& at_t, const Level& at_2t)
{
    SharedStats s;
    s.t = t;
    s.f_union_a = at_t.a;
    s.f_union_b = at_t.b;
    s.s_t = set_intersection(at_t.a, at_t.b);
    s.s_2t = set_intersection(at_2t.a, at_2t.b);
    s.s_2t_t = set_intersection(s.s_2t, set_union(sys(Side::A, 2 * t, t), sys(Side::B, 2 * t, t)));
    s.z_3t2_t = set_intersection(sys(Side::A, 3 * t / 2, t), sys(Side::B, 3 * t / 2, t));
    s.z_3t_2t = set_intersection(sys(Side::A, 3 * t, 2 * t), sys(Side::B, 3 * t, 2 * t));
    return s;
}

inline void check_even_level(std::int64_t t)
{
    if (t < 2 || t % 2 != 0) throw std::invalid_argument("shared statistics need an even level t >= 2");
}

} // namespace detail

/// Shared-frequency statistics for one even t; queries the generator up to 3t.
inline SharedStats shared_stats(const FSystemSpec& sys, std::int64_t t)
{
    detail::check_even_level(t);
    detail::Level at_t{side_union(sys, Side::A, t), side_union(sys, Side::B, t)};
    detail::Level at_2t{side_union(sys, Side::A, 2 * t), side_union(sys, Side::B, 2 * t)};
    return detail::make_shared_stats(sys, t, at_t, at_2t);
}

namespace detail {

struct LemmaSides {
    GoldenNumber lemma2_lhs, lemma2_rhs;
    GoldenNumber lemma3_lhs, lemma3_rhs;
    GoldenNumber lemma4_lhs, lemma4_rhs;
    GoldenNumber lemma5_lhs, lemma5_rhs;
    GoldenNumber recurrence_lhs, recurrence_rhs;
};

inline LemmaSides lemma_sides(const SharedStats& s, const GoldenNumber& r, std::int64_t lambda)
{
    const GoldenNumber t(s.t), lam(lambda);
    const GoldenNumber past(set_union(s.s_t, s.z_3t2_t).size()); // |S_t u Z_{3t/2,t}|
    LemmaSides out;
    out.lemma2_lhs = GoldenNumber(s.s_t.size());
    out.lemma2_rhs = (GoldenNumber(2) - r) * t - lam;
    out.lemma3_lhs = GoldenNumber(s.s_2t_t.size());
    out.lemma3_rhs = (GoldenNumber(6) - GoldenNumber(4) * r) * t - GoldenNumber(2) * lam;
    out.lemma4_lhs = GoldenNumber(set_difference(s.s_2t, s.z_3t_2t).size());
    out.lemma4_rhs = past + GoldenNumber(s.s_2t_t.size());
    out.lemma5_lhs = GoldenNumber(s.z_3t_2t.size());
    out.lemma5_rhs = past - (GoldenNumber(3) * r - GoldenNumber(4)) * t - lam;
    out.recurrence_lhs = GoldenNumber(set_union(s.s_2t, s.z_3t_2t).size());
    out.recurrence_rhs = GoldenNumber(2) * past + (GoldenNumber(10) - GoldenNumber(7) * r) * t - GoldenNumber(3) * lam;
    return out;
}

inline void push_if_below(std::vector<Violation>& out, ViolationKind kind, std::int64_t t, const GoldenNumber& lhs,
                          const GoldenNumber& rhs)
{
    if (lhs < rhs) out.push_back({kind, Side::A, t, 0, 0, 0, lhs, rhs, {}});
}

// The facts about individual sets that the lemmas rely on at level t.
inline void check_lemma_preconditions(const FSystemSpec& sys, std::int64_t t, std::vector<Violation>& out)
{
    for (Side c : {Side::A, Side::B}) {
        for (auto [tt, kk] : {std::pair{2 * t, t}, std::pair{3 * t, 2 * t}, std::pair{3 * t / 2, t}}) {
            const auto n = sys(c, tt, kk).size();
            if (n < kk) out.push_back({ViolationKind::F1, c, tt, kk, 0, 0, GoldenNumber(n), GoldenNumber(kk), {}});
        }
    }
    const FrequencySet a = sys(Side::A, 2 * t, t), b = sys(Side::B, 2 * t, t);
    if (intersects(a, b)) out.push_back({ViolationKind::F2, Side::A, 2 * t, t, 2 * t, t, {}, {}, set_intersection(a, b)});
}

} // namespace detail

/// For every even t <= t_max: Lemmas 2-5 and the recurrence
///   |S_2t u Z_3t,2t| >= 2 |S_t u Z_3t/2,t| + (10 - 7r) t - 3 lambda.
/// Competitiveness up to 3 t_max and the individual F1/F2 facts the lemmas use
/// are checked along the way and reported as precondition violations.
inline std::vector<Violation> lemma_chain_check(const FSystemSpec& sys, const GoldenNumber& r, std::int64_t lambda,
                                                std::int64_t t_max)
{
    if (t_max < 2) throw std::invalid_argument("lemma chain needs t_max >= 2");
    std::set<std::int64_t> wanted;
    for (std::int64_t t = 2; t <= t_max; t += 2) {
        wanted.insert(t);
        wanted.insert(2 * t);
    }
    std::map<std::int64_t, detail::Level> levels;
    std::vector<Violation> out;
    sweep_levels(sys, 3 * t_max, [&](std::int64_t t, const FrequencySet& a, const FrequencySet& b, const FrequencySet& all) {
        if (wanted.count(t)) levels.emplace(t, detail::Level{a, b});
        const GoldenNumber bound = r * GoldenNumber(t) + GoldenNumber(lambda);
        const GoldenNumber used(all.size());
        if (used > bound) out.push_back({ViolationKind::Competitiveness, Side::A, t, 0, 0, 0, used, bound, {}});
    });
    for (std::int64_t t = 2; t <= t_max; t += 2) {
        detail::check_lemma_preconditions(sys, t, out);
        const SharedStats s = detail::make_shared_stats(sys, t, levels.at(t), levels.at(2 * t));
        const auto l = detail::lemma_sides(s, r, lambda);
        detail::push_if_below(out, ViolationKind::Lemma2, t, l.lemma2_lhs, l.lemma2_rhs);
        detail::push_if_below(out, ViolationKind::Lemma3, t, l.lemma3_lhs, l.lemma3_rhs);
        detail::push_if_below(out, ViolationKind::Lemma4, t, l.lemma4_lhs, l.lemma4_rhs);
        detail::push_if_below(out, ViolationKind::Lemma5, t, l.lemma5_lhs, l.lemma5_rhs);
        detail::push_if_below(out, ViolationKind::Recurrence, t, l.recurrence_lhs, l.recurrence_rhs);
    }
    detail::sort_violations(out);
    return out;
}

/// Re-evaluates the single inequality a violation names; true iff it still fails.
inline bool recheck(const FSystemSpec& sys, const Violation& v, const GoldenNumber& r = GoldenNumber(1),
                    std::int64_t lambda = 0)
{
    switch (v.kind) {
    case ViolationKind::F1:
        return sys(v.side, v.t, v.k).size() < v.k;
    case ViolationKind::F2:
        if (v.k + v.k2 > std::max(v.t, v.t2)) return false;
        return set_intersection(sys(Side::A, v.t, v.k), sys(Side::B, v.t2, v.k2)) == v.witness && !v.witness.empty();
    case ViolationKind::Competitiveness:
        return GoldenNumber(cumulative_union(sys, v.t).size()) > r * GoldenNumber(v.t) + GoldenNumber(lambda);
    default: {
        const auto l = detail::lemma_sides(shared_stats(sys, v.t), r, lambda);
        switch (v.kind) {
        case ViolationKind::Lemma2: return l.lemma2_lhs < l.lemma2_rhs;
        case ViolationKind::Lemma3: return l.lemma3_lhs < l.lemma3_rhs;
        case ViolationKind::Lemma4: return l.lemma4_lhs < l.lemma4_rhs;
        case ViolationKind::Lemma5: return l.lemma5_lhs < l.lemma5_rhs;
        default: return l.recurrence_lhs < l.recurrence_rhs;
        }
    }
    }
}

// ---------------------------------------------------------------------------
// Falsifier

struct GammaEntry {
    std::int64_t i = 0;
    std::int64_t t = 0;
    Rational gamma; // |S_t u Z_{3t/2,t}| / t
};

struct GammaTrace {
    BigInt theta;
    std::int64_t lambda = 0;
    std::vector<GammaEntry> entries;
};

/// t_i = 6 theta lambda 2^i.
inline BigInt gamma_level(const BigInt& theta, std::int64_t lambda, std::int64_t i)
{
    return 6 * theta * lambda * (BigInt(1) << static_cast<unsigned>(i));
}

/// Measures gamma_i for i = 0..theta while 3 t_i fits in the horizon.
inline GammaTrace gamma_trace(const FSystemSpec& sys, const BigInt& theta, std::int64_t lambda, std::int64_t horizon)
{
    GammaTrace trace{theta, lambda, {}};
    std::vector<std::int64_t> levels;
    for (std::int64_t i = 0; i <= theta; ++i) {
        const BigInt t = gamma_level(theta, lambda, i);
        if (3 * t > horizon) break;
        levels.push_back(t.convert_to<std::int64_t>());
    }
    if (levels.empty()) return trace;
    std::map<std::int64_t, detail::Level> at;
    const std::set<std::int64_t> wanted(levels.begin(), levels.end());
    sweep_levels(sys, levels.back(), [&](std::int64_t t, const FrequencySet& a, const FrequencySet& b, const FrequencySet&) {
        if (wanted.count(t)) at.emplace(t, detail::Level{a, b});
    });
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const std::int64_t t = levels[i];
        const auto& lv = at.at(t);
        const FrequencySet s_t = set_intersection(lv.a, lv.b);
        const FrequencySet z = set_intersection(sys(Side::A, 3 * t / 2, t), sys(Side::B, 3 * t / 2, t));
        trace.entries.push_back({static_cast<std::int64_t>(i), t, Rational(set_union(s_t, z).size(), t)});
    }
    return trace;
}

/// Smallest integer theta with r < 10/7 - 1/theta.
inline BigInt select_theta(const GoldenNumber& r)
{
    const GoldenNumber gap = GoldenNumber::fraction(10, 7) - r;
    if (gap.sign() <= 0) throw std::invalid_argument("falsifier needs a claimed ratio below 10/7");
    return (GoldenNumber(1) / gap).floor() + 1;
}

struct FalsifyVerdict {
    enum class Outcome { Refuted, Certificate };

    Outcome outcome = Outcome::Certificate;
    std::vector<Violation> violations;       // direct counterexamples
    GammaTrace trace;                        // measured part of the gamma sequence
    std::vector<std::string> trace_breaches; // measured steps or caps that fail
    BigInt contradiction_index;              // i where the forced lower bound on gamma_i reaches 3
    Rational forced_gamma;                   // that lower bound
    BigInt required_horizon;                 // 3 t_theta: horizon a full measurement would need
    std::string caveat;
};

/// Attempts to refute a claim that sys is claimed_r-competitive with
/// additive constant claimed_lambda, for claimed_r < 10/7.
///
/// Direct checks run first (F1 and competitiveness to t_max, F2 to
/// f2_t_max). If none fails, the gamma sequence is measured on the levels
/// t_i <= t_max / 3 and the recurrence increment of at least 3/theta per step
/// is used to extrapolate to the index where gamma would have to reach 3,
/// which no competitive system allows.
inline FalsifyVerdict falsify(const FSystemSpec& sys, const GoldenNumber& claimed_r, std::int64_t claimed_lambda,
                              std::int64_t t_max, std::int64_t f2_t_max, unsigned jobs = default_jobs())
{
    detail::check_horizon(t_max);
    const BigInt theta = select_theta(claimed_r);
    FalsifyVerdict v;

    auto append = [&](std::vector<Violation> found) {
        v.violations.insert(v.violations.end(), found.begin(), found.end());
    };
    append(check_f1(sys, t_max, jobs));
    append(check_competitiveness(sys, std::max(claimed_r, GoldenNumber(1)), claimed_lambda, t_max));
    if (f2_t_max > 0) append(check_f2(sys, std::min(f2_t_max, t_max), jobs));
    if (!v.violations.empty()) {
        v.outcome = FalsifyVerdict::Outcome::Refuted;
        return v;
    }

    // The argument needs a positive additive constant; r-competitive with
    // lambda implies r-competitive with max(lambda, 1).
    const std::int64_t lambda = std::max<std::int64_t>(claimed_lambda, 1);
    v.trace = gamma_trace(sys, theta, lambda, t_max);
    // 3 t_theta; left at zero when theta is too large to materialize 2^theta.
    if (theta <= 4096) v.required_horizon = 3 * gamma_level(theta, lambda, theta.convert_to<std::int64_t>());

    const Rational step(Rational(3) / Rational(theta));
    const auto& entries = v.trace.entries;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const GoldenNumber cap_exact = GoldenNumber(2) * claimed_r + GoldenNumber::fraction(lambda, entries[i].t);
        if (GoldenNumber(entries[i].gamma) > cap_exact || entries[i].gamma >= 3) {
            v.trace_breaches.push_back("gamma_" + std::to_string(entries[i].i) + " = " +
                                       detail::rational_to_string(entries[i].gamma) + " exceeds the cap " +
                                       cap_exact.to_string());
        }
        if (i + 1 < entries.size() && entries[i + 1].gamma < entries[i].gamma + step) {
            v.trace_breaches.push_back("gamma_" + std::to_string(entries[i + 1].i) + " - gamma_" +
                                       std::to_string(entries[i].i) + " = " +
                                       detail::rational_to_string(entries[i + 1].gamma - entries[i].gamma) +
                                       " < 3/theta = " + detail::rational_to_string(step));
        }
    }

    // Extrapolate from the last measured gamma (or gamma_0 >= 0).
    const BigInt base_index = entries.empty() ? BigInt(0) : BigInt(entries.back().i);
    const Rational base_gamma = entries.empty() ? Rational(0) : entries.back().gamma;
    BigInt steps = 0;
    if (base_gamma < 3) steps = detail::rational_floor((3 - base_gamma) / step);
    if (base_gamma + Rational(steps) * step < 3) ++steps;
    v.contradiction_index = base_index + steps;
    v.forced_gamma = base_gamma + Rational(steps) * step;

    v.outcome = v.trace_breaches.empty() ? FalsifyVerdict::Outcome::Certificate : FalsifyVerdict::Outcome::Refuted;
    v.caveat = "measured " + std::to_string(entries.size()) + " of " + BigInt(theta + 1).str() +
               " gamma levels within horizon " + std::to_string(t_max) + "; F2 verified only up to t=" +
               std::to_string(std::min(f2_t_max, t_max)) + "; the remaining levels are extrapolated from the "
               "recurrence, which assumes F1, F2 and competitiveness up to 3*t_theta = " +
               (v.required_horizon == 0 ? "18*theta*lambda*2^theta" : v.required_horizon.str());
    return v;
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const Violation& v)
{
    nlohmann::json j;
    j["kind"] = std::string(to_string(v.kind));
    j["t"] = v.t;
    switch (v.kind) {
    case ViolationKind::F1:
        j["side"] = std::string(to_string(v.side));
        j["k"] = v.k;
        break;
    case ViolationKind::F2:
        j["k"] = v.k;
        j["t_b"] = v.t2;
        j["k_b"] = v.k2;
        j["witness"] = v.witness.to_global();
        break;
    default:
        break;
    }
    if (v.kind != ViolationKind::F2) {
        j["lhs"] = v.lhs.to_string();
        j["rhs"] = v.rhs.to_string();
    }
    j["message"] = v.describe();
    return j;
}

struct CheckReport {
    std::string system;
    std::int64_t t_max = 0;
    std::int64_t f2_t_max = 0;
    std::int64_t lemma_t_max = 0;
    GoldenNumber r;
    std::int64_t lambda = 0;
    std::vector<Violation> violations;
    std::optional<FalsifyVerdict> falsify;
};

inline nlohmann::json to_json(const CheckReport& report)
{
    nlohmann::json j;
    j["system"] = report.system;
    j["horizon"] = {{"t_max", report.t_max}, {"f2_t_max", report.f2_t_max}, {"lemma_t_max", report.lemma_t_max}};
    j["claims"] = {{"r", report.r.to_string()}, {"lambda", report.lambda}};
    j["violations"] = nlohmann::json::array();
    for (const auto& v : report.violations) j["violations"].push_back(to_json(v));
    j["gamma_trace"] = nlohmann::json::array();
    if (report.falsify) {
        const auto& f = *report.falsify;
        for (const auto& e : f.trace.entries) {
            j["gamma_trace"].push_back({{"i", e.i}, {"t", e.t}, {"gamma", detail::rational_to_string(e.gamma)}});
        }
        j["falsify"] = {
            {"outcome", f.outcome == FalsifyVerdict::Outcome::Refuted ? "refuted" : "certificate"},
            {"theta", f.trace.theta.str()},
            {"lambda_used", f.trace.lambda},
            {"trace_breaches", f.trace_breaches},
            {"contradiction_index", f.contradiction_index.str()},
            {"forced_gamma", detail::rational_to_string(f.forced_gamma)},
            {"required_horizon", f.required_horizon.str()},
            {"caveat", f.caveat},
        };
    }
    return j;
}

} // namespace bifreq
