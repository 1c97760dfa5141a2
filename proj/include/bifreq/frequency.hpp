#pragma once

// Frequencies, pools and run-length frequency sets.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bifreq {

enum class Side : std::uint8_t { A, B };

constexpr Side other(Side c) { return c == Side::A ? Side::B : Side::A; }
constexpr std::string_view to_string(Side c) { return c == Side::A ? "A" : "B"; }

inline Side parse_side(std::string_view s)
{
    if (s == "A") return Side::A;
    if (s == "B") return Side::B;
    throw std::invalid_argument("side must be \"A\" or \"B\", got \"" + std::string(s) + "\"");
}

enum class PoolTag : std::uint8_t { PrivateA, PrivateB, SharedA, SharedB, Symmetric, Plain };

constexpr int builtin_pool_count = 5;

constexpr PoolTag private_pool(Side c) { return c == Side::A ? PoolTag::PrivateA : PoolTag::PrivateB; }
constexpr PoolTag shared_pool(Side c) { return c == Side::A ? PoolTag::SharedA : PoolTag::SharedB; }

constexpr std::string_view to_string(PoolTag p)
{
    switch (p) {
    case PoolTag::PrivateA: return "PA";
    case PoolTag::PrivateB: return "PB";
    case PoolTag::SharedA: return "SA";
    case PoolTag::SharedB: return "SB";
    case PoolTag::Symmetric: return "Q";
    case PoolTag::Plain: return "N";
    }
    return "?";
}

inline PoolTag parse_pool(std::string_view s)
{
    for (auto p : {PoolTag::PrivateA, PoolTag::PrivateB, PoolTag::SharedA, PoolTag::SharedB, PoolTag::Symmetric,
                   PoolTag::Plain}) {
        if (to_string(p) == s) return p;
    }
    throw std::invalid_argument("unknown pool tag \"" + std::string(s) + "\"");
}

struct Frequency {
    PoolTag pool = PoolTag::Plain;
    std::int64_t index = 1; // 1-based position within the pool

    friend bool operator==(const Frequency&, const Frequency&) = default;
};

/// Global integer for a frequency: the five built-in pools are interleaved
/// (P^A_1 -> 1, P^B_1 -> 2, S^A_1 -> 3, S^B_1 -> 4, Q_1 -> 5, P^A_2 -> 6, ...),
/// plain frequencies map to themselves.
constexpr std::int64_t encode_global(Frequency f)
{
    if (f.pool == PoolTag::Plain) return f.index;
    return builtin_pool_count * (f.index - 1) + static_cast<int>(f.pool) + 1;
}

enum class Encoding { BuiltIn, Plain };

inline Frequency decode_global(std::int64_t n, Encoding enc = Encoding::BuiltIn)
{
    if (n < 1) throw std::invalid_argument("global frequency must be positive, got " + std::to_string(n));
    if (enc == Encoding::Plain) return {PoolTag::Plain, n};
    return {static_cast<PoolTag>((n - 1) % builtin_pool_count), (n - 1) / builtin_pool_count + 1};
}

/// Canonical order of frequencies is the order of their global encoding.
constexpr std::strong_ordering operator<=>(const Frequency& x, const Frequency& y)
{
    const auto ex = encode_global(x), ey = encode_global(y);
    if (ex != ey) return ex <=> ey;
    return static_cast<int>(x.pool) <=> static_cast<int>(y.pool);
}

inline std::string to_string(Frequency f) { return std::string(to_string(f.pool)) + std::to_string(f.index); }

/// Consecutive indices first..last (inclusive) of one pool.
struct Band {
    PoolTag pool;
    std::int64_t first;
    std::int64_t last;

    std::int64_t size() const { return last - first + 1; }
    friend bool operator==(const Band&, const Band&) = default;
};

/// Finite set of frequencies stored as sorted, disjoint, non-adjacent bands
/// keyed by (pool, index). The constructions produce a handful of bands per
/// set, so set algebra is linear in the number of bands, not elements.
class FrequencySet {
public:
    FrequencySet() = default;

    static FrequencySet band(PoolTag pool, std::int64_t first, std::int64_t last)
    {
        FrequencySet s;
        if (first < 1) first = 1;
        if (first <= last) s.m_bands.push_back({pool, first, last});
        return s;
    }

    static FrequencySet of(std::span<const Frequency> freqs)
    {
        std::vector<Frequency> v(freqs.begin(), freqs.end());
        std::sort(v.begin(), v.end(), key_less_freq);
        FrequencySet s;
        for (const auto& f : v) s.push_back_index(f.pool, f.index);
        return s;
    }

    static FrequencySet of(std::initializer_list<Frequency> freqs)
    {
        return of(std::span<const Frequency>(freqs.begin(), freqs.size()));
    }

    std::span<const Band> bands() const { return m_bands; }
    bool empty() const { return m_bands.empty(); }

    std::int64_t size() const
    {
        std::int64_t n = 0;
        for (const auto& b : m_bands) n += b.size();
        return n;
    }

    bool contains(Frequency f) const
    {
        auto it = std::upper_bound(m_bands.begin(), m_bands.end(), f, [](const Frequency& x, const Band& b) {
            return key(x.pool, x.index) < key(b.pool, b.first);
        });
        if (it == m_bands.begin()) return false;
        --it;
        return it->pool == f.pool && f.index <= it->last;
    }

    void insert(Frequency f) { *this = set_union(*this, band(f.pool, f.index, f.index)); }

    /// Smallest member in canonical (global encoding) order.
    Frequency min_canonical() const
    {
        if (empty()) throw std::logic_error("min_canonical of empty FrequencySet");
        Frequency best{m_bands.front().pool, m_bands.front().first};
        for (const auto& b : m_bands) {
            Frequency f{b.pool, b.first};
            if (f < best) best = f;
        }
        return best;
    }

    /// Members in canonical order.
    std::vector<Frequency> to_vector() const
    {
        std::vector<Frequency> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (const auto& b : m_bands) {
            for (std::int64_t i = b.first; i <= b.last; ++i) out.push_back({b.pool, i});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::int64_t> to_global() const
    {
        std::vector<std::int64_t> out;
        for (const auto& f : to_vector()) out.push_back(encode_global(f));
        return out;
    }

    /// Number of members in the given pool.
    std::int64_t count_in(PoolTag pool) const
    {
        std::int64_t n = 0;
        for (const auto& b : m_bands) {
            if (b.pool == pool) n += b.size();
        }
        return n;
    }

    friend bool operator==(const FrequencySet&, const FrequencySet&) = default;

    friend FrequencySet set_union(const FrequencySet& x, const FrequencySet& y)
    {
        FrequencySet out;
        out.m_bands.reserve(x.m_bands.size() + y.m_bands.size());
        auto i = x.m_bands.begin(), j = y.m_bands.begin();
        while (i != x.m_bands.end() || j != y.m_bands.end()) {
            const Band* next;
            if (j == y.m_bands.end() || (i != x.m_bands.end() && band_less(*i, *j))) next = &*i++;
            else next = &*j++;
            out.push_back_band(*next);
        }
        return out;
    }

    friend FrequencySet set_intersection(const FrequencySet& x, const FrequencySet& y)
    {
        FrequencySet out;
        auto i = x.m_bands.begin(), j = y.m_bands.begin();
        while (i != x.m_bands.end() && j != y.m_bands.end()) {
            if (i->pool != j->pool) {
                if (i->pool < j->pool) ++i;
                else ++j;
                continue;
            }
            const std::int64_t lo = std::max(i->first, j->first);
            const std::int64_t hi = std::min(i->last, j->last);
            if (lo <= hi) out.m_bands.push_back({i->pool, lo, hi});
            if (i->last < j->last) ++i;
            else ++j;
        }
        return out;
    }

    friend bool intersects(const FrequencySet& x, const FrequencySet& y)
    {
        auto i = x.m_bands.begin(), j = y.m_bands.begin();
        while (i != x.m_bands.end() && j != y.m_bands.end()) {
            if (i->pool != j->pool) {
                if (i->pool < j->pool) ++i;
                else ++j;
                continue;
            }
            if (std::max(i->first, j->first) <= std::min(i->last, j->last)) return true;
            if (i->last < j->last) ++i;
            else ++j;
        }
        return false;
    }

    friend FrequencySet set_difference(const FrequencySet& x, const FrequencySet& y)
    {
        FrequencySet out;
        auto j = y.m_bands.begin();
        for (const Band& b : x.m_bands) {
            std::int64_t cur = b.first;
            while (j != y.m_bands.end() && key(j->pool, j->last) < key(b.pool, cur)) ++j;
            for (auto k = j; k != y.m_bands.end() && k->pool == b.pool && k->first <= b.last; ++k) {
                if (k->first > cur) out.m_bands.push_back({b.pool, cur, k->first - 1});
                cur = std::max(cur, k->last + 1);
            }
            if (cur <= b.last) out.m_bands.push_back({b.pool, cur, b.last});
        }
        return out;
    }

    bool is_subset_of(const FrequencySet& y) const { return set_difference(*this, y).empty(); }

    FrequencySet& operator|=(const FrequencySet& y) { return *this = set_union(*this, y); }

private:
    static std::pair<int, std::int64_t> key(PoolTag p, std::int64_t i) { return {static_cast<int>(p), i}; }
    static bool key_less_freq(const Frequency& x, const Frequency& y) { return key(x.pool, x.index) < key(y.pool, y.index); }
    static bool band_less(const Band& x, const Band& y) { return key(x.pool, x.first) < key(y.pool, y.first); }

    void push_back_band(const Band& b)
    {
        if (!m_bands.empty()) {
            Band& back = m_bands.back();
            if (back.pool == b.pool && b.first <= back.last + 1) {
                back.last = std::max(back.last, b.last);
                return;
            }
        }
        m_bands.push_back(b);
    }

    void push_back_index(PoolTag pool, std::int64_t i)
    {
        if (i < 1) throw std::invalid_argument("frequency index must be positive");
        push_back_band({pool, i, i});
    }

    std::vector<Band> m_bands;
};

inline std::string to_string(const FrequencySet& s)
{
    std::string out = "{";
    bool first = true;
    for (const auto& b : s.bands()) {
        out += (first ? "" : ", ") + std::string(to_string(b.pool)) + std::to_string(b.first);
        if (b.last != b.first) out += ".." + std::string(to_string(b.pool)) + std::to_string(b.last);
        first = false;
    }
    return out + "}";
}

inline std::ostream& operator<<(std::ostream& os, const FrequencySet& s) { return os << to_string(s); }

} // namespace bifreq
