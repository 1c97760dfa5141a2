#pragma once

// F-systems: families of frequency sets F^c_{t,k} indexed by side c and
// 0 <= k <= t, and the three built-in constructions.

#include "bifreq/frequency.hpp"
#include "bifreq/golden.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace bifreq {

using Generator = std::function<FrequencySet(Side, std::int64_t t, std::int64_t k)>;

struct FSystemSpec {
    std::string name;
    GoldenNumber claimed_ratio;
    std::int64_t claimed_lambda = 0;
    Generator generator;

    FrequencySet operator()(Side c, std::int64_t t, std::int64_t k) const { return generator(c, t, k); }
};

/// The first max(0, n) frequencies of a pool.
inline FrequencySet pool_prefix(PoolTag pool, std::int64_t n) { return FrequencySet::band(pool, 1, n); }

/// The first floor(x) frequencies of a pool; empty when floor(x) < 1.
inline FrequencySet pool_prefix(PoolTag pool, const GoldenNumber& x)
{
    const BigInt n = x.floor();
    if (n < 1) return {};
    return pool_prefix(pool, n.convert_to<std::int64_t>());
}

/// Frequencies with index in (lo, hi]: the prefix of length hi minus the
/// prefix of length lo. Negative boundaries clamp to the empty prefix.
inline FrequencySet pool_band(PoolTag pool, std::int64_t lo, std::int64_t hi)
{
    return FrequencySet::band(pool, std::max<std::int64_t>(lo, 0) + 1, hi);
}

inline FrequencySet pool_band(PoolTag pool, const GoldenNumber& lo, const GoldenNumber& hi)
{
    const BigInt l = lo.floor(), h = hi.floor();
    if (h < 1 || l >= h) return {};
    return pool_band(pool, l.convert_to<std::int64_t>(), h.convert_to<std::int64_t>());
}

namespace detail {

inline void require_indices(std::int64_t t, std::int64_t k)
{
    if (k < 0 || k > t) {
        throw std::domain_error("F-system queried outside 0 <= k <= t (t=" + std::to_string(t) +
                                ", k=" + std::to_string(k) + ")");
    }
}

} // namespace detail

/// F^c_{t,k} = first k frequencies of P^c. Ratio 2, lambda 0.
inline FSystemSpec trivial_system()
{
    return {"trivial", GoldenNumber(2), 0, [](Side c, std::int64_t t, std::int64_t k) {
                detail::require_indices(t, k);
                return pool_prefix(private_pool(c), k);
            }};
}

/// F^c_{t,k} = P^c_{t/2+1} u (S_{t/2} \ S_{t-k}) with S the symmetric pool.
/// Ratio 3/2, lambda 2.
inline FSystemSpec half_system()
{
    return {"half", GoldenNumber::fraction(3, 2), 2, [](Side c, std::int64_t t, std::int64_t k) {
                detail::require_indices(t, k);
                return set_union(pool_prefix(private_pool(c), t / 2 + 1), pool_band(PoolTag::Symmetric, t - k, t / 2));
            }};
}

namespace detail {

// Floors of the scaled constants that appear as set boundaries in the golden
// construction, all exact.
struct GoldenFloors {
    ScaledFloor alpha{constants().alpha};
    ScaledFloor beta{constants().beta};
    ScaledFloor phi_beta{constants().phi * constants().beta};
    ScaledFloor rho{constants().rho};
    ScaledFloor phi_rho{constants().phi * constants().rho};
};

/// True iff t <= phi*k, i.e. min(t, phi*k) = t. Exact: 2t - k <= k*sqrt5.
inline bool at_most_phi_times(std::int64_t t, std::int64_t k)
{
    const __int128 lhs = 2 * static_cast<__int128>(t) - k;
    if (lhs <= 0) return true;
    return lhs * lhs <= 5 * static_cast<__int128>(k) * k;
}

} // namespace detail

/// The R0-competitive construction:
///
///   F^c_{t,k} = P^c_{alpha t + 4}
///             u (S^c_{beta min(t, phi k)}  \ S^c_{beta (t-k)})
///             u (S^c'_{beta k}             \ S^c'_{phi beta (t-k)})
///             u (Q_{rho min(t, phi k)}     \ Q_{phi rho (t-k)})
///
/// with R0 = (18 - sqrt5)/11 and lambda 8.
inline FSystemSpec golden_system()
{
    auto floors = std::make_shared<const detail::GoldenFloors>();
    return {"golden", constants().r0, 8, [floors](Side c, std::int64_t t, std::int64_t k) {
                detail::require_indices(t, k);
                const auto& f = *floors;
                const bool t_is_min = detail::at_most_phi_times(t, k);
                const std::int64_t beta_min = t_is_min ? f.beta(t) : f.phi_beta(k);
                const std::int64_t rho_min = t_is_min ? f.rho(t) : f.phi_rho(k);

                FrequencySet s = pool_prefix(private_pool(c), f.alpha(t) + 4);
                s |= pool_band(shared_pool(c), f.beta(t - k), beta_min);
                s |= pool_band(shared_pool(other(c)), f.phi_beta(t - k), f.beta(k));
                s |= pool_band(PoolTag::Symmetric, f.phi_rho(t - k), rho_min);
                return s;
            }};
}

inline FSystemSpec builtin_system(std::string_view name)
{
    if (name == "trivial") return trivial_system();
    if (name == "half") return half_system();
    if (name == "golden") return golden_system();
    throw std::invalid_argument("unknown built-in F-system \"" + std::string(name) + "\"");
}

} // namespace bifreq
