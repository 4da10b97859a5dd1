#pragma once

// Coupon collector expectations with unequal probabilities.
//
// Two draw models appear here and they are not interchangeable:
//
//  * Single-coupon draws: each draw yields coupon i with probability p_i and
//    nothing with probability 1 - sum(p). Dice, birthdays. The expected number
//    of draws to see every coupon is
//        E[T] = sum over nonempty J of (-1)^(|J|+1) / P(J)
//             = integral_0^inf [1 - prod_i (1 - exp(-p_i x))] dx,
//    the second form being the Poissonized one, which stays linear in m.
//
//  * Independent sightings: each draw shows coupon i with probability q_i,
//    independently across coupons, so a draw may show several. This is the
//    with-replacement model of scanning multi-label documents, where q_i is a
//    per-document topic prevalence and sum(q) may exceed 1. Here
//        P(T <= t) = prod_i (1 - (1 - q_i)^t).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fomo/errors.hpp"
#include "fomo/random.hpp"

namespace fomo::collector {

inline constexpr std::size_t kMaxExactCoupons = 25;

// Per-draw coupon probabilities for the single-coupon model.
class CouponDistribution {
public:
    CouponDistribution() = default;

    explicit CouponDistribution(std::vector<double> probabilities)
        : probabilities_(std::move(probabilities)) {
        if (probabilities_.empty()) throw DomainError("coupon distribution is empty");
        double total = 0.0;
        for (double p : probabilities_) {
            if (!(p > 0.0 && p <= 1.0)) {
                throw DomainError("coupon probability must lie in (0, 1], got " + std::to_string(p));
            }
            total += p;
        }
        if (total > 1.0 + 1e-9) {
            throw DomainError("coupon probabilities sum to " + std::to_string(total) + " > 1");
        }
    }

    static CouponDistribution uniform(std::size_t m) {
        detail::require_domain(m >= 1, "coupon count must be >= 1");
        return CouponDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    std::span<const double> probabilities() const noexcept { return probabilities_; }
    std::size_t size() const noexcept { return probabilities_.size(); }

    double total() const noexcept {
        return std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    }

    double min_probability() const noexcept {
        return *std::min_element(probabilities_.begin(), probabilities_.end());
    }

    bool operator==(const CouponDistribution&) const = default;

private:
    std::vector<double> probabilities_;
};

// Sums 2..12 of two fair dice.
inline CouponDistribution dice_sum_distribution() {
    std::vector<double> p;
    p.reserve(11);
    for (int ways : {1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1}) p.push_back(ways / 36.0);
    return CouponDistribution(std::move(p));
}

// m * H_m, the equal-probability collector.
inline double expected_draws_equal(std::uint64_t m) {
    detail::require_domain(m >= 1, "coupon count must be >= 1");
    // Smallest terms first.
    long double harmonic = 0.0L;
    for (std::uint64_t i = m; i >= 1; --i) harmonic += 1.0L / static_cast<long double>(i);
    return static_cast<double>(static_cast<long double>(m) * harmonic);
}

// Exact expectation by inclusion-exclusion over all 2^m - 1 nonempty subsets.
inline double expected_draws_unequal_exact(const CouponDistribution& dist) {
    const auto p = dist.probabilities();
    const std::size_t m = p.size();
    if (m > kMaxExactCoupons) {
        throw SizeError("exact inclusion-exclusion supports at most " +
                        std::to_string(kMaxExactCoupons) + " coupons (got " + std::to_string(m) +
                        "); use the summation method instead");
    }
    // Subset sums split into a low and a high half so every P(J) is a single
    // addition of two exactly enumerated partial sums.
    const std::size_t low_bits = (m + 1) / 2;
    const std::size_t high_bits = m - low_bits;
    auto half_sums = [&](std::size_t offset, std::size_t bits) {
        std::vector<long double> sums(std::size_t{1} << bits, 0.0L);
        for (std::size_t mask = 1; mask < sums.size(); ++mask) {
            const auto lowest = static_cast<std::size_t>(std::countr_zero(mask));
            sums[mask] = sums[mask & (mask - 1)] + p[offset + lowest];
        }
        return sums;
    };
    const auto low = half_sums(0, low_bits);
    const auto high = half_sums(low_bits, high_bits);

    long double total = 0.0L;
    for (std::size_t h = 0; h < high.size(); ++h) {
        const int high_count = std::popcount(h);
        long double partial = 0.0L;
        for (std::size_t l = (h == 0 ? 1 : 0); l < low.size(); ++l) {
            const long double term = 1.0L / (low[l] + high[h]);
            partial += ((high_count + std::popcount(l)) & 1) ? term : -term;
        }
        total += partial;
    }
    return static_cast<double>(total);
}

namespace detail {

// 1 - prod_i (1 - exp(-p_i x)), kept accurate at both ends.
inline double poissonized_tail(std::span<const double> p, double x) {
    double log_all_seen = 0.0;
    for (double pi : p) {
        const double a = pi * x;
        const double unseen = std::exp(-a);
        log_all_seen += unseen < 0.5 ? std::log1p(-unseen) : std::log(-std::expm1(-a));
    }
    return -std::expm1(log_all_seen);
}

}  // namespace detail

// Same expectation as expected_draws_unequal_exact, in O(m) work per
// quadrature node. Integrates the Poissonized tail over [0, 1/p_max] and then
// over dyadic panels until the remaining mass, bounded by
// sum_i exp(-p_i x) / p_min, drops below `tolerance`.
inline double expected_draws_unequal_sum(const CouponDistribution& dist, double tolerance = 1e-9) {
    fomo::detail::require_domain(tolerance > 0.0, "tolerance must be > 0");
    const auto p = dist.probabilities();
    const double p_max = *std::max_element(p.begin(), p.end());
    const double p_min = dist.min_probability();
    auto integrand = [p](double x) { return detail::poissonized_tail(p, x); };

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    double a = 0.0;
    double b = 1.0 / p_max;
    double total = 0.0;
    for (int panel = 0; panel < 2048; ++panel) {
        total += Quadrature::integrate(integrand, a, b, 12, 1e-14);
        double tail = 0.0;
        for (double pi : p) tail += std::exp(-pi * b);
        if (tail / p_min < tolerance) return total;
        a = b;
        b *= 2.0;
    }
    throw DomainError("collector integral did not converge");
}

// Independent-sightings model: sum_{t>=0} [1 - prod_i (1 - (1-q_i)^t)],
// truncated once sum_i (1-q_i)^t / q_min < tolerance.
inline double expected_scan_length(std::span<const double> prevalences, double tolerance = 1e-9) {
    fomo::detail::require_domain(!prevalences.empty(), "prevalence list is empty");
    fomo::detail::require_domain(tolerance > 0.0, "tolerance must be > 0");
    double q_min = 1.0;
    for (double q : prevalences) {
        fomo::detail::require_domain(q > 0.0 && q <= 1.0, "prevalence must lie in (0, 1]");
        q_min = std::min(q_min, q);
    }

    struct Active {
        double log_keep;  // log(1 - q)
        double keep;      // 1 - q
        double unseen;    // (1 - q)^t
    };
    std::vector<Active> active;
    for (double q : prevalences) {
        if (q < 1.0) active.push_back({std::log1p(-q), 1.0 - q, 1.0});
    }

    constexpr double kNegligible = 1e-30;
    constexpr std::uint64_t kResync = 1024;
    double total = 1.0;  // t = 0: nothing has been seen yet
    for (std::uint64_t t = 1;; ++t) {
        double log_all_seen = 0.0;
        double tail = 0.0;
        for (auto& a : active) {
            a.unseen = (t % kResync == 0) ? std::exp(static_cast<double>(t) * a.log_keep)
                                          : a.unseen * a.keep;
            const double x = a.unseen;
            tail += x;
            log_all_seen += x < 0x1.0p-20 ? -x * (1.0 + x * (0.5 + x / 3.0)) : std::log1p(-x);
        }
        std::erase_if(active, [](const Active& a) { return a.unseen < kNegligible; });
        total += -std::expm1(log_all_seen);
        if (tail / q_min < tolerance) return total;
    }
}

inline double expected_scan_length(const CouponDistribution& dist, double tolerance = 1e-9) {
    return expected_scan_length(dist.probabilities(), tolerance);
}

// P(T <= t) under independent sightings.
inline double completion_cdf(std::span<const double> prevalences, std::uint64_t t) {
    if (t == 0) return 0.0;
    double log_all_seen = 0.0;
    for (double q : prevalences) {
        if (q >= 1.0) continue;
        const double unseen = std::exp(static_cast<double>(t) * std::log1p(-q));
        log_all_seen += std::log1p(-unseen);
    }
    return std::exp(log_all_seen);
}

// Smallest t with prod_i (1 - (1-p_i)^t) >= q, by doubling then bisection.
inline std::uint64_t completion_quantile(std::span<const double> prevalences, double q) {
    fomo::detail::require_domain(q > 0.0 && q < 1.0, "quantile must lie in (0, 1)");
    fomo::detail::require_domain(!prevalences.empty(), "prevalence list is empty");
    for (double p : prevalences) {
        fomo::detail::require_domain(p > 0.0 && p <= 1.0, "prevalence must lie in (0, 1]");
    }
    std::uint64_t lo = 0;  // invariant: cdf(lo) < q
    std::uint64_t hi = 1;  // invariant after bracketing: cdf(hi) >= q
    while (completion_cdf(prevalences, hi) < q) {
        lo = hi;
        if (hi > (std::numeric_limits<std::uint64_t>::max() >> 1)) {
            throw DomainError("completion quantile out of range");
        }
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (completion_cdf(prevalences, mid) >= q) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

inline std::uint64_t completion_quantile(const CouponDistribution& dist, double q) {
    return completion_quantile(dist.probabilities(), q);
}

// Expected index of the first draw that repeats an earlier birthday, for m
// equally likely days: 1 + sum_{k=1..m} prod_{i=1..k-1} (1 - i/m).
inline double birthday_first_collision_expected(std::uint64_t days = 365) {
    fomo::detail::require_domain(days >= 1, "day count must be >= 1");
    long double total = 1.0L;
    long double no_collision = 1.0L;
    for (std::uint64_t k = 1; k <= days; ++k) {
        if (k > 1) {
            no_collision *= 1.0L - static_cast<long double>(k - 1) / static_cast<long double>(days);
        }
        total += no_collision;
    }
    return static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

inline MeanEstimate summarize_mean(std::span<const std::uint64_t> samples) {
    MeanEstimate est;
    est.trials = samples.size();
    if (samples.empty()) return est;
    // Welford.
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t n = 0;
    for (std::uint64_t s : samples) {
        ++n;
        const double x = static_cast<double>(s);
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    est.mean = mean;
    if (n > 1) {
        est.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return est;
}

// Completion draw counts under the single-coupon model. Each trial jumps
// straight from one new coupon to the next: the wait is geometric in the
// total probability of the still-unseen coupons, and the coupon found is
// chosen in proportion to its probability. Trial i uses the stream
// derive_seed(seed, i).
inline std::vector<std::uint64_t> sample_completion_draws(const CouponDistribution& dist,
                                                          std::uint64_t trials,
                                                          std::uint64_t seed) {
    const auto p = dist.probabilities();
    std::vector<std::uint64_t> out;
    out.reserve(trials);
    std::vector<double> unseen;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Xoshiro256 gen(derive_seed(seed, trial));
        unseen.assign(p.begin(), p.end());
        std::uint64_t draws = 0;
        while (!unseen.empty()) {
            const double mass = std::accumulate(unseen.begin(), unseen.end(), 0.0);
            draws += geometric_trials(gen, std::min(1.0, mass));
            double pick = uniform01(gen) * mass;
            std::size_t chosen = unseen.size() - 1;
            for (std::size_t i = 0; i + 1 < unseen.size(); ++i) {
                if (pick < unseen[i]) {
                    chosen = i;
                    break;
                }
                pick -= unseen[i];
            }
            unseen[chosen] = unseen.back();
            unseen.pop_back();
        }
        out.push_back(draws);
    }
    return out;
}

// Completion draw counts under independent sightings: the maximum of
// independent geometric first-sighting times.
inline std::vector<std::uint64_t> sample_independent_scans(std::span<const double> prevalences,
                                                           std::uint64_t trials,
                                                           std::uint64_t seed) {
    std::vector<std::uint64_t> out;
    out.reserve(trials);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Xoshiro256 gen(derive_seed(seed, trial));
        std::uint64_t longest = 0;
        for (double q : prevalences) longest = std::max(longest, geometric_trials(gen, q));
        out.push_back(longest);
    }
    return out;
}

inline MeanEstimate monte_carlo_expected_draws(const CouponDistribution& dist,
                                               std::uint64_t trials, std::uint64_t seed) {
    const auto samples = sample_completion_draws(dist, trials, seed);
    return summarize_mean(samples);
}

}  // namespace fomo::collector
