#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "fomo/random.hpp"

namespace {

using fomo::Xoshiro256;

TEST(Random, SameSeedSameStream) {
    Xoshiro256 a(42), b(42), c(43);
    std::vector<std::uint64_t> xa, xb, xc;
    for (int i = 0; i < 64; ++i) {
        xa.push_back(a());
        xb.push_back(b());
        xc.push_back(c());
    }
    EXPECT_EQ(xa, xb);
    EXPECT_NE(xa, xc);
}

TEST(Random, DerivedSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t parent : {0ULL, 1ULL, 2ULL, 0xFFFFFFFFFFFFFFFFULL}) {
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(fomo::derive_seed(parent, i));
    }
    EXPECT_EQ(seen.size(), 4000u);
    EXPECT_EQ(fomo::derive_seed(7, 3), fomo::derive_seed(7, 3));
}

TEST(Random, Uniform01InHalfOpenUnitInterval) {
    Xoshiro256 gen(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = fomo::uniform01(gen);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_LT(lo, 1e-4);
    EXPECT_GT(hi, 1 - 1e-4);
    // Mean of U(0,1): sd of the average is 1/sqrt(12 n).
    EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Random, UniformBelowCoversRangeEvenly) {
    Xoshiro256 gen(9);
    std::vector<int> counts(7, 0);
    constexpr int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto k = fomo::uniform_below(gen, 7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
    EXPECT_EQ(fomo::uniform_below(gen, 1), 0u);
}

TEST(Random, GeometricTrialsMatchesMean) {
    Xoshiro256 gen(5);
    for (double p : {1.0, 0.5, 0.1, 0.001}) {
        double sum = 0.0;
        constexpr int n = 40000;
        for (int i = 0; i < n; ++i) {
            const auto t = fomo::geometric_trials(gen, p);
            ASSERT_GE(t, 1u);
            sum += static_cast<double>(t);
        }
        const double sd = std::sqrt((1 - p) / (p * p));
        EXPECT_NEAR(sum / n, 1.0 / p, 5.0 * sd / std::sqrt(n) + 1e-12) << "p=" << p;
    }
}

}  // namespace
