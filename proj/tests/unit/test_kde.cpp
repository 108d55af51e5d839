#include "newsjump/error.hpp"
#include "newsjump/kde.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace newsjump;

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(mean, sd);
    std::vector<double> out;
    while (out.size() < n) {
        const double x = d(rng);
        if (x >= 0.0 && x <= 1.0) out.push_back(x);
    }
    return out;
}

double grid_mass(const KdeDensity& d) {
    const auto& v = d.grid_values();
    const double dx = 1.0 / static_cast<double>(v.size() - 1);
    double m = 0.0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) m += 0.5 * (v[j] + v[j + 1]) * dx;
    return m;
}

}  // namespace

// ===========================================================================
// cosine transforms
// ===========================================================================

TEST(Dct, MatchesNaiveSums) {
    const std::size_t n = 64;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const auto a = detail::dct2(x);
    ASSERT_EQ(a.size(), n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += x[j] * std::cos(std::numbers::pi * static_cast<double>(k * (2 * j + 1)) / (2.0 * n));
        EXPECT_NEAR(a[k], k == 0 ? s : 2.0 * s, 1e-11) << k;
    }
    const auto y = detail::dct3(a);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a[0];
        for (std::size_t k = 1; k < n; ++k)
            s += a[k] * std::cos(std::numbers::pi * static_cast<double>(k * (2 * j + 1)) / (2.0 * n));
        EXPECT_NEAR(y[j], s, 1e-10) << j;
        EXPECT_NEAR(y[j] / static_cast<double>(n), x[j], 1e-12) << j;
    }
}

// ===========================================================================
// bandwidth selection
// ===========================================================================

TEST(Bandwidth, SilvermanFormula) {
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.9};
    double mean = 0.4, var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / 5.0);
    const double iqr = 0.475 - 0.225;  // linear-interpolated quartiles
    EXPECT_NEAR(silverman_bandwidth(x), 0.9 * std::min(sd, iqr / 1.34) * std::pow(6.0, -0.2), 1e-12);
}

TEST(Bandwidth, GaussianDataNearNormalReference) {
    const auto x = normal_sample(2000, 0.5, 0.08, 2);
    const auto r = kde_bandwidth(x);
    EXPECT_TRUE(r.converged) << r.warning;
    EXPECT_TRUE(r.warning.empty());
    EXPECT_NEAR(r.t_star, r.bandwidth * r.bandwidth, 1e-15);
    // Normal-reference optimum (4 / 3n)^(1/5) sigma.
    const double h_ref = std::pow(4.0 / (3.0 * 2000.0), 0.2) * 0.08;
    EXPECT_NEAR(r.bandwidth / h_ref, 1.0, 0.3);
}

TEST(Bandwidth, BimodalNarrowerThanSilverman) {
    auto x = normal_sample(1000, 0.3, 0.02, 3);
    const auto y = normal_sample(1000, 0.7, 0.02, 4);
    x.insert(x.end(), y.begin(), y.end());
    const auto r = kde_bandwidth(x);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.bandwidth, silverman_bandwidth(x));
}

TEST(Bandwidth, TooFewDistinctValues) {
    const std::vector<double> same(10, 0.4);
    EXPECT_THROW(kde_bandwidth(same), DataError);
    EXPECT_THROW(kde_bandwidth(std::vector<double>{}), DataError);
}

TEST(Bandwidth, FallbackCarriesWarning) {
    std::vector<double> x;
    for (int i = 0; i < 200; ++i) x.push_back((i + 0.5) / 200.0);
    const auto r = kde_bandwidth(x);
    if (!r.converged) {
        EXPECT_FALSE(r.warning.empty());
        EXPECT_DOUBLE_EQ(r.bandwidth, silverman_bandwidth(x));
    }
    EXPECT_GT(r.bandwidth, 0.0);
}

// ===========================================================================
// density
// ===========================================================================

TEST(Density, UnitMassAndNonnegative) {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        auto x = normal_sample(500, 0.4, 0.1, seed);
        x.push_back(0.0);
        x.push_back(1.0);
        const auto d = KdeDensity::fit(x);
        EXPECT_NEAR(grid_mass(d), 1.0, 1e-6);
        EXPECT_EQ(d.grid_values().size(), kKdeGridSize);
        for (double v : d.grid_values()) ASSERT_GE(v, 0.0);
        EXPECT_EQ(d(-0.1), 0.0);
        EXPECT_EQ(d(1.1), 0.0);
    }
}

TEST(Density, WideBandwidthIsNearlyUniform) {
    const auto x = normal_sample(300, 0.5, 0.1, 8);
    const auto d = KdeDensity::with_bandwidth(x, 2.0);
    for (double p : {0.0, 0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(d(p), 1.0, 1e-3) << p;
}

TEST(Density, PeaksAtTheModes) {
    auto x = normal_sample(800, 0.25, 0.03, 9);
    const auto y = normal_sample(800, 0.75, 0.03, 10);
    x.insert(x.end(), y.begin(), y.end());
    const auto d = KdeDensity::fit(x);
    EXPECT_GT(d(0.25), 5.0 * d(0.5));
    EXPECT_GT(d(0.75), 5.0 * d(0.5));
}

TEST(Density, SamplesFollowTheDensity) {
    const auto x = normal_sample(1000, 0.6, 0.12, 11);
    const auto d = KdeDensity::fit(x);
    Rng rng(12);
    std::vector<double> draws(20000);
    for (auto& v : draws) {
        v = d.sample(rng);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
    std::sort(draws.begin(), draws.end());
    // Kolmogorov-Smirnov distance against the trapezoid CDF of the grid.
    const auto& g = d.grid_values();
    const double dx = 1.0 / static_cast<double>(g.size() - 1);
    std::vector<double> cdf(g.size(), 0.0);
    for (std::size_t j = 1; j < g.size(); ++j) cdf[j] = cdf[j - 1] + 0.5 * (g[j - 1] + g[j]) * dx;
    double ks = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto j = std::min(static_cast<std::size_t>(draws[i] / dx), g.size() - 1);
        const double f = cdf[j];
        ks = std::max({ks, std::fabs(f - static_cast<double>(i) / draws.size()),
                       std::fabs(f - static_cast<double>(i + 1) / draws.size())});
    }
    EXPECT_LT(ks, 0.015);
}

TEST(Density, SameSeedSameDraws) {
    const auto x = normal_sample(200, 0.5, 0.2, 13);
    const auto d = KdeDensity::fit(x);
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(d.sample(a), d.sample(b));
}

TEST(Density, BadBandwidthRejected) {
    const std::vector<double> x{0.1, 0.2};
    EXPECT_THROW(KdeDensity::with_bandwidth(x, 0.0), ContractError);
    EXPECT_THROW(KdeDensity::with_bandwidth(std::vector<double>{}, 0.1), ContractError);
}
