#include "fixtures.hpp"

#include "newsjump/error.hpp"
#include "newsjump/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace newsjump;
using fixtures::at;

namespace {

Announcement event(const std::string& asset, Timestamp t) { return {asset, t, "scheduled", ""}; }

std::vector<Date> trading_dates(const SessionCalendar& cal) {
    std::vector<Date> out;
    for (const auto& s : cal.sessions()) out.push_back(s.date);
    return out;
}

ReferenceInputs two_asset_inputs() {
    const auto cal = fixtures::weekday_calendar(4);
    ReferenceInputs in;
    const std::vector<double> atoms{8.0 / 24, 13.5 / 24};
    in.counts = {{"A", 40}, {"B", 25}};
    for (const auto& a : {"A", "B"}) {
        in.trading_days[a] = trading_dates(cal);
        in.distributions.emplace(a, IntradayDistribution::from_atoms(atoms));
    }
    return in;
}

}  // namespace

// ===========================================================================
// IntradayDistribution
// ===========================================================================

TEST(Atoms, WeightsAreFrequencies) {
    const std::vector<double> f{0.5, 0.25, 0.5, 0.5};
    const auto d = IntradayDistribution::from_atoms(f);
    ASSERT_EQ(d.atoms().size(), 2u);
    EXPECT_EQ(d.atoms()[0], 0.25);
    EXPECT_DOUBLE_EQ(d.weights()[0], 0.25);
    EXPECT_DOUBLE_EQ(d.weights()[1], 0.75);
}

TEST(Atoms, SampleFrequenciesMatchWeights) {
    const std::vector<double> f{0.1, 0.1, 0.1, 0.9};
    const auto d = IntradayDistribution::from_atoms(f);
    Rng rng(1);
    int low = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const double x = d.sample(rng);
        ASSERT_TRUE(x == 0.1 || x == 0.9);
        low += x == 0.1;
    }
    EXPECT_NEAR(static_cast<double>(low) / n, 0.75, 4 * std::sqrt(0.75 * 0.25 / n));
}

TEST(Atoms, EmptyRejected) { EXPECT_THROW(IntradayDistribution::from_atoms(std::vector<double>{}), DataError); }

TEST(Fit, AutomaticChoosesAtomsForFewClockTimes) {
    std::vector<Announcement> ev;
    for (int d = 2; d < 12; ++d) ev.push_back(event("A", Timestamp::at(Date::from_ymd(2006, 1, d), 8 * kMsPerHour)));
    ev.push_back(event("A", at("2006-01-13", "13:00")));
    EXPECT_EQ(fit_intraday_distribution(ev, KdeMode::automatic).kind(), IntradayDistribution::Kind::atoms);
    ev.push_back(event("A", at("2006-01-13", "15:00")));
    EXPECT_EQ(fit_intraday_distribution(ev, KdeMode::automatic).kind(), IntradayDistribution::Kind::kde);
    EXPECT_EQ(fit_intraday_distribution(ev, KdeMode::atoms).kind(), IntradayDistribution::Kind::atoms);
}

TEST(Fit, ForcedKdeWithOneClockTimeFallsBackToAtoms) {
    std::vector<Announcement> ev{event("A", at("2006-01-03", "08:00")), event("A", at("2006-01-04", "08:00"))};
    std::vector<std::string> warnings;
    const auto d = fit_intraday_distribution(ev, KdeMode::kde, &warnings);
    EXPECT_EQ(d.kind(), IntradayDistribution::Kind::atoms);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Fit, PooledSharesOneDistribution) {
    std::vector<Announcement> ev{event("A", at("2006-01-03", "08:00")), event("B", at("2006-01-04", "12:00"))};
    const auto pooled = fit_intraday_distributions(ev, KdeMode::atoms, Pooling::pooled);
    ASSERT_EQ(pooled.size(), 2u);
    EXPECT_EQ(pooled.at("A").atoms().size(), 2u);
    EXPECT_EQ(pooled.at("B").atoms(), pooled.at("A").atoms());
    const auto per = fit_intraday_distributions(ev, KdeMode::atoms, Pooling::per_asset);
    EXPECT_EQ(per.at("A").atoms().size(), 1u);
    EXPECT_EQ(per.at("B").atoms()[0], 0.5);
}

TEST(Fit, KdeMassIsOne) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> hour(12.0, 3.0);
    std::vector<Announcement> ev;
    for (int i = 0; i < 300; ++i) {
        const double h = std::clamp(hour(rng), 0.0, 23.99);
        ev.push_back(event("A", Timestamp::at(Date::from_ymd(2006, 1, 2), std::llround(h * kMsPerHour))));
    }
    const auto d = fit_intraday_distribution(ev, KdeMode::kde);
    ASSERT_EQ(d.kind(), IntradayDistribution::Kind::kde);
    const auto& g = d.density().grid_values();
    double m = 0.0;
    for (std::size_t j = 0; j + 1 < g.size(); ++j) m += 0.5 * (g[j] + g[j + 1]) / static_cast<double>(g.size() - 1);
    EXPECT_NEAR(m, 1.0, 1e-6);
}

// ===========================================================================
// reference samples
// ===========================================================================

TEST(Reference, CountsPreservedPerAsset) {
    const auto in = two_asset_inputs();
    const auto s = generate_reference_sample(in, 7);
    EXPECT_EQ(s.times.at("A").size(), 40u);
    EXPECT_EQ(s.times.at("B").size(), 25u);
    EXPECT_EQ(s.total(), 65u);
    EXPECT_EQ(s.seed, 7u);
}

TEST(Reference, TimesOnTradingDaysAtAtoms) {
    const auto in = two_asset_inputs();
    const auto s = generate_reference_sample(in, 8);
    const auto& days = in.trading_days.at("A");
    const std::set<Date> day_set(days.begin(), days.end());
    for (const auto& [asset, times] : s.times) {
        EXPECT_TRUE(std::is_sorted(times.begin(), times.end()));
        for (const auto& t : times) {
            EXPECT_TRUE(day_set.count(t.date()));
            EXPECT_TRUE(t.ms_of_day() == 8 * kMsPerHour || t.ms_of_day() == 13 * kMsPerHour + 30 * kMsPerMinute);
        }
        const auto counts = s.day_counts(asset, days);
        std::size_t sum = 0;
        for (auto c : counts) sum += c;
        EXPECT_EQ(sum, times.size());
    }
}

TEST(Reference, DaysDrawnUniformly) {
    ReferenceInputs in = two_asset_inputs();
    in.counts = {{"A", 40000}};
    const auto s = generate_reference_sample(in, 9);
    const auto& days = in.trading_days.at("A");
    const auto counts = s.day_counts("A", days);
    const double expected = 40000.0 / static_cast<double>(days.size());
    double chi2 = 0.0;
    for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 19 degrees of freedom; 0.999 quantile is about 43.8.
    EXPECT_LT(chi2, 43.8);
}

TEST(Reference, SeedReproducibleAndDistinct) {
    const auto in = two_asset_inputs();
    const auto a = generate_reference_sample(in, 11);
    const auto b = generate_reference_sample(in, 11);
    const auto c = generate_reference_sample(in, 12);
    EXPECT_EQ(a.times, b.times);
    EXPECT_NE(a.times, c.times);
}

TEST(Reference, AssetStreamIndependentOfOtherAssets) {
    auto in = two_asset_inputs();
    const auto a = generate_reference_sample(in, 13);
    in.counts["B"] = 3;
    const auto b = generate_reference_sample(in, 13);
    EXPECT_EQ(a.times.at("A"), b.times.at("A"));
}

TEST(Reference, SeedDerivation) {
    EXPECT_EQ(copy_seed(5, 3), child_seed(5, {3}));
    EXPECT_EQ(asset_seed(5, 1), child_seed(5, {1}));
    EXPECT_NE(copy_seed(5, 3), copy_seed(5, 4));
    EXPECT_NE(child_seed(1, {2, 3}), child_seed(1, {3, 2}));
}

TEST(Reference, EnsembleIndependentOfWorkers) {
    const auto in = two_asset_inputs();
    const auto serial = generate_reference_ensemble(in, 20, 99, 1);
    const auto parallel = generate_reference_ensemble(in, 20, 99, 4);
    ASSERT_EQ(serial.size(), 20u);
    for (std::size_t m = 0; m < serial.size(); ++m) {
        EXPECT_EQ(serial[m].times, parallel[m].times);
        EXPECT_EQ(serial[m].seed, copy_seed(99, m));
        EXPECT_EQ(serial[m].times, generate_reference_sample(in, copy_seed(99, m)).times);
    }
    EXPECT_THROW(generate_reference_ensemble(in, 0, 1), ContractError);
}

TEST(Reference, MissingInputsRejected) {
    ReferenceInputs in = two_asset_inputs();
    in.trading_days.erase("B");
    EXPECT_THROW(generate_reference_sample(in, 1), ContractError);
}

TEST(Reference, DefaultCopies) {
    EXPECT_EQ(default_welch_copies(57), 57u);
    EXPECT_EQ(kDefaultBootstrapCopies, 10000u);
}

TEST(Reference, WrittenSampleRoundTrips) {
    const auto in = two_asset_inputs();
    const auto s = generate_reference_sample(in, 21);
    std::ostringstream out;
    write_reference_sample(out, s, "scheduled");
    EXPECT_NE(out.str().find("seed=21"), std::string::npos);
    std::istringstream back_in(out.str());
    const auto back = read_announcements(back_in);
    ASSERT_EQ(back.size(), s.total());
    std::size_t i = 0;
    for (const auto& [asset, times] : s.times)
        for (const auto& t : times) {
            EXPECT_EQ(back[i].asset_id, asset);
            EXPECT_EQ(back[i].time, t);
            ++i;
        }
}
