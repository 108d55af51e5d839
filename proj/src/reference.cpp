#include "newsjump/reference.hpp"

#include "newsjump/error.hpp"
#include "newsjump/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace newsjump {

IntradayDistribution IntradayDistribution::from_atoms(std::span<const double> fractions) {
    if (fractions.empty()) throw DataError("intraday distribution needs at least one event");
    std::vector<double> sorted(fractions.begin(), fractions.end());
    std::sort(sorted.begin(), sorted.end());
    IntradayDistribution d;
    d.kind_ = Kind::atoms;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        d.atoms_.push_back(sorted[i]);
        d.weights_.push_back(static_cast<double>(j - i) / static_cast<double>(sorted.size()));
        i = j;
    }
    double c = 0.0;
    for (double w : d.weights_) d.cumulative_.push_back(c += w);
    d.cumulative_.back() = 1.0;
    return d;
}

IntradayDistribution IntradayDistribution::from_kde(std::span<const double> fractions) {
    if (fractions.empty()) throw DataError("intraday distribution needs at least one event");
    IntradayDistribution d;
    d.kind_ = Kind::kde;
    d.kde_ = std::make_shared<const KdeDensity>(KdeDensity::fit(fractions));
    return d;
}

double IntradayDistribution::sample(Rng& rng) const {
    if (kind_ == Kind::kde) return kde_->sample(rng);
    const double u = uniform01(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::string IntradayDistribution::describe() const {
    std::ostringstream out;
    if (kind_ == Kind::kde) {
        out << "kde bandwidth=" << kde_->bandwidth() << (kde_->selection().converged ? "" : " (silverman fallback)");
    } else {
        out << "atoms=" << atoms_.size();
    }
    return out.str();
}

IntradayDistribution fit_intraday_distribution(std::span<const Announcement> events, KdeMode mode,
                                               std::vector<std::string>* warnings) {
    if (events.empty()) throw DataError("cannot fit an intraday distribution to zero events");
    std::vector<double> fractions;
    fractions.reserve(events.size());
    for (const auto& e : events) fractions.push_back(e.time.day_fraction());

    std::vector<double> distinct = fractions;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const bool use_kde = mode == KdeMode::kde || (mode == KdeMode::automatic && distinct.size() > 2);
    if (!use_kde || distinct.size() < 2) {
        if (use_kde && warnings) warnings->push_back("single distinct clock time; empirical atoms used instead of kde");
        return IntradayDistribution::from_atoms(fractions);
    }
    auto d = IntradayDistribution::from_kde(fractions);
    if (warnings && !d.density().selection().warning.empty()) warnings->push_back(d.density().selection().warning);
    return d;
}

std::map<std::string, IntradayDistribution> fit_intraday_distributions(std::span<const Announcement> events,
                                                                        KdeMode mode, Pooling pooling,
                                                                        std::vector<std::string>* warnings) {
    std::map<std::string, std::vector<Announcement>> by_asset;
    for (const auto& e : events) by_asset[e.asset_id].push_back(e);
    std::map<std::string, IntradayDistribution> out;
    if (pooling == Pooling::pooled) {
        const auto shared = fit_intraday_distribution(events, mode, warnings);
        for (const auto& [asset, _] : by_asset) out.emplace(asset, shared);
        return out;
    }
    for (const auto& [asset, evs] : by_asset) out.emplace(asset, fit_intraday_distribution(evs, mode, warnings));
    return out;
}

std::vector<std::size_t> ReferenceSample::day_counts(const std::string& asset, std::span<const Date> days) const {
    std::vector<std::size_t> counts(days.size(), 0);
    auto it = times.find(asset);
    if (it == times.end()) return counts;
    for (const auto& t : it->second) {
        auto d = std::lower_bound(days.begin(), days.end(), t.date());
        if (d != days.end() && *d == t.date()) ++counts[static_cast<std::size_t>(d - days.begin())];
    }
    return counts;
}

std::size_t ReferenceSample::total() const {
    std::size_t n = 0;
    for (const auto& [_, v] : times) n += v.size();
    return n;
}

void draw_asset_times(std::size_t count, std::span<const Date> days, const IntradayDistribution& dist, Rng& rng,
                      std::vector<Timestamp>& out) {
    if (count == 0) return;
    if (days.empty()) throw ContractError("reference generation needs at least one trading day");
    for (std::size_t k = 0; k < count; ++k) {
        const Date day = days[uniform_index(rng, days.size())];
        const double tau = dist.sample(rng);
        out.push_back(Timestamp::at(day, std::llround(tau * static_cast<double>(kMsPerDay))));
    }
}

std::uint64_t asset_seed(std::uint64_t sample_seed, std::size_t asset_index) {
    return child_seed(sample_seed, {static_cast<std::uint64_t>(asset_index)});
}

std::uint64_t copy_seed(std::uint64_t base_seed, std::size_t copy) {
    return child_seed(base_seed, {static_cast<std::uint64_t>(copy)});
}

ReferenceSample generate_reference_sample(const ReferenceInputs& inputs, std::uint64_t seed) {
    ReferenceSample sample;
    sample.seed = seed;
    std::size_t index = 0;
    for (const auto& [asset, count] : inputs.counts) {
        auto& times = sample.times[asset];
        if (count > 0) {
            auto days = inputs.trading_days.find(asset);
            auto dist = inputs.distributions.find(asset);
            if (days == inputs.trading_days.end() || days->second.empty())
                throw ContractError("no trading days for asset " + asset);
            if (dist == inputs.distributions.end()) throw ContractError("no intraday distribution for asset " + asset);
            Rng rng(asset_seed(seed, index));
            times.reserve(count);
            draw_asset_times(count, days->second, dist->second, rng, times);
            std::sort(times.begin(), times.end());
        }
        ++index;
    }
    return sample;
}

std::vector<ReferenceSample> generate_reference_ensemble(const ReferenceInputs& inputs, std::size_t copies,
                                                         std::uint64_t base_seed, std::size_t workers) {
    if (copies == 0) throw ContractError("ensemble needs at least one copy");
    std::vector<ReferenceSample> out(copies);
    parallel_for(copies, workers, [&](std::size_t m) { out[m] = generate_reference_sample(inputs, copy_seed(base_seed, m)); });
    return out;
}

std::size_t default_welch_copies(std::size_t empirical_events) { return std::max<std::size_t>(1, empirical_events); }

void write_reference_sample(std::ostream& out, const ReferenceSample& sample, const std::string& label) {
    std::vector<Announcement> events;
    for (const auto& [asset, times] : sample.times)
        for (const auto& t : times) events.push_back({asset, t, label, "reference"});
    const std::vector<std::string> meta{
        "seed=" + std::to_string(sample.seed),
        "seed_derivation=copy m: splitmix64 fold of (base_seed, m); asset i: splitmix64 fold of (copy seed, i)"};
    write_announcements(out, events, meta);
}

}  // namespace newsjump
