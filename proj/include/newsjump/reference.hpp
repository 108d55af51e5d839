#pragma once

#include "newsjump/align.hpp"
#include "newsjump/kde.hpp"
#include "newsjump/rng.hpp"
#include "newsjump/time.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace newsjump {

enum class KdeMode {
    /// Atoms when the events use at most two distinct clock times, KDE otherwise.
    automatic,
    atoms,
    kde,
};

enum class Pooling { per_asset, pooled };

/// Distribution of announcement clock times as a fraction of the calendar day.
class IntradayDistribution {
public:
    enum class Kind { atoms, kde };

    static IntradayDistribution from_atoms(std::span<const double> fractions);
    /// Throws DataError when fewer than two distinct fractions are given.
    static IntradayDistribution from_kde(std::span<const double> fractions);

    Kind kind() const { return kind_; }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    /// Only valid for Kind::kde.
    const KdeDensity& density() const { return *kde_; }
    double sample(Rng& rng) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::atoms;
    std::vector<double> atoms_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    std::shared_ptr<const KdeDensity> kde_;
};

IntradayDistribution fit_intraday_distribution(std::span<const Announcement> events, KdeMode mode,
                                               std::vector<std::string>* warnings = nullptr);

/// One distribution per asset; with Pooling::pooled every asset maps to the
/// distribution fitted on all events.
std::map<std::string, IntradayDistribution> fit_intraday_distributions(std::span<const Announcement> events,
                                                                        KdeMode mode, Pooling pooling,
                                                                        std::vector<std::string>* warnings = nullptr);

struct ReferenceInputs {
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::vector<Date>> trading_days;
    std::map<std::string, IntradayDistribution> distributions;
};

/// Simulated announcement times, per asset, sorted.
struct ReferenceSample {
    std::uint64_t seed = 0;
    std::map<std::string, std::vector<Timestamp>> times;

    /// Number of generated times on each of `days`.
    std::vector<std::size_t> day_counts(const std::string& asset, std::span<const Date> days) const;
    std::size_t total() const;
};

/// `count` draws: a uniformly chosen trading day plus an intraday fraction
/// from `dist`. Appends to `out` (unsorted).
void draw_asset_times(std::size_t count, std::span<const Date> days, const IntradayDistribution& dist, Rng& rng,
                      std::vector<Timestamp>& out);

/// Per-asset stream seed: child_seed(sample_seed, {asset index in map order}).
std::uint64_t asset_seed(std::uint64_t sample_seed, std::size_t asset_index);
/// Seed of ensemble copy m: child_seed(base_seed, {m}).
std::uint64_t copy_seed(std::uint64_t base_seed, std::size_t copy);

ReferenceSample generate_reference_sample(const ReferenceInputs& inputs, std::uint64_t seed);

std::vector<ReferenceSample> generate_reference_ensemble(const ReferenceInputs& inputs, std::size_t copies,
                                                         std::uint64_t base_seed, std::size_t workers = 0);

/// Ensemble sizes: one copy per empirical event for rank tests, 10,000 for
/// bootstrap.
std::size_t default_welch_copies(std::size_t empirical_events);
inline constexpr std::size_t kDefaultBootstrapCopies = 10'000;

/// Serialises a sample in the announcement CSV schema with seed metadata.
void write_reference_sample(std::ostream& out, const ReferenceSample& sample, const std::string& label);

}  // namespace newsjump
