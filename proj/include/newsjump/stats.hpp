#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace newsjump {

enum class Tail { left, right };

/// Regularized incomplete beta I_x(a, b); `y` must equal 1 - x and is passed
/// separately so callers can keep precision near x = 1.
double incomplete_beta(double a, double b, double x, double y);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Mid-ranks (1-based) of the values; tied values share the average rank.
std::vector<double> midranks(std::span<const double> values);

struct WelchResult {
    /// P(mean rank of x is this low or lower) under the null.
    double p_left = 0.5;
    double p_right = 0.5;
    double t = 0.0;
    double df = 0.0;
    double mean_rank_x = 0.0;
    double mean_rank_y = 0.0;
    /// All pooled values identical: both p-values are 0.5.
    bool degenerate = false;
};

/// Welch's unequal-variance t-test applied to the mid-ranks of the pooled
/// samples, with Welch-Satterthwaite degrees of freedom. The left tail tests
/// mean rank(x) < mean rank(y). Needs at least two values in each sample.
WelchResult welch_u_test(std::span<const double> x, std::span<const double> y);
double welch_u_test(std::span<const double> x, std::span<const double> y, Tail tail);

/// Rank test of empirical |L| against reference |L~|; same contract as welch_u_test.
inline WelchResult jump_size_test(std::span<const double> empirical, std::span<const double> reference) {
    return welch_u_test(empirical, reference);
}

enum class Statistic { median, mean };

const char* to_string(Statistic s);
double compute_statistic(std::span<const double> sample, Statistic s);
/// Median of the sample (average of the middle pair for even sizes); reorders `sample`.
double median_inplace(std::vector<double>& sample);

struct BootstrapResult {
    Statistic statistic = Statistic::median;
    double empirical = 0.0;
    /// Average of the reference statistics.
    double reference = 0.0;
    double p_left = 0.0;
    double p_right = 0.0;
    std::size_t replicates = 0;
    std::size_t sample_size = 0;
};

/// p_left = #{ref <= emp} / B and p_right = #{ref >= emp} / B; ties count in
/// both tails. NaN reference statistics (empty replicates) are skipped and
/// excluded from B.
BootstrapResult tail_pvalues(double empirical, std::span<const double> reference_stats, Statistic statistic);

/// Draws B reference data sets from `generator(b)` and compares their
/// statistic with the empirical one. B must be at least 100. A generator
/// failure aborts with the count of completed replicates in the message.
BootstrapResult bootstrap_pvalue(std::span<const double> empirical,
                                 const std::function<std::vector<double>(std::size_t)>& generator, Statistic statistic,
                                 std::size_t replicates = 10'000, std::size_t workers = 0);

}  // namespace newsjump
