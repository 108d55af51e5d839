#include "newsjump/stats.hpp"

#include "newsjump/error.hpp"
#include "newsjump/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace newsjump {

namespace {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 20000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) return h;
    }
    return h;
}

// Stirling series remainder of lgamma, for z >= 10.
double lgamma_correction(double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z;
}

// lgamma(a + b) - lgamma(a) - lgamma(b) without cancellation when one argument is large.
double log_inverse_beta(double a, double b) {
    const double big = std::max(a, b);
    const double small = std::min(a, b);
    if (big < 10.0) return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double ratio = (big - 0.5) * std::log1p(small / big) + small * std::log(big + small) - small +
                         lgamma_correction(big + small) - lgamma_correction(big);
    return ratio - std::lgamma(small);
}

}  // namespace

double incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0 && b > 0.0)) throw ContractError("incomplete_beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = log_inverse_beta(a, b) + a * std::log(x) + b * std::log(y);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ContractError("student_t_cdf: df must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double t2 = t * t;
    // Upper tail P(T > |t|) = I_x(df/2, 1/2) / 2 with x = df / (df + t^2).
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x, y);
    return t < 0.0 ? tail : 1.0 - tail;
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

WelchResult welch_u_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw ContractError("welch_u_test needs at least two values per sample");
    std::vector<double> pooled;
    pooled.reserve(x.size() + y.size());
    pooled.insert(pooled.end(), x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto ranks = midranks(pooled);

    auto moments = [&](std::size_t begin, std::size_t n) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += ranks[begin + i];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (ranks[begin + i] - mean) * (ranks[begin + i] - mean);
        return std::pair{mean, ss / static_cast<double>(n - 1)};
    };
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const auto [mx, vx] = moments(0, x.size());
    const auto [my, vy] = moments(x.size(), y.size());

    WelchResult r;
    r.mean_rank_x = mx;
    r.mean_rank_y = my;
    const double sx = vx / nx;
    const double sy = vy / ny;
    const double se2 = sx + sy;
    if (se2 <= 0.0) {
        if (mx == my) {
            r.degenerate = true;
            return r;
        }
        r.t = mx < my ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        r.df = std::numeric_limits<double>::quiet_NaN();
        r.p_left = mx < my ? 0.0 : 1.0;
        r.p_right = 1.0 - r.p_left;
        return r;
    }
    r.t = (mx - my) / std::sqrt(se2);
    r.df = se2 * se2 / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    r.p_left = student_t_cdf(r.t, r.df);
    r.p_right = student_t_cdf(-r.t, r.df);
    return r;
}

double welch_u_test(std::span<const double> x, std::span<const double> y, Tail tail) {
    const auto r = welch_u_test(x, y);
    return tail == Tail::left ? r.p_left : r.p_right;
}

const char* to_string(Statistic s) { return s == Statistic::median ? "median" : "mean"; }

double median_inplace(std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    return 0.5 * (*std::max_element(v.begin(), mid) + *mid);
}

double compute_statistic(std::span<const double> sample, Statistic s) {
    if (sample.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (s == Statistic::mean) {
        double sum = 0.0;
        for (double v : sample) sum += v;
        return sum / static_cast<double>(sample.size());
    }
    std::vector<double> copy(sample.begin(), sample.end());
    return median_inplace(copy);
}

BootstrapResult tail_pvalues(double empirical, std::span<const double> reference_stats, Statistic statistic) {
    BootstrapResult r;
    r.statistic = statistic;
    r.empirical = empirical;
    std::size_t below = 0, above = 0, used = 0;
    double sum = 0.0;
    for (double s : reference_stats) {
        if (std::isnan(s)) continue;
        ++used;
        sum += s;
        below += s <= empirical;
        above += s >= empirical;
    }
    r.replicates = used;
    if (used == 0) {
        r.p_left = r.p_right = std::numeric_limits<double>::quiet_NaN();
        r.reference = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.reference = sum / static_cast<double>(used);
    r.p_left = static_cast<double>(below) / static_cast<double>(used);
    r.p_right = static_cast<double>(above) / static_cast<double>(used);
    return r;
}

BootstrapResult bootstrap_pvalue(std::span<const double> empirical,
                                 const std::function<std::vector<double>(std::size_t)>& generator, Statistic statistic,
                                 std::size_t replicates, std::size_t workers) {
    if (replicates < 100) throw ContractError("bootstrap needs at least 100 replicates");
    if (empirical.empty()) throw ContractError("bootstrap needs a nonempty empirical sample");
    std::vector<double> stats(replicates, std::numeric_limits<double>::quiet_NaN());
    std::atomic<std::size_t> done{0};
    try {
        parallel_for(replicates, workers, [&](std::size_t b) {
            const auto sample = generator(b);
            stats[b] = compute_statistic(sample, statistic);
            ++done;
        });
    } catch (const std::exception& e) {
        throw Error("bootstrap aborted after " + std::to_string(done.load()) + " of " + std::to_string(replicates) +
                    " replicates: " + e.what());
    }
    auto r = tail_pvalues(compute_statistic(empirical, statistic), stats, statistic);
    r.sample_size = empirical.size();
    return r;
}

}  // namespace newsjump
