#include "newsjump/kde.hpp"

#include "newsjump/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace newsjump {

namespace {

// fftw planning is not thread-safe; execution is. Unaligned plans give
// results independent of buffer addresses.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> run_r2r(std::span<const double> input, fftw_r2r_kind kind) {
    std::vector<double> in(input.begin(), input.end());
    std::vector<double> out(input.size());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_r2r_1d(static_cast<int>(in.size()), in.data(), out.data(), kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> unit_histogram(std::span<const double> samples) {
    const std::size_t n = kKdeGridSize;
    std::vector<double> hist(n, 0.0);
    for (double x : samples) {
        if (!(x >= 0.0 && x <= 1.0)) throw ContractError("kde samples must lie in [0, 1]");
        auto bin = static_cast<std::size_t>(std::floor(x * static_cast<double>(n - 1)));
        hist[std::min(bin, n - 1)] += 1.0;
    }
    for (double& h : hist) h /= static_cast<double>(samples.size());
    return hist;
}

std::size_t distinct_count(std::span<const double> samples) {
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

// Plug-in fixed-point function t - xi * gamma^[7](t).
class FixedPoint {
public:
    FixedPoint(std::span<const double> coeffs, double distinct) : n_(distinct) {
        for (std::size_t k = 1; k < coeffs.size(); ++k) {
            const double h = coeffs[k] / 2.0;
            const double sq = h * h;
            if (sq == 0.0) continue;
            const double i2 = static_cast<double>(k) * static_cast<double>(k);
            index_sq_.push_back(i2);
            double w = sq;
            for (int p = 0; p <= 7; ++p) {
                weighted_[p].push_back(w);
                w *= i2;
            }
        }
    }

    double operator()(double t) const {
        constexpr int l = 7;
        double f = functional(l, t);
        for (int s = l - 1; s >= 2; --s) {
            double odd_product = 1.0;
            for (int j = 1; j <= 2 * s - 1; j += 2) odd_product *= j;
            const double k0 = odd_product / std::sqrt(2.0 * std::numbers::pi);
            const double c = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
            const double time = std::pow(2.0 * c * k0 / n_ / f, 2.0 / (3.0 + 2.0 * s));
            f = functional(s, time);
        }
        return t - std::pow(2.0 * n_ * std::sqrt(std::numbers::pi) * f, -0.4);
    }

private:
    double functional(int s, double t) const {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        const auto& w = weighted_[s];
        for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::exp(-index_sq_[i] * pi2 * t);
        return 2.0 * std::pow(std::numbers::pi, 2 * s) * sum;
    }

    double n_;
    std::vector<double> index_sq_;
    // weighted_[s][i] = (k^2)^s * (a_k / 2)^2
    std::array<std::vector<double>, 8> weighted_;
};

std::vector<double> smoothed_grid(std::span<const double> coeffs, double t) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    std::vector<double> at(coeffs.begin(), coeffs.end());
    for (std::size_t k = 0; k < at.size(); ++k) at[k] *= std::exp(-static_cast<double>(k * k) * pi2 * t / 2.0);
    return detail::dct3(at);
}

}  // namespace

namespace detail {

std::vector<double> dct2(std::span<const double> x) {
    auto y = run_r2r(x, FFTW_REDFT10);
    if (!y.empty()) y[0] /= 2.0;
    return y;
}

std::vector<double> dct3(std::span<const double> a) {
    std::vector<double> x(a.begin(), a.end());
    for (std::size_t k = 1; k < x.size(); ++k) x[k] /= 2.0;
    return run_r2r(x, FFTW_REDFT01);
}

}  // namespace detail

double silverman_bandwidth(std::span<const double> samples) {
    const auto n = samples.size();
    if (n < 2) throw DataError("silverman bandwidth needs at least two samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(n - 1));
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, n - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (spread <= 0.0) spread = sd;
    if (spread <= 0.0) throw DataError("silverman bandwidth undefined for identical samples");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

BandwidthResult kde_bandwidth(std::span<const double> samples) {
    const auto distinct = distinct_count(samples);
    if (distinct < 2) throw DataError("kde bandwidth: fewer than two distinct samples; use empirical atoms");
    const auto coeffs = detail::dct2(unit_histogram(samples));
    const FixedPoint f(coeffs, static_cast<double>(distinct));

    BandwidthResult result;
    auto fallback = [&](const std::string& why) {
        result.bandwidth = silverman_bandwidth(samples);
        result.t_star = result.bandwidth * result.bandwidth;
        result.converged = false;
        result.warning = why + "; Silverman's rule used";
        return result;
    };

    const double nc = std::clamp(static_cast<double>(distinct), 50.0, 1050.0);
    double hi = 1e-12 + 0.01 * (nc - 50.0) / 1000.0;
    double lo = 0.0;
    const double f_lo = f(lo);
    if (!(f_lo < 0.0)) return fallback("fixed-point function not negative at t = 0");
    double f_hi = f(hi);
    while (!(f_hi > 0.0)) {
        if (std::isnan(f_hi) || hi >= 0.1) return fallback("no root of the fixed-point equation in (0, 0.1]");
        lo = hi;
        hi = std::min(2.0 * hi, 0.1);
        f_hi = f(hi);
    }
    for (int it = 1; it <= 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (std::isnan(f_mid)) return fallback("fixed-point function undefined");
        (f_mid < 0.0 ? lo : hi) = mid;
        result.iterations = it;
        if (hi - lo <= 1e-15 + 1e-12 * hi) {
            result.t_star = 0.5 * (lo + hi);
            result.bandwidth = std::sqrt(result.t_star);
            result.converged = true;
            return result;
        }
    }
    return fallback("fixed-point iteration did not converge in 100 iterations");
}

KdeDensity KdeDensity::fit(std::span<const double> samples) {
    KdeDensity d;
    d.selection_ = kde_bandwidth(samples);
    d.values_ = smoothed_grid(detail::dct2(unit_histogram(samples)), d.selection_.t_star);
    d.finish();
    return d;
}

KdeDensity KdeDensity::with_bandwidth(std::span<const double> samples, double bandwidth) {
    if (samples.empty()) throw ContractError("kde needs at least one sample");
    if (!(bandwidth > 0.0)) throw ContractError("kde bandwidth must be positive");
    KdeDensity d;
    d.selection_.bandwidth = bandwidth;
    d.selection_.t_star = bandwidth * bandwidth;
    d.selection_.converged = true;
    d.values_ = smoothed_grid(detail::dct2(unit_histogram(samples)), d.selection_.t_star);
    d.finish();
    return d;
}

void KdeDensity::finish() {
    for (double& v : values_) v = std::max(v, 0.0);
    const std::size_t n = values_.size();
    const double dx = 1.0 / static_cast<double>(n - 1);
    cdf_.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) cdf_[j] = cdf_[j - 1] + 0.5 * dx * (values_[j - 1] + values_[j]);
    const double mass = cdf_.back();
    if (!(mass > 0.0)) throw DataError("kde produced a zero density");
    for (double& v : values_) v /= mass;
    for (double& c : cdf_) c /= mass;
}

double KdeDensity::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) return 0.0;
    const std::size_t n = values_.size();
    const double pos = x * static_cast<double>(n - 1);
    const auto j = std::min(static_cast<std::size_t>(pos), n - 2);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * values_[j] + w * values_[j + 1];
}

double KdeDensity::sample(Rng& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t j = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    j = std::min(j, cdf_.size() - 2);
    const double dx = 1.0 / static_cast<double>(values_.size() - 1);
    const double f0 = values_[j];
    const double f1 = values_[j + 1];
    const double r = std::max(0.0, u - cdf_[j]);
    // Solve f0 s + (f1 - f0) s^2 / (2 dx) = r for s in [0, dx].
    const double a = (f1 - f0) / (2.0 * dx);
    const double disc = std::max(0.0, f0 * f0 + 4.0 * a * r);
    const double denom = f0 + std::sqrt(disc);
    const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return std::clamp((static_cast<double>(j) + std::min(s / dx, 1.0)) * dx, 0.0, 1.0);
}

}  // namespace newsjump
