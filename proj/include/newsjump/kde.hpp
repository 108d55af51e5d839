#pragma once

#include "newsjump/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace newsjump {

/// Grid size of the cosine-transform density estimator.
inline constexpr std::size_t kKdeGridSize = std::size_t{1} << 14;

struct BandwidthResult {
    double bandwidth = 0.0;
    /// Diffusion time, bandwidth^2 on the unit domain.
    double t_star = 0.0;
    /// False when the plug-in fixed point failed and Silverman's rule was used.
    bool converged = false;
    int iterations = 0;
    std::string warning;
};

/// Diffusion (plug-in fixed point) bandwidth for samples on [0, 1].
///
/// The data are binned on a 2^14-point grid spanning [0, 1]; the fixed point
/// t = xi * gamma^[l](t) with l = 7 is solved by bracketing and bisection
/// (100 iterations at most). When no root is bracketed in (0, 0.1], or the
/// iteration does not converge, Silverman's rule is used with a warning.
/// Throws DataError when fewer than two distinct values are given.
BandwidthResult kde_bandwidth(std::span<const double> samples);

/// Silverman's rule 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Smoothed density on [0, 1] with reflecting boundaries, stored as a
/// piecewise-linear function on the estimation grid and normalised to unit
/// mass.
class KdeDensity {
public:
    static KdeDensity fit(std::span<const double> samples);
    /// Density for a given diffusion time (bandwidth^2) without selection.
    static KdeDensity with_bandwidth(std::span<const double> samples, double bandwidth);

    double operator()(double x) const;
    double sample(Rng& rng) const;
    const BandwidthResult& selection() const { return selection_; }
    double bandwidth() const { return selection_.bandwidth; }
    const std::vector<double>& grid_values() const { return values_; }

private:
    void finish();

    std::vector<double> values_;
    std::vector<double> cdf_;
    BandwidthResult selection_;
};

namespace detail {
/// a_0 = sum x_j, a_k = 2 sum x_j cos(pi k (2j+1) / 2n).
std::vector<double> dct2(std::span<const double> x);
/// y_j = a_0 + sum_{k>=1} a_k cos(pi k (2j+1) / 2n).
std::vector<double> dct3(std::span<const double> a);
}  // namespace detail

}  // namespace newsjump
