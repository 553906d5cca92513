#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/reuse_engine.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nestreuse {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
/// Throws InvalidArgument unless 0 <= k <= n, n >= 1 and 0 < level < 1.
Interval binomial_ci(std::size_t successes, std::size_t trials, double level);

struct CurvePoint {
    double label = 0.0;  // radius or set index
    std::size_t successes = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    Interval ci;
};

/// Estimated robustness function over a chain, one point per set.
struct RobustnessCurve {
    double level = 0.95;
    std::vector<CurvePoint> points;
};

/// Builds a curve from per-set success counts.
RobustnessCurve curve_from_counts(std::span<const std::size_t> successes, std::size_t trials,
                                  std::span<const double> labels, double level);

/// Builds a curve from per-set outcome lists; every list must have the same
/// length and no missing (nullopt) outcome.
RobustnessCurve estimate_curve(std::span<const std::vector<std::optional<bool>>> outcomes,
                               std::span<const double> labels, double level);

RobustnessCurve estimate_curve(const ReuseResult& result, std::span<const double> labels, double level);

enum class MarginRule {
    point_estimate,  // estimate >= 1 - eps
    lower_bound,     // ci.lo >= 1 - eps (conservative)
};

/// Largest grid radius whose estimate clears 1 - eps; nullopt means no grid
/// radius qualifies (below the grid). Labels must be strictly increasing and
/// eps in [0, 1).
std::optional<double> margin(const RobustnessCurve& curve, double eps,
                             MarginRule rule = MarginRule::point_estimate);

/// Minimum estimate over grid radii <= r. Throws when r is below the first radius.
double curve_infimum(const RobustnessCurve& curve, double r);

struct DonutEstimate {
    double donut_estimate = 0.0;   // estimate on D_i
    double lambda = 0.0;           // vol(D_i) / vol(S_{r_i})
    double reconstructed = 0.0;    // estimate of P(r_i)
};

/// (wp * vol_donut + vol_inner) / vol_outer. Requires vol_outer = vol_donut + vol_inner
/// to 1e-9 relative and wp in [0, 1].
DonutEstimate donut_reconstruct(double donut_estimate, double vol_donut, double vol_inner, double vol_outer);

/// Reconstructs P(r_i) for every set of a chain of donuts sharing one hole, using
/// log volumes so that large dimensions do not overflow.
std::vector<DonutEstimate> reconstruct_donut_curve(const RobustnessCurve& donut_curve, const NestedChain& donuts);

/// Variance of the donut-based estimator over the direct one: wp*lambda / (1 - (1 - wp)*lambda).
double variance_ratio(double wp, double lambda);

/// Var of the direct estimator of P(r): (1 - wp) lambda (1 - (1 - wp) lambda) / N.
double direct_variance(double wp, double lambda, std::size_t n);

/// Var of the donut-reconstructed estimator: (1 - wp) wp lambda^2 / N.
double donut_variance(double wp, double lambda, std::size_t n);

}  // namespace nestreuse
