#include "nestreuse/robustness.hpp"

#include "nestreuse/error.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace nestreuse {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidArgument(fmt::format("confidence level must lie in (0, 1), got {}", level));
    }
}

void check_labels(const RobustnessCurve& curve) {
    if (curve.points.empty()) {
        throw InvalidArgument("robustness curve is empty");
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (!(curve.points[i - 1].label < curve.points[i].label)) {
            throw InvalidArgument("curve radii must be strictly increasing");
        }
    }
}

bool clears(const CurvePoint& p, double threshold, MarginRule rule) {
    constexpr double kSlack = 1e-12;
    const double value = rule == MarginRule::point_estimate ? p.estimate : p.ci.lo;
    return value >= threshold - kSlack;
}

}  // namespace

Interval binomial_ci(std::size_t successes, std::size_t trials, double level) {
    check_level(level);
    if (trials == 0 || successes > trials) {
        throw InvalidArgument(fmt::format("binomial_ci needs 0 <= k <= n and n >= 1, got k={}, n={}", successes,
                                          trials));
    }
    using boost::math::binomial_distribution;
    const double tail = (1.0 - level) / 2.0;
    const auto n = static_cast<double>(trials);
    const auto k = static_cast<double>(successes);
    Interval ci;
    ci.lo = successes == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(n, k, tail);
    ci.hi = successes == trials ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(n, k, tail);
    return ci;
}

RobustnessCurve curve_from_counts(std::span<const std::size_t> successes, std::size_t trials,
                                  std::span<const double> labels, double level) {
    check_level(level);
    if (successes.size() != labels.size()) {
        throw InvalidArgument("one label per set is required");
    }
    RobustnessCurve curve;
    curve.level = level;
    curve.points.reserve(successes.size());
    for (std::size_t i = 0; i < successes.size(); ++i) {
        CurvePoint p;
        p.label = labels[i];
        p.successes = successes[i];
        p.trials = trials;
        p.ci = binomial_ci(successes[i], trials, level);
        p.estimate = static_cast<double>(successes[i]) / static_cast<double>(trials);
        curve.points.push_back(p);
    }
    return curve;
}

RobustnessCurve estimate_curve(std::span<const std::vector<std::optional<bool>>> outcomes,
                               std::span<const double> labels, double level) {
    if (outcomes.empty()) {
        throw InvalidArgument("no sets to estimate");
    }
    const std::size_t n = outcomes.front().size();
    std::vector<std::size_t> successes;
    successes.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].size() != n) {
            throw InvalidArgument(fmt::format("set {} has {} outcomes, expected {}", i + 1, outcomes[i].size(), n));
        }
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!outcomes[i][j]) {
                throw InvalidArgument(fmt::format("set {} record {} has no outcome", i + 1, j + 1));
            }
            k += *outcomes[i][j] ? 1 : 0;
        }
        successes.push_back(k);
    }
    return curve_from_counts(successes, n, labels, level);
}

RobustnessCurve estimate_curve(const ReuseResult& result, std::span<const double> labels, double level) {
    std::vector<std::size_t> successes;
    successes.reserve(result.delivered.size());
    for (std::size_t i = 0; i < result.delivered.size(); ++i) {
        if (result.delivered[i].size() != result.ledger.sample_size) {
            throw InvalidArgument(fmt::format("set {} received {} records, expected {}", i + 1,
                                              result.delivered[i].size(), result.ledger.sample_size));
        }
        successes.push_back(result.successes(i));
    }
    return curve_from_counts(successes, result.ledger.sample_size, labels, level);
}

std::optional<double> margin(const RobustnessCurve& curve, double eps, MarginRule rule) {
    check_labels(curve);
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw InvalidArgument(fmt::format("risk eps must lie in [0, 1), got {}", eps));
    }
    const double threshold = 1.0 - eps;
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
        if (clears(*it, threshold, rule)) {
            return it->label;
        }
    }
    return std::nullopt;
}

double curve_infimum(const RobustnessCurve& curve, double r) {
    check_labels(curve);
    if (r < curve.points.front().label) {
        throw InvalidArgument(
            fmt::format("radius {} lies below the first grid radius {}", r, curve.points.front().label));
    }
    double low = 1.0;
    for (const auto& p : curve.points) {
        if (p.label > r) {
            break;
        }
        low = std::min(low, p.estimate);
    }
    return low;
}

DonutEstimate donut_reconstruct(double donut_estimate, double vol_donut, double vol_inner, double vol_outer) {
    if (!(donut_estimate >= 0.0 && donut_estimate <= 1.0)) {
        throw InvalidArgument("donut estimate must lie in [0, 1]");
    }
    if (!(vol_donut > 0.0 && vol_inner > 0.0 && vol_outer > 0.0)) {
        throw InvalidArgument("donut volumes must be positive");
    }
    if (std::abs(vol_donut + vol_inner - vol_outer) > 1e-9 * vol_outer) {
        throw InvalidArgument(fmt::format("volume identity violated: {} + {} != {}", vol_donut, vol_inner, vol_outer));
    }
    DonutEstimate out;
    out.donut_estimate = donut_estimate;
    out.lambda = vol_donut / vol_outer;
    out.reconstructed = (donut_estimate * vol_donut + vol_inner) / vol_outer;
    return out;
}

std::vector<DonutEstimate> reconstruct_donut_curve(const RobustnessCurve& donut_curve, const NestedChain& donuts) {
    if (donut_curve.points.size() != donuts.size()) {
        throw InvalidArgument("curve and chain sizes differ");
    }
    std::vector<DonutEstimate> out;
    out.reserve(donuts.size());
    std::optional<double> hole;
    for (std::size_t i = 0; i < donuts.size(); ++i) {
        const auto* shape = std::get_if<DonutShape>(&donuts[i].shape());
        if (!shape) {
            throw InvalidArgument(fmt::format("set {} is not a donut", i + 1));
        }
        if (hole && *hole != shape->inner_radius) {
            throw InvalidArgument("donuts in a chain must share their inner radius");
        }
        hole = shape->inner_radius;
        // 1 - lambda = vol(S_{r0}) / vol(S_{r_i}) = (r0 / r_i)^d
        const double inner_share =
            std::pow(shape->inner_radius / shape->outer_radius, static_cast<double>(donuts.dimension()));
        DonutEstimate e;
        e.donut_estimate = donut_curve.points[i].estimate;
        e.lambda = 1.0 - inner_share;
        e.reconstructed = e.donut_estimate * e.lambda + inner_share;
        out.push_back(e);
    }
    return out;
}

double variance_ratio(double wp, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw InvalidArgument(fmt::format("lambda must lie in (0, 1), got {}", lambda));
    }
    if (!(wp >= 0.0 && wp <= 1.0)) {
        throw InvalidArgument(fmt::format("probability must lie in [0, 1], got {}", wp));
    }
    return wp * lambda / (1.0 - (1.0 - wp) * lambda);
}

double direct_variance(double wp, double lambda, std::size_t n) {
    const double fail = (1.0 - wp) * lambda;
    return fail * (1.0 - fail) / static_cast<double>(n);
}

double donut_variance(double wp, double lambda, std::size_t n) {
    return (1.0 - wp) * wp * lambda * lambda / static_cast<double>(n);
}

}  // namespace nestreuse
