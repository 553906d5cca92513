#include "nestreuse/stats.hpp"

#include "nestreuse/error.hpp"

#include <algorithm>
#include <cmath>

namespace nestreuse {

Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        mean += (values[i] - mean) / static_cast<double>(i + 1);
    }
    s.mean = mean;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - mean) * (v - mean);
        }
        s.variance = ss / static_cast<double>(values.size() - 1);
        s.stderr_mean = std::sqrt(s.variance / static_cast<double>(values.size()));
    }
    return s;
}

double quantile(std::vector<double> values, double probability) {
    if (values.empty()) {
        throw InvalidArgument("quantile of an empty sample");
    }
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw InvalidArgument("quantile probability must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double h = probability * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double kolmogorov_pvalue(double statistic, std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("KS test needs at least one value");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const double lambda = (root_n + 0.12 + 0.11 / root_n) * statistic;
    if (lambda < 1e-3) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_uniform(std::vector<double> values) {
    if (values.empty()) {
        throw InvalidArgument("KS test needs at least one value");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = std::clamp(values[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_pvalue(d, values.size())};
}

}  // namespace nestreuse
