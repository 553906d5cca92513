#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nestreuse {

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance; 0 for fewer than two values
    double stderr_mean = 0.0;
};

Summary summarize(std::span<const double> values);

/// Type-7 (linear interpolation) empirical quantile. `values` need not be sorted.
double quantile(std::vector<double> values, double probability);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;

    bool passes(double alpha) const noexcept { return p_value > alpha; }
};

/// One-sample Kolmogorov-Smirnov test of `values` against U(0, 1).
KsResult ks_uniform(std::vector<double> values);

/// Asymptotic Kolmogorov survival function with Stephens' small-sample correction.
double kolmogorov_pvalue(double statistic, std::size_t n);

}  // namespace nestreuse
