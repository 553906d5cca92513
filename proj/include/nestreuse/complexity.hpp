#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/reuse_engine.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nestreuse {

/// E[n_i] = N (1 - v_i / v_{i+1}) for i < m and N for the largest set.
std::vector<double> expected_fresh(const NestedChain& chain, std::size_t sample_size);

/// Same, from linear-scale volumes (non-decreasing, positive).
std::vector<double> expected_fresh(std::span<const double> volumes, std::size_t sample_size);

/// E[n] / N = m - sum_{i<m} v_i / v_{i+1}.
double normalized_expected_cost(std::span<const double> volumes);

/// (1 + ln(v_max / v_min)) N.
double theorem_bound(double v_min, double v_max, std::size_t sample_size);

/// (1 + d ln(r_max / r_min)) N for scaled-shape chains with vol(B_r) = r^d vol(B_1).
double corollary_bound(std::size_t dimension, double r_min, double r_max, std::size_t sample_size);

/// 1/x + ln x; exceeds 1 for every x > 1.
double reciprocal_plus_log(double x);

enum class ZStatus {
    finite,         // z computed from a positive standard error
    exact_match,    // zero spread and mean equals the oracle
    exact_mismatch, // zero spread and mean differs from the oracle
    no_data,        // every trial was truncated
};

struct CostLine {
    double expected = 0.0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    double z = 0.0;
    ZStatus status = ZStatus::no_data;
};

/// Expected per-set costs plus the bounds they are checked against.
struct CostOracle {
    std::vector<double> expected_fresh;
    double theorem_bound = 0.0;
    std::optional<double> corollary_bound;
};

CostOracle make_cost_oracle(const NestedChain& chain, std::size_t sample_size,
                            std::optional<std::span<const double>> radii = std::nullopt);

struct CostReport {
    std::size_t sample_size = 0;
    std::size_t trials = 0;
    std::size_t truncated_trials = 0;
    std::vector<CostLine> per_set;
    CostLine total;
    double theorem_bound = 0.0;
    std::optional<double> corollary_bound;
    /// 5%, 50%, 95% empirical quantiles of the total fresh count over all trials.
    double total_q05 = 0.0;
    double total_q50 = 0.0;
    double total_q95 = 0.0;
};

/// Means, standard errors and z-scores of per-set and total fresh counts against
/// the oracle. Means use truncation-free trials only; truncated trials are counted.
/// Throws InvalidArgument for fewer than two ledgers or mixed configurations.
CostReport trial_statistics(std::span<const ReuseLedger> ledgers, const CostOracle& oracle);

}  // namespace nestreuse
