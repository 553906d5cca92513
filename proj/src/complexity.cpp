#include "nestreuse/complexity.hpp"

#include "nestreuse/error.hpp"
#include "nestreuse/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nestreuse {

namespace {

CostLine compare(std::span<const double> values, double expected) {
    CostLine line;
    line.expected = expected;
    if (values.empty()) {
        line.status = ZStatus::no_data;
        return line;
    }
    const Summary s = summarize(values);
    line.mean = s.mean;
    line.stderr_mean = s.stderr_mean;
    if (s.stderr_mean > 0.0) {
        line.z = (s.mean - expected) / s.stderr_mean;
        line.status = ZStatus::finite;
    } else if (std::abs(s.mean - expected) <= 1e-9 * std::max(1.0, std::abs(expected))) {
        line.status = ZStatus::exact_match;
    } else {
        line.z = s.mean > expected ? HUGE_VAL : -HUGE_VAL;
        line.status = ZStatus::exact_mismatch;
    }
    return line;
}

}  // namespace

std::vector<double> expected_fresh(const NestedChain& chain, std::size_t sample_size) {
    const auto n = static_cast<double>(sample_size);
    std::vector<double> out(chain.size(), n);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        out[i] = n * (1.0 - chain.volume_ratio(i));
    }
    return out;
}

std::vector<double> expected_fresh(std::span<const double> volumes, std::size_t sample_size) {
    if (volumes.empty()) {
        throw InvalidArgument("expected_fresh needs at least one volume");
    }
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        if (!(volumes[i] > 0.0) || !std::isfinite(volumes[i])) {
            throw InvalidArgument("volumes must be positive and finite");
        }
        if (i > 0 && volumes[i] < volumes[i - 1]) {
            throw InvalidArgument("volumes must be non-decreasing");
        }
    }
    const auto n = static_cast<double>(sample_size);
    std::vector<double> out(volumes.size(), n);
    for (std::size_t i = 0; i + 1 < volumes.size(); ++i) {
        out[i] = n * (1.0 - volumes[i] / volumes[i + 1]);
    }
    return out;
}

double normalized_expected_cost(std::span<const double> volumes) {
    const auto per_set = expected_fresh(volumes, 1);
    return std::accumulate(per_set.begin(), per_set.end(), 0.0);
}

double theorem_bound(double v_min, double v_max, std::size_t sample_size) {
    if (!(v_min > 0.0) || !(v_max >= v_min) || !std::isfinite(v_max)) {
        throw InvalidArgument(fmt::format("theorem_bound needs 0 < v_min <= v_max < inf, got {} and {}", v_min, v_max));
    }
    return (1.0 + std::log(v_max / v_min)) * static_cast<double>(sample_size);
}

double corollary_bound(std::size_t dimension, double r_min, double r_max, std::size_t sample_size) {
    if (dimension == 0 || !(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max)) {
        throw InvalidArgument(fmt::format("corollary_bound needs d >= 1 and 0 < r_min <= r_max < inf, got d={}, "
                                          "r_min={}, r_max={}",
                                          dimension, r_min, r_max));
    }
    return (1.0 + static_cast<double>(dimension) * std::log(r_max / r_min)) * static_cast<double>(sample_size);
}

double reciprocal_plus_log(double x) {
    return 1.0 / x + std::log(x);
}

CostOracle make_cost_oracle(const NestedChain& chain, std::size_t sample_size,
                            std::optional<std::span<const double>> radii) {
    CostOracle oracle;
    oracle.expected_fresh = expected_fresh(chain, sample_size);
    // ln(v_max / v_min) from log volumes; exact even when the volumes overflow.
    oracle.theorem_bound =
        (1.0 + chain.log_volume(chain.size() - 1) - chain.log_volume(0)) * static_cast<double>(sample_size);
    if (radii) {
        if (radii->size() != chain.size()) {
            throw InvalidArgument("one radius per set is required");
        }
        oracle.corollary_bound = corollary_bound(chain.dimension(), radii->front(), radii->back(), sample_size);
    }
    return oracle;
}

CostReport trial_statistics(std::span<const ReuseLedger> ledgers, const CostOracle& oracle) {
    if (ledgers.size() < 2) {
        throw InvalidArgument("trial_statistics needs at least two ledgers");
    }
    const std::size_t m = ledgers.front().set_count();
    const std::size_t n = ledgers.front().sample_size;
    for (const auto& l : ledgers) {
        if (l.set_count() != m || l.sample_size != n) {
            throw InvalidArgument("ledgers come from different configurations");
        }
    }
    if (oracle.expected_fresh.size() != m) {
        throw InvalidArgument("oracle and ledgers disagree on the number of sets");
    }

    CostReport report;
    report.sample_size = n;
    report.trials = ledgers.size();
    report.theorem_bound = oracle.theorem_bound;
    report.corollary_bound = oracle.corollary_bound;

    std::vector<std::vector<double>> per_set(m);
    std::vector<double> totals;
    std::vector<double> all_totals;
    for (const auto& l : ledgers) {
        all_totals.push_back(static_cast<double>(l.total_fresh()));
        if (l.truncated()) {
            ++report.truncated_trials;
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) {
            per_set[i].push_back(static_cast<double>(l.fresh[i]));
        }
        totals.push_back(static_cast<double>(l.total_fresh()));
    }

    report.per_set.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        report.per_set.push_back(compare(per_set[i], oracle.expected_fresh[i]));
    }
    report.total = compare(totals, std::accumulate(oracle.expected_fresh.begin(), oracle.expected_fresh.end(), 0.0));
    report.total_q05 = quantile(all_totals, 0.05);
    report.total_q50 = quantile(all_totals, 0.50);
    report.total_q95 = quantile(all_totals, 0.95);
    return report;
}

}  // namespace nestreuse
