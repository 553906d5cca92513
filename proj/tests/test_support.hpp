// Shared helpers for the unit tests. Oracles here are deliberately independent
// of the library code they check.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace test_support {

/// P(X <= k) for X ~ Binomial(n, p), summed in log space.
inline double binomial_cdf(int k, int n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                               j * std::log(p) + (n - j) * std::log1p(-p);
        acc += std::exp(log_pmf);
    }
    return acc;
}

/// Clopper-Pearson bounds by bisection on the binomial tails.
inline std::pair<double, double> clopper_pearson_oracle(int k, int n, double level) {
    const double tail = (1.0 - level) / 2.0;
    auto solve = [](auto f) {  // f decreasing in p; root of f(p) = 0
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    // lower: P(X >= k; p) = tail, increasing in p
    const double lo = k == 0 ? 0.0 : solve([&](double p) { return tail - (1.0 - binomial_cdf(k - 1, n, p)); });
    // upper: P(X <= k; p) = tail, decreasing in p
    const double hi = k == n ? 1.0 : solve([&](double p) { return binomial_cdf(k, n, p) - tail; });
    return {lo, hi};
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nestreuse_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

}  // namespace test_support
