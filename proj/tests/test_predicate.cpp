#include <catch2/catch_amalgamated.hpp>

#include "nestreuse/error.hpp"
#include "nestreuse/predicate.hpp"
#include "nestreuse/robustness.hpp"
#include "nestreuse/sampling.hpp"

#include <Eigen/Dense>

#include <random>

using namespace nestreuse;
using Catch::Approx;

namespace {

// Largest real part among the roots of s^3 + a2 s^2 + a1 s + a0 (companion matrix).
double max_root_real_part(double a2, double a1, double a0) {
    Eigen::Matrix3d companion;
    companion << -a2, -a1, -a0, 1, 0, 0, 0, 1, 0;
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
    return solver.eigenvalues().real().maxCoeff();
}

}  // namespace

TEST_CASE("cubic Routh-Hurwitz predicate", "[predicate]") {
    const auto p = Predicate::hurwitz_cubic({0, 0, 0}, {}, 3);
    CHECK(p.evaluate(Point{2, 2, 1}));
    CHECK_FALSE(p.evaluate(Point{1, 1, 2}));
    // marginal stability is instability
    CHECK_FALSE(p.evaluate(Point{1, 1, 1}));
    CHECK_FALSE(is_hurwitz_cubic(2, 2, 0));
}

TEST_CASE("cubic predicate perturbs the nominal coefficients linearly", "[predicate]") {
    // a = (3, 3, 1) + [1 0; 0 1; 0 0] q
    const auto p = Predicate::hurwitz_cubic({3, 3, 1}, {1, 0, 0, 1, 0, 0}, 2);
    const auto a = p.cubic_coefficients(Point{-1.0, 0.5});
    CHECK(a[0] == 2.0);
    CHECK(a[1] == 3.5);
    CHECK(a[2] == 1.0);
    CHECK(p.evaluate(Point{0, 0}));
    CHECK_FALSE(p.evaluate(Point{-3.5, 0}));
    CHECK_THROWS_AS(p.evaluate(Point{0, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(Predicate::hurwitz_cubic({1, 1, 1}, {}, 2), InvalidArgument);
}

TEST_CASE("Routh test agrees with a root-finding oracle", "[predicate][property]") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    int compared = 0;
    for (int n = 0; n < 10000; ++n) {
        const double a2 = coef(gen), a1 = coef(gen), a0 = coef(gen);
        const double re = max_root_real_part(a2, a1, a0);
        if (std::abs(re) < 1e-9) {
            continue;  // numerically on the boundary
        }
        ++compared;
        INFO("a = " << a2 << ", " << a1 << ", " << a0);
        REQUIRE(is_hurwitz_cubic(a2, a1, a0) == (re < 0.0));
    }
    CHECK(compared > 9990);
}

TEST_CASE("inner ball and halfspace predicates", "[predicate]") {
    CHECK(Predicate::inner_ball(1.0).evaluate(Point{0.6, 0.8}));
    CHECK_FALSE(Predicate::inner_ball(1.0).evaluate(Point{0.6, 0.81}));
    const auto h = Predicate::halfspace({1, 1}, 0.0);
    CHECK(h.evaluate(Point{-1, 1}));
    CHECK_FALSE(h.evaluate(Point{0.1, 0}));
    CHECK_THROWS_AS(h.evaluate(Point{0, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(Predicate::halfspace({0, 0}, 1.0), InvalidArgument);
    CHECK(Predicate::constant(false).evaluate(Point{3.0}) == false);
}

TEST_CASE("user hook", "[predicate]") {
    const auto p = Predicate::user("positive-first", [](std::span<const double> q) { return q[0] > 0; }, 2);
    CHECK(p.name() == "positive-first");
    CHECK(p.evaluate(Point{1, 0}));
    CHECK_THROWS_AS(p.evaluate(Point{1}), InvalidArgument);
}

TEST_CASE("analytic truth values", "[predicate]") {
    CHECK(*analytic_truth(Predicate::inner_ball(1.0), UncertaintySet::ball({0, 0, 0}, 2.0)) == Approx(0.125));
    CHECK(*analytic_truth(Predicate::inner_ball(3.0), UncertaintySet::ball({0, 0, 0}, 2.0)) == 1.0);
    CHECK(*analytic_truth(Predicate::inner_ball(1.5), UncertaintySet::donut({0, 0}, 1.0, 2.0)) ==
          Approx(1.25 / 3.0));
    CHECK(*analytic_truth(Predicate::halfspace({1, 2}, 0.0), UncertaintySet::ball({0, 0}, 1.0)) == 0.5);
    CHECK(*analytic_truth(Predicate::halfspace({1, 2}, 3.0), UncertaintySet::box({1, 1}, {1, 2})) == 0.5);
    CHECK_FALSE(analytic_truth(Predicate::inner_ball(1.0), UncertaintySet::ball({0.5, 0}, 2.0)));
    CHECK_FALSE(analytic_truth(Predicate::halfspace({1, 0}, 0.3), UncertaintySet::ball({0, 0}, 1.0)));
    CHECK_FALSE(analytic_truth(Predicate::hurwitz_cubic({1, 1, 1}, {}, 3), UncertaintySet::ball({0, 0, 0}, 1.0)));
}

TEST_CASE("Monte Carlo estimates cover the analytic truth", "[predicate][property]") {
    struct Pair {
        Predicate predicate;
        UncertaintySet set;
    };
    const std::vector<Pair> pairs = {
        {Predicate::inner_ball(1.0), UncertaintySet::ball({0, 0, 0}, 1.3)},
        {Predicate::inner_ball(1.5), UncertaintySet::donut({0, 0}, 1.0, 2.0)},
        {Predicate::halfspace({1, -1, 0.5}, 0.0), UncertaintySet::ball({0, 0, 0}, 1.0)},
        {Predicate::halfspace({0.3, 1}, 0.0), UncertaintySet::box({0, 0}, {2, 0.5})},
    };
    const std::size_t n = 10000;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& [predicate, set] = pairs[pi];
        const double truth = *analytic_truth(predicate, set);
        int covered = 0;
        for (std::uint64_t trial = 0; trial < 100; ++trial) {
            auto rng = make_stream(500 + pi, trial, StreamPurpose::test);
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i) {
                k += predicate.evaluate(sample_uniform(set, rng));
            }
            covered += binomial_ci(k, n, 0.99).contains(truth);
        }
        INFO(set.describe());
        CHECK(covered >= 95);
    }
}
