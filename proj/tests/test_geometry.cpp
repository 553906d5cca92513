#include <catch2/catch_amalgamated.hpp>

#include "nestreuse/error.hpp"
#include "nestreuse/geometry.hpp"
#include "nestreuse/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nestreuse;
using Catch::Approx;

TEST_CASE("contains treats sets as closed", "[geometry]") {
    const auto disk = UncertaintySet::ball({0, 0}, 1.0);
    CHECK(disk.contains(Point{0.6, 0.8}));
    CHECK_FALSE(disk.contains(Point{1.0, 1.0}));

    const auto ring = UncertaintySet::donut({0, 0}, 1.0, 2.0);
    CHECK(ring.contains(Point{1.5, 0.0}));
    CHECK_FALSE(ring.contains(Point{0.5, 0.0}));
    CHECK(ring.contains(Point{1.0, 0.0}));
    CHECK(ring.contains(Point{0.0, -2.0}));
}

TEST_CASE("contains rejects a dimension mismatch", "[geometry]") {
    const auto disk = UncertaintySet::ball({0, 0}, 1.0);
    CHECK_THROWS_AS(disk.contains(Point{0.0, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("volumes are exact", "[geometry]") {
    CHECK(UncertaintySet::ball({0, 0}, 2.0).volume() == Approx(4.0 * std::numbers::pi).epsilon(1e-13));
    CHECK(UncertaintySet::box({0, 0, 0}, {1, 1, 1}).volume() == Approx(8.0).epsilon(1e-13));
    CHECK(UncertaintySet::donut({0, 0}, 1.0, 2.0).volume() == Approx(3.0 * std::numbers::pi).epsilon(1e-13));
    CHECK(UncertaintySet::ball({0, 0, 0}, 1.0).volume() == Approx(4.0 / 3.0 * std::numbers::pi).epsilon(1e-13));
    // cross-polytope: 2^d / d!
    CHECK(UncertaintySet::ball({0, 0, 0}, 1.0, Norm::l1).volume() == Approx(8.0 / 6.0).epsilon(1e-13));
    CHECK(UncertaintySet::ball({0, 0, 0}, 0.5, Norm::linf).volume() == Approx(1.0).epsilon(1e-13));
    const auto u = UncertaintySet::box_union({{{-3, 0}, {1, 1}}, {{3, 0}, {0.5, 2}}});
    CHECK(u.volume() == Approx(4.0 + 4.0).epsilon(1e-13));
}

TEST_CASE("donut plus hole equals the outer ball", "[geometry]") {
    for (std::size_t d : {1u, 2u, 5u, 12u}) {
        for (const double r0 : {0.1, 0.9, 1.7}) {
            const Point c(d, 0.0);
            const double outer = UncertaintySet::ball(c, 2.0).volume();
            const double sum = UncertaintySet::donut(c, r0, 2.0).volume() + UncertaintySet::ball(c, r0).volume();
            CHECK(std::abs(sum - outer) <= 1e-12 * outer);
        }
    }
}

TEST_CASE("large dimensions do not overflow log volumes", "[geometry]") {
    const auto big = UncertaintySet::ball(Point(400, 0.0), 50.0);
    CHECK(std::isfinite(big.log_volume()));
}

TEST_CASE("invalid sets are rejected", "[geometry]") {
    CHECK_THROWS_AS(UncertaintySet::ball({0, 0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(UncertaintySet::donut({0, 0}, 2.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(UncertaintySet::donut({0, 0}, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(UncertaintySet::box({0, 0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(UncertaintySet::box_union({{{0, 0}, {1, 1}}, {{1, 0}, {1, 1}}}), InvalidArgument);
    // touching faces share no interior
    CHECK_NOTHROW(UncertaintySet::box_union({{{0, 0}, {1, 1}}, {{2, 0}, {1, 1}}}));
}

TEST_CASE("geometric ball chain has constant volume ratio", "[geometry][chain]") {
    std::vector<UncertaintySet> sets;
    for (int i = 0; i < 50; ++i) {
        sets.push_back(UncertaintySet::ball(Point(5, 0.0), std::pow(2.0, i / 49.0)));
    }
    const auto chain = NestedChain::build(std::move(sets));
    CHECK_FALSE(chain.needs_audit());
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        CHECK(chain.volume_ratio(i) == Approx(std::pow(2.0, -5.0 / 49.0)).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const double r = std::get<BallShape>(chain[i].shape()).radius;
        CHECK(chain.volume(i) == Approx(std::pow(r, 5) * chain.v_min()).epsilon(1e-12));
    }
}

TEST_CASE("single set chain", "[geometry][chain]") {
    const auto chain = NestedChain::build({UncertaintySet::ball({0, 0}, 1.0)});
    CHECK(chain.size() == 1);
    CHECK(chain.v_min() == chain.v_max());
}

TEST_CASE("donut chain volumes", "[geometry][chain]") {
    const auto chain =
        NestedChain::build({UncertaintySet::donut({0, 0}, 1.0, 1.5), UncertaintySet::donut({0, 0}, 1.0, 2.0)});
    CHECK(chain.volume(0) == Approx(1.25 * std::numbers::pi).epsilon(1e-13));
    CHECK(chain.volume(1) == Approx(3.0 * std::numbers::pi).epsilon(1e-13));
    CHECK_FALSE(chain.needs_audit());
}

TEST_CASE("chain construction rejects bad chains", "[geometry][chain]") {
    SECTION("decreasing volumes") {
        try {
            NestedChain::build({UncertaintySet::ball({0, 0}, 2.0), UncertaintySet::ball({0, 0}, 1.0)});
            FAIL("expected NestingError");
        } catch (const NestingError& e) {
            CHECK(e.inner_index() == 0);
            CHECK(e.outer_index() == 1);
        }
    }
    SECTION("provably disjoint boxes") {
        try {
            NestedChain::build({UncertaintySet::box({0, 0}, {1, 1}), UncertaintySet::box({0, 0}, {2, 2}),
                                UncertaintySet::box({10, 0}, {2, 2})});
            FAIL("expected NestingError");
        } catch (const NestingError& e) {
            CHECK(e.inner_index() == 1);
            CHECK(e.outer_index() == 2);
        }
    }
    SECTION("donuts with different holes") {
        CHECK_THROWS_AS(
            NestedChain::build({UncertaintySet::donut({0, 0}, 0.5, 1.5), UncertaintySet::donut({0, 0}, 1.0, 2.0)}),
            NestingError);
    }
    SECTION("a ball inside a concentric donut") {
        CHECK_THROWS_AS(NestedChain::build({UncertaintySet::ball({0, 0}, 0.5), UncertaintySet::donut({0, 0}, 0.1, 2.0)}),
                        NestingError);
    }
    SECTION("mixed dimensions and empty chains") {
        CHECK_THROWS_AS(NestedChain::build({UncertaintySet::ball({0, 0}, 1.0), UncertaintySet::ball({0, 0, 0}, 2.0)}),
                        InvalidArgument);
        CHECK_THROWS_AS(NestedChain::build({}), InvalidArgument);
    }
}

TEST_CASE("analytic nesting decisions", "[geometry][chain]") {
    const auto small_ball = UncertaintySet::ball({0, 0}, 1.0);
    CHECK(analytic_containment(small_ball, UncertaintySet::ball({0.5, 0}, 1.5)) == Containment::proven);
    CHECK(analytic_containment(small_ball, UncertaintySet::ball({0.6, 0}, 1.5)) == Containment::refuted);
    CHECK(analytic_containment(UncertaintySet::ball({0, 0}, 1.0, Norm::linf), UncertaintySet::box({0, 0}, {1, 2})) ==
          Containment::proven);
    CHECK(analytic_containment(UncertaintySet::donut({0, 0}, 1.0, 1.5), UncertaintySet::ball({0, 0}, 2.0)) ==
          Containment::proven);
    // l2 ball inside a box: left to the audit
    CHECK(analytic_containment(small_ball, UncertaintySet::box({0, 0}, {2, 2})) == Containment::undecided);

    const auto chain = NestedChain::build({small_ball, UncertaintySet::box({0, 0}, {2, 2})});
    CHECK(chain.needs_audit());
    const auto deferred = NestedChain::build({UncertaintySet::box({0, 0}, {1, 1}), UncertaintySet::box({5, 0}, {1, 1})},
                                             NestingCheck::deferred);
    CHECK(deferred.needs_audit());
}

TEST_CASE("membership is consistent with nesting", "[geometry][property]") {
    std::vector<std::vector<UncertaintySet>> chains;
    {
        std::vector<UncertaintySet> s;
        for (double r : {0.5, 0.8, 1.0, 1.4, 2.0}) s.push_back(UncertaintySet::ball({0.2, -0.1, 0.3}, r, Norm::l1));
        chains.push_back(s);
    }
    {
        std::vector<UncertaintySet> s;
        for (double r : {1.2, 1.5, 2.5}) s.push_back(UncertaintySet::donut({0, 0, 0}, 1.0, r));
        chains.push_back(s);
    }
    {
        std::vector<UncertaintySet> s;
        for (double f : {0.5, 1.0, 1.9}) {
            s.push_back(UncertaintySet::box_union({{{-3, 0, 0}, {f, f, f}}, {{3, 0, 0}, {f, 0.5 * f, f}}}));
        }
        chains.push_back(s);
    }
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (const auto& sets : chains) {
        const auto chain = NestedChain::build(sets);
        REQUIRE_FALSE(chain.needs_audit());
        for (int n = 0; n < 20000; ++n) {
            const Point q{coord(gen), coord(gen), coord(gen)};
            bool inside = false;
            for (std::size_t k = 0; k < chain.size(); ++k) {
                const bool now = chain[k].contains(q);
                REQUIRE((!inside || now));
                inside = now;
            }
        }
    }
}
