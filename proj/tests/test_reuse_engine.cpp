#include <catch2/catch_amalgamated.hpp>

#include "nestreuse/error.hpp"
#include "nestreuse/reuse_engine.hpp"
#include "nestreuse/sampling.hpp"
#include "nestreuse/stats.hpp"

#include <cmath>
#include <numbers>

using namespace nestreuse;

namespace {

// Disks of area 1, 2 and 4.
NestedChain volume_chain() {
    std::vector<UncertaintySet> sets;
    for (double v : {1.0, 2.0, 4.0}) sets.push_back(UncertaintySet::ball({0, 0}, std::sqrt(v / std::numbers::pi)));
    return NestedChain::build(std::move(sets));
}

NestedChain ball_chain(std::size_t d, std::size_t m, double r_max) {
    std::vector<UncertaintySet> sets;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
        sets.push_back(UncertaintySet::ball(Point(d, 0.0), std::pow(r_max, t)));
    }
    return NestedChain::build(std::move(sets));
}

}  // namespace

TEST_CASE("single set: everything is fresh", "[engine]") {
    const auto chain = NestedChain::build({UncertaintySet::ball({0, 0}, 1.0)});
    auto rng = make_stream(1, 0, StreamPurpose::engine);
    const auto r = run_reuse(chain, 25, Predicate::constant(true), rng);
    CHECK(r.ledger.total_fresh() == 25);
    CHECK(r.ledger.reused[0] == 0);
    CHECK(r.delivered[0].size() == 25);
}

TEST_CASE("identical sets reuse everything", "[engine]") {
    const auto b = UncertaintySet::ball({0, 0, 0}, 1.0);
    const auto chain = NestedChain::build({b, b});
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto rng = make_stream(2, t, StreamPurpose::engine);
        const auto r = run_reuse(chain, 37, Predicate::inner_ball(0.5), rng);
        CHECK(r.ledger.fresh[0] == 0);
        CHECK(r.ledger.fresh[1] == 37);
        CHECK(r.ledger.surplus[0] == 0);
        CHECK(r.delivered[0] == r.delivered[1]);
    }
}

TEST_CASE("mean fresh counts match the closed form", "[engine]") {
    const auto chain = volume_chain();
    const std::size_t trials = 1000;
    std::vector<std::vector<double>> fresh(3);
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto rng = make_stream(3, t, StreamPurpose::engine);
        const auto r = run_reuse(chain, 100, Predicate::constant(true), rng);
        REQUIRE_FALSE(r.ledger.truncated());
        for (std::size_t i = 0; i < 3; ++i) fresh[i].push_back(static_cast<double>(r.ledger.fresh[i]));
    }
    const std::array<double, 3> expected = {50, 50, 100};
    for (std::size_t i = 0; i < 3; ++i) {
        const Summary s = summarize(fresh[i]);
        if (s.stderr_mean == 0.0) {
            CHECK(s.mean == expected[i]);
        } else {
            CHECK(std::abs(s.mean - expected[i]) < 3.0 * s.stderr_mean);
        }
    }
}

TEST_CASE("delivered records, ledger identity and outcome consistency", "[engine][property]") {
    const auto chain = ball_chain(3, 12, 3.0);
    const auto predicate = Predicate::halfspace({1, 0.5, -0.2}, 0.4);
    const std::size_t n = 150;
    for (std::uint64_t t = 0; t < 30; ++t) {
        auto rng = make_stream(4, t, StreamPurpose::engine);
        const auto r = run_reuse(chain, n, predicate, rng);
        const auto& L = r.ledger;
        CHECK(L.fresh.back() == n);
        CHECK(L.total_fresh() == r.records.size());
        for (std::size_t i = 0; i < chain.size(); ++i) {
            REQUIRE(r.delivered[i].size() == n);
            CHECK(L.fresh[i] + L.reused[i] == n);
            CHECK(L.surplus[i] == 0);
            for (const std::size_t id : r.delivered[i]) {
                const auto& rec = r.records[id];
                REQUIRE(chain[i].contains(rec.point));
                REQUIRE(rec.outcome == predicate.evaluate(rec.point));
            }
            // N = n_i + sum over larger sets of fresh records falling in B_i
            if (i + 1 < chain.size()) {
                std::size_t fallen = 0;
                for (const auto& rec : r.records) {
                    fallen += rec.origin > i && chain[i].contains(rec.point);
                }
                CHECK(L.fresh[i] + fallen == n);
            }
        }
        for (const auto& rec : r.records) {
            CHECK(rec.arrival == static_cast<std::uint64_t>(&rec - r.records.data()));
            bool inside = true;
            for (std::size_t k = rec.origin + 1; k-- > 0;) {
                if (!rec.member_of(k)) inside = false;
                // monotone: once outside, outside for every smaller set
                REQUIRE((inside || !rec.member_of(k)));
            }
        }
    }
}

TEST_CASE("reused samples stay uniform", "[engine][property]") {
    const auto chain = ball_chain(4, 8, 2.0);
    int passes = 0, tests = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto rng = make_stream(5, t, StreamPurpose::engine);
        const auto r = run_reuse(chain, 1000, Predicate::constant(true), rng);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            std::vector<double> u;
            for (const std::size_t id : r.delivered[i]) u.push_back(uniformity_coordinate(chain[i], r.records[id].point));
            passes += ks_uniform(u).passes(0.01);
            ++tests;
        }
    }
    CHECK(passes >= tests * 95 / 100);
}

TEST_CASE("non-nested chains truncate and report surplus", "[engine]") {
    // Set 2 is set 1 shifted sideways, so records of set 3 that land in set 1 but
    // miss set 2 are pooled for set 1 on top of set 2's own fresh draws.
    const auto chain = NestedChain::build({UncertaintySet::box({0, 0}, {1, 1}), UncertaintySet::box({0.1, 0}, {1, 1}),
                                           UncertaintySet::box({0, 0}, {1.1, 1})},
                                          NestingCheck::deferred);
    bool saw_surplus = false;
    for (std::uint64_t t = 0; t < 50; ++t) {
        auto rng = make_stream(6, t, StreamPurpose::engine);
        const auto r = run_reuse(chain, 40, Predicate::constant(true), rng);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            REQUIRE(r.delivered[i].size() == 40);
            CHECK(r.ledger.fresh[i] + r.ledger.reused[i] == 40);
            if (r.ledger.surplus[i] > 0) {
                saw_surplus = true;
                CHECK(r.ledger.fresh[i] == 0);
                CHECK(r.ledger.truncated());
            }
        }
    }
    CHECK(saw_surplus);
}

TEST_CASE("naive run costs N per set", "[engine]") {
    const auto chain = volume_chain();
    auto a = make_stream(7, 0, StreamPurpose::naive);
    auto b = make_stream(7, 0, StreamPurpose::naive);
    const auto r1 = run_naive(chain, 100, Predicate::constant(true), a);
    const auto r2 = run_naive(chain, 100, Predicate::constant(true), b);
    CHECK(r1.ledger.total_fresh() == 300);
    CHECK(r1.ledger.naive_cost() == 300);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t k = 0; k < r1.records.size(); ++k) CHECK(r1.records[k].point == r2.records[k].point);
}

TEST_CASE("reuse is deterministic", "[engine]") {
    const auto chain = ball_chain(5, 10, 2.0);
    auto a = make_stream(8, 3, StreamPurpose::engine);
    auto b = make_stream(8, 3, StreamPurpose::engine);
    const auto r1 = run_reuse(chain, 200, Predicate::inner_ball(1.3), a);
    const auto r2 = run_reuse(chain, 200, Predicate::inner_ball(1.3), b);
    CHECK(r1.ledger.fresh == r2.ledger.fresh);
    CHECK(r1.delivered == r2.delivered);
    for (std::size_t k = 0; k < r1.records.size(); ++k) CHECK(r1.records[k].point == r2.records[k].point);
}

TEST_CASE("naive and reuse estimates agree", "[engine]") {
    const auto chain = volume_chain();
    const auto predicate = Predicate::inner_ball(0.7);
    const std::size_t n = 200, trials = 100;
    std::array<std::size_t, 3> k_reuse{}, k_naive{};
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto a = make_stream(9, t, StreamPurpose::engine);
        auto b = make_stream(9, t, StreamPurpose::naive);
        const auto r = run_reuse(chain, n, predicate, a);
        const auto q = run_naive(chain, n, predicate, b);
        for (std::size_t i = 0; i < 3; ++i) {
            k_reuse[i] += r.successes(i);
            k_naive[i] += q.successes(i);
        }
    }
    const double total = static_cast<double>(n * trials);
    for (std::size_t i = 0; i < 3; ++i) {
        const double p1 = k_reuse[i] / total, p2 = k_naive[i] / total;
        const double pooled = (p1 + p2) / 2.0;
        const double se = std::sqrt(pooled * (1 - pooled) * 2.0 / total);
        if (se == 0.0) {
            CHECK(p1 == p2);
        } else {
            CHECK(std::abs(p1 - p2) / se < 2.576);
        }
    }
}

TEST_CASE("engine input errors", "[engine]") {
    const auto chain = volume_chain();
    auto rng = make_stream(1, 0, StreamPurpose::engine);
    CHECK_THROWS_AS(run_reuse(chain, 0, Predicate::constant(true), rng), InvalidArgument);
    CHECK_THROWS_AS(run_naive(chain, 0, Predicate::constant(true), rng), InvalidArgument);
    CHECK_THROWS_AS(run_reuse(chain, 5, Predicate::halfspace({1, 0, 0}, 0), rng), InvalidArgument);

    const auto failing = Predicate::user("explodes", [](std::span<const double> q) -> bool {
        if (q[0] > 0.0) throw std::runtime_error("boom");
        return true;
    });
    try {
        run_reuse(chain, 50, failing, rng);
        FAIL("expected PredicateError");
    } catch (const PredicateError& e) {
        REQUIRE(e.point().size() == 2);
        CHECK(e.point()[0] > 0.0);
    }
}
