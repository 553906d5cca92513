#include "nestreuse/reuse_engine.hpp"

#include "nestreuse/error.hpp"
#include "nestreuse/sampling.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace nestreuse {

namespace {

bool evaluate_checked(const Predicate& predicate, const Point& point) {
    try {
        return predicate.evaluate(point);
    } catch (const std::exception& e) {
        throw PredicateError(point, fmt::format("predicate '{}' failed: {}", predicate.name(), e.what()));
    }
}

void check_inputs(const NestedChain& chain, std::size_t sample_size, const Predicate& predicate) {
    if (sample_size == 0) {
        throw InvalidArgument("sample size N must be at least 1");
    }
    if (auto d = predicate.dimension(); d && *d != chain.dimension()) {
        throw InvalidArgument(
            fmt::format("predicate dimension {} does not match chain dimension {}", *d, chain.dimension()));
    }
}

ReuseResult empty_result(std::size_t m, std::size_t sample_size) {
    ReuseResult result;
    result.delivered.assign(m, {});
    result.ledger.sample_size = sample_size;
    result.ledger.fresh.assign(m, 0);
    result.ledger.reused.assign(m, 0);
    result.ledger.surplus.assign(m, 0);
    return result;
}

}  // namespace

std::size_t ReuseLedger::total_fresh() const noexcept {
    return std::accumulate(fresh.begin(), fresh.end(), std::size_t{0});
}

bool ReuseLedger::truncated() const noexcept {
    return std::any_of(surplus.begin(), surplus.end(), [](std::size_t s) { return s > 0; });
}

std::size_t ReuseResult::successes(std::size_t i) const {
    const auto& ids = delivered.at(i);
    return static_cast<std::size_t>(
        std::count_if(ids.begin(), ids.end(), [&](std::size_t id) { return records[id].outcome; }));
}

ReuseResult run_reuse(const NestedChain& chain, std::size_t sample_size, const Predicate& predicate,
                      RandomStream& rng) {
    check_inputs(chain, sample_size, predicate);
    const std::size_t m = chain.size();
    ReuseResult result = empty_result(m, sample_size);
    auto& ledger = result.ledger;

    for (std::size_t level = m; level-- > 0;) {
        auto& delivered = result.delivered[level];
        delivered.reserve(sample_size);

        std::size_t pool = 0;
        for (const auto& rec : result.records) {
            if (rec.origin > level && rec.member_of(level)) {
                if (delivered.size() < sample_size) {
                    delivered.push_back(rec.arrival);
                }
                ++pool;
            }
        }
        ledger.reused[level] = delivered.size();
        ledger.surplus[level] = pool > sample_size ? pool - sample_size : 0;

        const std::size_t shortfall = sample_size - delivered.size();
        ledger.fresh[level] = shortfall;
        for (std::size_t draw = 0; draw < shortfall; ++draw) {
            SampleRecord rec;
            rec.point = sample_uniform(chain[level], rng);
            rec.origin = level;
            rec.outcome = evaluate_checked(predicate, rec.point);
            rec.arrival = result.records.size();
            rec.membership.assign(level + 1, false);
            rec.membership[level] = true;
            for (std::size_t k = level; k-- > 0;) {
                rec.membership[k] = chain[k].contains(rec.point);
            }
            delivered.push_back(rec.arrival);
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

ReuseResult run_naive(const NestedChain& chain, std::size_t sample_size, const Predicate& predicate,
                      RandomStream& rng) {
    check_inputs(chain, sample_size, predicate);
    const std::size_t m = chain.size();
    ReuseResult result = empty_result(m, sample_size);
    result.records.reserve(m * sample_size);

    for (std::size_t level = m; level-- > 0;) {
        result.ledger.fresh[level] = sample_size;
        auto& delivered = result.delivered[level];
        delivered.reserve(sample_size);
        for (std::size_t draw = 0; draw < sample_size; ++draw) {
            SampleRecord rec;
            rec.point = sample_uniform(chain[level], rng);
            rec.origin = level;
            rec.outcome = evaluate_checked(predicate, rec.point);
            rec.arrival = result.records.size();
            rec.membership.assign(level + 1, false);
            rec.membership[level] = true;
            delivered.push_back(rec.arrival);
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

}  // namespace nestreuse
