#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/predicate.hpp"
#include "nestreuse/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nestreuse {

/// One fresh experiment: a point drawn from set `origin` and the requirement's
/// outcome there. Indices are 0-based.
struct SampleRecord {
    Point point;
    std::size_t origin = 0;
    bool outcome = false;
    std::uint64_t arrival = 0;
    /// membership[k] for k in [0, origin]: the point lies in set k. Only filled by
    /// the reuse schedule; naive records carry just their own bit.
    std::vector<bool> membership;

    bool member_of(std::size_t k) const { return k < membership.size() && membership[k]; }
};

/// Experiment accounting for one run.
struct ReuseLedger {
    std::size_t sample_size = 0;       // N
    std::vector<std::size_t> fresh;    // n_i
    std::vector<std::size_t> reused;   // pooled records delivered to set i
    std::vector<std::size_t> surplus;  // pooled records beyond N left unused at set i

    std::size_t set_count() const noexcept { return fresh.size(); }
    std::size_t total_fresh() const noexcept;
    std::size_t naive_cost() const noexcept { return sample_size * set_count(); }
    bool truncated() const noexcept;
};

struct ReuseResult {
    /// Fresh records in arrival order (records[k].arrival == k).
    std::vector<SampleRecord> records;
    /// delivered[i] lists exactly N indices into `records`, all lying in set i.
    std::vector<std::vector<std::size_t>> delivered;
    ReuseLedger ledger;

    /// Number of delivered records of set i whose outcome is true.
    std::size_t successes(std::size_t i) const;
};

/// Sample-reuse schedule. Sets are processed from the largest down. Set i first
/// takes, in arrival order, up to N fresh records from larger sets that fall in
/// it, then draws the shortfall fresh from B_i. Each fresh record is evaluated
/// once and tested against every smaller set at draw time.
///
/// On a nested chain the pool for set i is a subset of the records delivered to
/// set i + 1, so it never exceeds N; `surplus` is only non-zero when nesting fails.
///
/// Throws InvalidArgument for N == 0 and PredicateError if the predicate throws.
ReuseResult run_reuse(const NestedChain& chain, std::size_t sample_size, const Predicate& predicate,
                      RandomStream& rng);

/// Baseline: N independent fresh draws for every set, largest set first.
ReuseResult run_naive(const NestedChain& chain, std::size_t sample_size, const Predicate& predicate,
                      RandomStream& rng);

}  // namespace nestreuse
