#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/random.hpp"

#include <cstddef>
#include <vector>

namespace nestreuse {

struct NestingViolation {
    Point point;
    std::size_t source;   // 0-based index of the set the point was drawn from
    std::size_t failing;  // 0-based index of a larger set that does not contain it
};

struct AuditReport {
    std::size_t samples_per_set = 0;
    std::size_t points_checked = 0;
    std::vector<NestingViolation> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// Draws `samples_per_set` uniform points from every B_i and checks each against
/// every B_k with k > i.
AuditReport audit_nestedness(const NestedChain& chain, std::size_t samples_per_set, RandomStream& rng);

}  // namespace nestreuse
