#include "nestreuse/audit.hpp"

#include "nestreuse/error.hpp"
#include "nestreuse/sampling.hpp"

namespace nestreuse {

AuditReport audit_nestedness(const NestedChain& chain, std::size_t samples_per_set, RandomStream& rng) {
    if (samples_per_set == 0) {
        throw InvalidArgument("audit needs at least one sample per set");
    }
    AuditReport report;
    report.samples_per_set = samples_per_set;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t draw = 0; draw < samples_per_set; ++draw) {
            Point q = sample_uniform(chain[i], rng);
            ++report.points_checked;
            for (std::size_t k = i + 1; k < chain.size(); ++k) {
                if (!chain[k].contains(q)) {
                    report.violations.push_back({q, i, k});
                }
            }
        }
    }
    return report;
}

}  // namespace nestreuse
