#include "mortkit/cohort.hpp"

#include <cmath>

#include "mortkit/errors.hpp"

namespace mortkit {

void validate_cohort(const Cohort& cohort) {
    if (cohort.subjects.empty()) {
        throw InvalidInput("cohort '" + cohort.label + "' is empty");
    }
    const std::size_t p = cohort.subjects.front().covariates.size();
    for (const Subject& s : cohort.subjects) {
        if (!std::isfinite(s.observed_time)) {
            throw InvalidInput("non-finite observed_time for subject '" + s.id + "'");
        }
        if (s.observed_time < 0.0) {
            throw InvalidInput("negative observed_time for subject '" + s.id + "'");
        }
        if (s.covariates.size() != p) {
            throw InvalidInput("covariate length mismatch for subject '" + s.id + "'");
        }
    }
}

std::size_t count_events(const Cohort& cohort) {
    std::size_t n = 0;
    for (const Subject& s : cohort.subjects) {
        if (s.event) ++n;
    }
    return n;
}

} // namespace mortkit
