#pragma once

#include <string>
#include <vector>

namespace mortkit {

// One individual's follow-up record. `event == true` means the death was
// observed at `observed_time`; `event == false` means follow-up was censored
// there and the death time is only known to lie beyond it.
struct Subject {
    std::string id;
    double observed_time = 0.0; // days
    bool event = false;
    std::vector<double> covariates; // length p, identical across a cohort
};

struct Cohort {
    std::vector<Subject> subjects;
    std::string label;
};

// Throws InvalidInput unless the cohort is non-empty, all times are finite
// and non-negative, and every covariate vector has the same length.
void validate_cohort(const Cohort& cohort);

// Number of observed deaths.
std::size_t count_events(const Cohort& cohort);

} // namespace mortkit
