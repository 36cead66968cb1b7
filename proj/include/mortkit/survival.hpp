#pragma once

#include <vector>

#include "mortkit/cohort.hpp"

namespace mortkit {

// One drop of the Kaplan-Meier step function. `estimate` is the value just
// after the drop, s(t+); `variance` is the Greenwood variance of that value.
struct SurvivalStep {
    double time = 0.0;
    long deaths = 0;   // d_i
    long at_risk = 0;  // n_i, subjects still at risk just before time
    double estimate = 1.0;
    double variance = 0.0;
};

struct SurvivalCurve {
    std::vector<SurvivalStep> steps;
    // Set when some step had deaths == at_risk: the estimate hits zero there
    // and the Greenwood sum is undefined from that step on.
    bool degenerate_step = false;

    // Right-continuous lookup: the estimate just after the last step at or
    // before t, or 1 before the first step.
    double survival_at(double t) const;
};

// Product-limit estimate of the survival function. Deaths tied at one time
// form a single step; subjects censored at t stay in the risk set for deaths
// at t and leave immediately after. Variance fields are filled by
// greenwood_variance.
SurvivalCurve kaplan_meier(const Cohort& cohort);

// Fills the variance of each step as s(t_i)^2 * sum_{j<=i} d_j/(n_j(n_j-d_j)).
// A step with d == n gets variance 0 and raises the degenerate flag.
SurvivalCurve greenwood_variance(const SurvivalCurve& curve);

} // namespace mortkit
