#include "mortkit/survival.hpp"

#include <algorithm>
#include <numeric>

#include "mortkit/errors.hpp"

namespace mortkit {

double SurvivalCurve::survival_at(double t) const {
    double s = 1.0;
    for (const SurvivalStep& step : steps) {
        if (step.time > t) break;
        s = step.estimate;
    }
    return s;
}

SurvivalCurve kaplan_meier(const Cohort& cohort) {
    validate_cohort(cohort);

    const std::vector<Subject>& subs = cohort.subjects;
    std::vector<std::size_t> order(subs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return subs[a].observed_time < subs[b].observed_time;
    });

    SurvivalCurve curve;
    long at_risk = static_cast<long>(subs.size());
    double estimate = 1.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = subs[order[i]].observed_time;
        long deaths = 0;
        long leaving = 0;
        while (i < order.size() && subs[order[i]].observed_time == t) {
            if (subs[order[i]].event) ++deaths;
            ++leaving;
            ++i;
        }
        if (deaths > 0) {
            estimate *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
            curve.steps.push_back({t, deaths, at_risk, estimate, 0.0});
        }
        at_risk -= leaving;
    }
    return greenwood_variance(curve);
}

SurvivalCurve greenwood_variance(const SurvivalCurve& curve) {
    SurvivalCurve out = curve;
    out.degenerate_step = false;
    double cumulative = 0.0;
    for (SurvivalStep& step : out.steps) {
        if (step.deaths >= step.at_risk) {
            // risk set exhausted: estimate is 0, Greenwood term undefined
            step.variance = 0.0;
            out.degenerate_step = true;
            continue;
        }
        cumulative += static_cast<double>(step.deaths) /
                      (static_cast<double>(step.at_risk) *
                       static_cast<double>(step.at_risk - step.deaths));
        step.variance = step.estimate * step.estimate * cumulative;
    }
    return out;
}

} // namespace mortkit
