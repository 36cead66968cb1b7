#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mortkit/cohort_sim.hpp"
#include "mortkit/cox.hpp"
#include "mortkit/errors.hpp"

using namespace mortkit;

namespace {

SimConfig base_config() {
    SimConfig c;
    c.n_positive = 400;
    c.n_negative = 400;
    c.baseline_hazard = 0.01;
    c.hazard_ratio_true = 2.0;
    c.asymptomatic_fraction = 0.0;
    c.asymptomatic_hazard_multiplier = 1.0;
    c.follow_up_days = 120.0;
    c.seed = 99;
    return c;
}

double death_fraction(const Cohort& c) {
    return static_cast<double>(count_events(c)) / static_cast<double>(c.subjects.size());
}

DeathRecord record(double death, std::optional<double> test, bool cert) {
    DeathRecord r;
    r.death_time = death;
    r.first_positive_test_time = test;
    r.covid_on_certificate = cert;
    return r;
}

} // namespace

TEST_CASE("england indicators on an empty list") {
    const IndicatorCounts c = england_indicators({});
    CHECK(c.any_prior == 0);
    CHECK(c.within_28 == 0);
    CHECK(c.within_60_or_cert == 0);
}

TEST_CASE("england indicator boundary fixtures") {
    SUBCASE("gap of exactly 28 days counts as within 28") {
        const IndicatorCounts c = england_indicators({record(30.0, 2.0, false)});
        CHECK(c.any_prior == 1);
        CHECK(c.within_28 == 1);
        CHECK(c.within_60_or_cert == 1);
    }
    SUBCASE("gap of 30 days is outside 28 but inside 60") {
        const IndicatorCounts c = england_indicators({record(30.0, 0.0, false)});
        CHECK(c.any_prior == 1);
        CHECK(c.within_28 == 0);
        CHECK(c.within_60_or_cert == 1);
    }
    SUBCASE("gap of exactly 60 days counts as within 60") {
        const IndicatorCounts c = england_indicators({record(60.0, 0.0, false)});
        CHECK(c.any_prior == 1);
        CHECK(c.within_28 == 0);
        CHECK(c.within_60_or_cert == 1);
    }
    SUBCASE("gap of 61 days with no certificate misses both windows") {
        const IndicatorCounts c = england_indicators({record(61.0, 0.0, false)});
        CHECK(c.any_prior == 1);
        CHECK(c.within_28 == 0);
        CHECK(c.within_60_or_cert == 0);
    }
    SUBCASE("certificate without a test counts only for the certificate rule") {
        const IndicatorCounts c = england_indicators({record(10.0, std::nullopt, true)});
        CHECK(c.any_prior == 0);
        CHECK(c.within_28 == 0);
        CHECK(c.within_60_or_cert == 1);
    }
    SUBCASE("certificate rescues a long gap through the OR clause") {
        const IndicatorCounts c = england_indicators({record(70.0, 0.0, true)});
        CHECK(c.any_prior == 1);
        CHECK(c.within_28 == 0);
        CHECK(c.within_60_or_cert == 1);
    }
}

TEST_CASE("indicator ordering invariants on mixed records") {
    const std::vector<DeathRecord> records = {
        record(5.0, 1.0, false),  record(40.0, 2.0, true),  record(80.0, 3.0, false),
        record(20.0, std::nullopt, true), record(9.0, std::nullopt, false),
    };
    const IndicatorCounts c = england_indicators(records);
    CHECK(c.any_prior >= c.within_28);
    CHECK(c.any_prior == 3);
    CHECK(c.within_28 == 1);
    CHECK(c.within_60_or_cert == 3);
}

TEST_CASE("config validation") {
    SimConfig c = base_config();
    c.n_positive = 0;
    CHECK_THROWS_AS(generate_cohorts(c), InvalidInput);
    c = base_config();
    c.baseline_hazard = 0.0;
    CHECK_THROWS_AS(generate_cohorts(c), InvalidInput);
    c = base_config();
    c.asymptomatic_fraction = 1.5;
    CHECK_THROWS_AS(generate_cohorts(c), InvalidInput);
    c = base_config();
    c.follow_up_days = 0.0;
    CHECK_THROWS_AS(generate_cohorts(c), InvalidInput);
}

TEST_CASE("generation is bitwise reproducible for a fixed seed") {
    const SimConfig config = base_config();
    const SimCohorts a = generate_cohorts(config);
    const SimCohorts b = generate_cohorts(config);
    REQUIRE(a.positive.subjects.size() == b.positive.subjects.size());
    for (std::size_t i = 0; i < a.positive.subjects.size(); ++i) {
        CHECK(a.positive.subjects[i].id == b.positive.subjects[i].id);
        CHECK(a.positive.subjects[i].observed_time == b.positive.subjects[i].observed_time);
        CHECK(a.positive.subjects[i].event == b.positive.subjects[i].event);
    }
    SimConfig other = config;
    other.seed = config.seed + 1;
    const SimCohorts c = generate_cohorts(other);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.positive.subjects.size(); ++i) {
        if (a.positive.subjects[i].observed_time != c.positive.subjects[i].observed_time) {
            any_difference = true;
            break;
        }
    }
    CHECK(any_difference);
}

TEST_CASE("vanishing follow-up censors everyone") {
    SimConfig config = base_config();
    config.follow_up_days = 1e-12;
    const SimCohorts cohorts = generate_cohorts(config);
    CHECK(count_events(cohorts.positive) == 0);
    CHECK(count_events(cohorts.negative) == 0);
    for (const Subject& s : cohorts.negative.subjects) CHECK(s.observed_time == 1e-12);
}

TEST_CASE("higher true hazard ratio raises the positive death fraction") {
    const SimConfig config = base_config(); // HR_true = 2
    const SimCohorts cohorts = generate_cohorts(config);
    CHECK(death_fraction(cohorts.positive) > death_fraction(cohorts.negative));
}

TEST_CASE("null configuration recovers a hazard ratio near 1") {
    SimConfig config = base_config();
    config.hazard_ratio_true = 1.0;
    config.n_positive = 1000;
    config.n_negative = 1000;
    const SimCohorts cohorts = generate_cohorts(config);
    const CoxFit fit = cox_fit(merged_with_indicator(cohorts.positive, cohorts.negative),
                               CovariateSpec{{"positive"}});
    REQUIRE(fit.converged);
    CHECK(std::abs(fit.coefficients[0]) <= 2.0 * fit.standard_errors[0]);
}

TEST_CASE("contaminate with no asymptomatics is the identity") {
    const SimConfig config = base_config();
    const SimCohorts cohorts = generate_cohorts(config);
    const SimCohorts moved = contaminate(cohorts, config);
    CHECK(moved.positive.subjects.size() == cohorts.positive.subjects.size());
    CHECK(moved.negative.subjects.size() == cohorts.negative.subjects.size());
    for (std::size_t i = 0; i < cohorts.positive.subjects.size(); ++i) {
        CHECK(moved.positive.subjects[i].id == cohorts.positive.subjects[i].id);
    }
}

TEST_CASE("contaminate preserves subjects and moves every asymptomatic") {
    SimConfig config = base_config();
    config.asymptomatic_fraction = 0.4;
    config.asymptomatic_hazard_multiplier = 0.3;
    const SimCohorts cohorts = generate_cohorts(config);
    const SimCohorts moved = contaminate(cohorts, config);

    CHECK(moved.positive.subjects.size() + moved.negative.subjects.size() ==
          cohorts.positive.subjects.size() + cohorts.negative.subjects.size());
    for (const Subject& s : moved.positive.subjects) {
        CHECK(s.id.find("-asym") == std::string::npos);
    }
    std::multiset<std::string> before, after;
    for (const Subject& s : cohorts.positive.subjects) before.insert(s.id);
    for (const Subject& s : cohorts.negative.subjects) before.insert(s.id);
    for (const Subject& s : moved.positive.subjects) after.insert(s.id);
    for (const Subject& s : moved.negative.subjects) after.insert(s.id);
    CHECK(before == after);
}

TEST_CASE("full contamination empties the positive cohort and breaks the fit") {
    SimConfig config = base_config();
    config.asymptomatic_fraction = 1.0;
    const SimCohorts cohorts = generate_cohorts(config);
    const SimCohorts moved = contaminate(cohorts, config);
    CHECK(moved.positive.subjects.empty());
    CHECK_THROWS_AS(cox_fit(merged_with_indicator(moved.positive, moved.negative),
                            CovariateSpec{{"positive"}}),
                    DegenerateCovariate);
}

TEST_CASE("bias experiment bookkeeping") {
    SimConfig config = base_config();
    config.n_positive = 150;
    config.n_negative = 150;
    const BiasResult r = bias_experiment(config, 1);
    CHECK(r.replicates == 1);
    CHECK(r.failed_replicates == 0);
    CHECK(r.hr_clean > 0.0);
    CHECK(r.hr_contaminated > 0.0);
    CHECK_THROWS_AS(bias_experiment(config, 0), InvalidInput);
}

TEST_CASE("bias experiment fails cleanly when every replicate fails") {
    SimConfig config = base_config();
    config.asymptomatic_fraction = 1.0; // contaminated fit always degenerate
    CHECK_THROWS_AS(bias_experiment(config, 3), ExperimentFailed);
}

TEST_CASE("milder asymptomatic disease inflates the contaminated hazard ratio") {
    SimConfig config = base_config();
    config.n_positive = 300;
    config.n_negative = 300;
    config.hazard_ratio_true = 1.5;
    config.asymptomatic_fraction = 0.4;
    config.asymptomatic_hazard_multiplier = 0.2;
    const BiasResult r = bias_experiment(config, 40);
    CHECK(r.replicates == 40);
    CHECK(r.mean_inflation > 0.0);
    CHECK(r.hr_contaminated > r.hr_clean);
}

TEST_CASE("exchangeable relabelling leaves the hazard ratio unbiased") {
    SimConfig config = base_config();
    config.n_positive = 300;
    config.n_negative = 300;
    config.hazard_ratio_true = 1.0;
    config.asymptomatic_fraction = 0.4;
    config.asymptomatic_hazard_multiplier = 1.0;
    const BiasResult r = bias_experiment(config, 40);
    CHECK(std::abs(r.mean_inflation) < 2.0 * r.inflation_se);
}

TEST_CASE("simulated death records carry the documented test/certificate wiring") {
    SimConfig config = base_config();
    config.asymptomatic_fraction = 0.5;
    config.asymptomatic_hazard_multiplier = 0.5;
    const SimCohorts cohorts = generate_cohorts(config);
    const std::vector<DeathRecord> records = death_records(cohorts);

    std::size_t deaths = count_events(cohorts.positive) + count_events(cohorts.negative);
    CHECK(records.size() == deaths);
    std::size_t tested = 0;
    for (const DeathRecord& r : records) {
        if (r.first_positive_test_time.has_value()) {
            ++tested;
            CHECK(*r.first_positive_test_time == 0.0);
            CHECK(*r.first_positive_test_time <= r.death_time);
            CHECK(r.covid_on_certificate);
        } else {
            CHECK_FALSE(r.covid_on_certificate);
        }
    }
    // only symptomatic positive deaths are tested
    std::size_t symptomatic_deaths = 0;
    for (const Subject& s : cohorts.positive.subjects) {
        if (s.event && s.id.find("-asym") == std::string::npos) ++symptomatic_deaths;
    }
    CHECK(tested == symptomatic_deaths);
}
