#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mortkit/cohort.hpp"

namespace mortkit {

struct SimConfig {
    long n_positive = 0;
    long n_negative = 0;
    double baseline_hazard = 0.0;              // events/day in the negative cohort
    double hazard_ratio_true = 1.0;            // multiplies the positive cohort's hazard
    double asymptomatic_fraction = 0.0;        // share of positives unaware of infection
    double asymptomatic_hazard_multiplier = 1.0; // <= 1 models milder disease
    double follow_up_days = 0.0;               // administrative censoring horizon
    std::uint64_t seed = 0;
};

void validate_config(const SimConfig& config);

struct SimCohorts {
    Cohort positive;
    Cohort negative;
};

// Draws exponential event times (hazard baseline*HR for positives, scaled by
// the multiplier for asymptomatic positives, plain baseline for negatives)
// with administrative censoring at follow_up_days. Randomness comes from a
// seeded mt19937_64 with inverse-CDF sampling, so a given seed and config
// reproduce bitwise. Asymptomatic positives carry the "-asym" id suffix.
SimCohorts generate_cohorts(const SimConfig& config);

// Relabels every asymptomatic positive into the negative cohort, records
// otherwise unchanged. Models undetected infections contaminating the
// comparison group.
SimCohorts contaminate(const SimCohorts& cohorts, const SimConfig& config);

// Single merged cohort with one binary covariate: 1 for members of
// `positive`, 0 for members of `negative`.
Cohort merged_with_indicator(const Cohort& positive, const Cohort& negative);

struct BiasResult {
    double hr_clean = 0.0;        // mean fitted hazard ratio before contamination
    double hr_contaminated = 0.0; // mean fitted hazard ratio after
    int replicates = 0;           // successful replicates
    double mean_inflation = 0.0;  // mean of (contaminated - clean) per replicate
    double inflation_se = 0.0;    // Monte-Carlo standard error of mean_inflation
    int failed_replicates = 0;
};

// For each replicate r (seed xor r): generate, fit Cox on the clean merged
// data, contaminate, refit. Replicates whose fits error out are dropped and
// counted. Throws ExperimentFailed if every replicate fails.
BiasResult bias_experiment(const SimConfig& config, int replicates);

struct DeathRecord {
    double death_time = 0.0; // days
    std::optional<double> first_positive_test_time; // absent if never tested
    bool covid_on_certificate = false;
};

struct IndicatorCounts {
    long any_prior = 0;          // any recorded positive test before death
    long within_28 = 0;          // first positive test within 28 days of dying
    long within_60_or_cert = 0;  // within 60 days, or certificate mention
};

// England death-recording indicators. "Within" is inclusive: a gap of
// exactly 28 (or 60) days counts.
IndicatorCounts england_indicators(const std::vector<DeathRecord>& records);

// Death records for one simulated realization: symptomatic positives who died
// are recorded with a positive test at day 0 and a certificate mention;
// asymptomatic positives and negatives die untested and uncertified.
std::vector<DeathRecord> death_records(const SimCohorts& cohorts);

} // namespace mortkit
