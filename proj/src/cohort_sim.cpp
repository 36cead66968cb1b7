#include "mortkit/cohort_sim.hpp"

#include <cmath>
#include <random>

#include "mortkit/cox.hpp"
#include "mortkit/errors.hpp"

namespace mortkit {

namespace {

const std::string kAsymSuffix = "-asym";

bool is_asymptomatic(const Subject& s) {
    return s.id.size() >= kAsymSuffix.size() &&
           s.id.compare(s.id.size() - kAsymSuffix.size(), kAsymSuffix.size(), kAsymSuffix) == 0;
}

// Uniform in [0, 1) from the top 53 bits of the engine output; exponential by
// inverse CDF. Keeps the draw sequence independent of any standard-library
// distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
    return -std::log1p(-uniform01(rng)) / rate;
}

Subject draw_subject(std::mt19937_64& rng, const std::string& id, double rate,
                     double follow_up) {
    const double t = exponential(rng, rate);
    Subject s;
    s.id = id;
    if (t <= follow_up) {
        s.observed_time = t;
        s.event = true;
    } else {
        s.observed_time = follow_up;
        s.event = false;
    }
    return s;
}

} // namespace

void validate_config(const SimConfig& config) {
    if (config.n_positive <= 0 || config.n_negative <= 0) {
        throw InvalidInput("cohort sizes must be positive");
    }
    if (!(config.baseline_hazard > 0.0)) throw InvalidInput("baseline_hazard must be positive");
    if (!(config.hazard_ratio_true > 0.0)) {
        throw InvalidInput("hazard_ratio_true must be positive");
    }
    if (!(config.asymptomatic_fraction >= 0.0 && config.asymptomatic_fraction <= 1.0)) {
        throw InvalidInput("asymptomatic_fraction must lie in [0,1]");
    }
    if (!(config.asymptomatic_hazard_multiplier > 0.0)) {
        throw InvalidInput("asymptomatic_hazard_multiplier must be positive");
    }
    if (!(config.follow_up_days > 0.0)) throw InvalidInput("follow_up_days must be positive");
}

SimCohorts generate_cohorts(const SimConfig& config) {
    validate_config(config);
    std::mt19937_64 rng(config.seed);

    SimCohorts out;
    out.positive.label = "positive";
    out.negative.label = "negative";
    out.positive.subjects.reserve(static_cast<std::size_t>(config.n_positive));
    out.negative.subjects.reserve(static_cast<std::size_t>(config.n_negative));

    const double positive_rate = config.baseline_hazard * config.hazard_ratio_true;
    for (long i = 0; i < config.n_positive; ++i) {
        const bool asym = uniform01(rng) < config.asymptomatic_fraction;
        const double rate =
            asym ? positive_rate * config.asymptomatic_hazard_multiplier : positive_rate;
        std::string id = "pos-" + std::to_string(i);
        if (asym) id += kAsymSuffix;
        out.positive.subjects.push_back(draw_subject(rng, id, rate, config.follow_up_days));
    }
    for (long i = 0; i < config.n_negative; ++i) {
        out.negative.subjects.push_back(draw_subject(rng, "neg-" + std::to_string(i),
                                                     config.baseline_hazard,
                                                     config.follow_up_days));
    }
    return out;
}

SimCohorts contaminate(const SimCohorts& cohorts, const SimConfig& config) {
    validate_config(config);
    SimCohorts out;
    out.positive.label = cohorts.positive.label;
    out.negative = cohorts.negative;
    for (const Subject& s : cohorts.positive.subjects) {
        if (is_asymptomatic(s)) {
            out.negative.subjects.push_back(s);
        } else {
            out.positive.subjects.push_back(s);
        }
    }
    return out;
}

Cohort merged_with_indicator(const Cohort& positive, const Cohort& negative) {
    Cohort merged;
    merged.label = "merged";
    merged.subjects.reserve(positive.subjects.size() + negative.subjects.size());
    for (const Subject& s : positive.subjects) {
        Subject copy = s;
        copy.covariates = {1.0};
        merged.subjects.push_back(std::move(copy));
    }
    for (const Subject& s : negative.subjects) {
        Subject copy = s;
        copy.covariates = {0.0};
        merged.subjects.push_back(std::move(copy));
    }
    return merged;
}

BiasResult bias_experiment(const SimConfig& config, int replicates) {
    validate_config(config);
    if (replicates < 1) throw InvalidInput("replicates must be >= 1");

    const CovariateSpec spec{{"positive"}};
    std::vector<double> clean, contaminated, inflations;
    int failed = 0;
    for (int r = 0; r < replicates; ++r) {
        SimConfig replicate_config = config;
        replicate_config.seed = config.seed ^ static_cast<std::uint64_t>(r);
        try {
            const SimCohorts cohorts = generate_cohorts(replicate_config);
            const CoxFit fit_clean =
                cox_fit(merged_with_indicator(cohorts.positive, cohorts.negative), spec);
            const SimCohorts tainted = contaminate(cohorts, replicate_config);
            const CoxFit fit_tainted =
                cox_fit(merged_with_indicator(tainted.positive, tainted.negative), spec);
            clean.push_back(fit_clean.hazard_ratios[0]);
            contaminated.push_back(fit_tainted.hazard_ratios[0]);
            inflations.push_back(fit_tainted.hazard_ratios[0] - fit_clean.hazard_ratios[0]);
        } catch (const Error&) {
            ++failed;
        }
    }
    if (clean.empty()) {
        throw ExperimentFailed("all " + std::to_string(replicates) + " replicates failed");
    }

    BiasResult result;
    result.replicates = static_cast<int>(clean.size());
    result.failed_replicates = failed;
    for (double v : clean) result.hr_clean += v;
    result.hr_clean /= static_cast<double>(clean.size());
    for (double v : contaminated) result.hr_contaminated += v;
    result.hr_contaminated /= static_cast<double>(contaminated.size());
    for (double v : inflations) result.mean_inflation += v;
    result.mean_inflation /= static_cast<double>(inflations.size());
    if (inflations.size() > 1) {
        double ss = 0.0;
        for (double v : inflations) {
            ss += (v - result.mean_inflation) * (v - result.mean_inflation);
        }
        const double sd = std::sqrt(ss / static_cast<double>(inflations.size() - 1));
        result.inflation_se = sd / std::sqrt(static_cast<double>(inflations.size()));
    }
    return result;
}

IndicatorCounts england_indicators(const std::vector<DeathRecord>& records) {
    IndicatorCounts counts;
    for (const DeathRecord& r : records) {
        if (r.first_positive_test_time.has_value()) {
            ++counts.any_prior;
            const double gap = r.death_time - *r.first_positive_test_time;
            if (gap <= 28.0) ++counts.within_28;
            if (gap <= 60.0 || r.covid_on_certificate) ++counts.within_60_or_cert;
        } else if (r.covid_on_certificate) {
            ++counts.within_60_or_cert;
        }
    }
    return counts;
}

std::vector<DeathRecord> death_records(const SimCohorts& cohorts) {
    std::vector<DeathRecord> records;
    for (const Subject& s : cohorts.positive.subjects) {
        if (!s.event) continue;
        DeathRecord r;
        r.death_time = s.observed_time;
        if (!is_asymptomatic(s)) {
            r.first_positive_test_time = 0.0; // tested at cohort entry
            r.covid_on_certificate = true;
        }
        records.push_back(r);
    }
    for (const Subject& s : cohorts.negative.subjects) {
        if (!s.event) continue;
        DeathRecord r;
        r.death_time = s.observed_time;
        records.push_back(r);
    }
    return records;
}

} // namespace mortkit
