#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mortkit/cohort_sim.hpp"
#include "mortkit/cox.hpp"
#include "mortkit/media.hpp"
#include "mortkit/stats_tests.hpp"
#include "mortkit/survival.hpp"
#include "mortkit/svg.hpp"

namespace mortkit {

void to_json(nlohmann::json& j, const TestResult& r);
void to_json(nlohmann::json& j, const CoxFit& fit);
void to_json(nlohmann::json& j, const BiasResult& r);
void to_json(nlohmann::json& j, const AggregateReport& r);
void to_json(nlohmann::json& j, const SurvivalStep& s);
void to_json(nlohmann::json& j, const IndicatorCounts& c);

nlohmann::json curve_to_json(const SurvivalCurve& curve);

// The whole phrase-count analysis: per-country aggregates, goodness-of-fit
// tests, cross-country comparison, and correlations. Displayed percentages
// carry 1 decimal, correlations 3, p-values 4; a `precise` block keeps the
// unrounded values.
nlohmann::json build_analysis_report(const std::vector<PublisherCounts>& rows);

std::string render_text_report(const nlohmann::json& report);

struct CountryScatter {
    Country country = Country::UK;
    std::vector<ScatterPoint> points; // x = total articles, y = incorrect articles
    double intercept = 0.0;
    double slope = 0.0;
};

// One scatter series per country present in the rows (insertion order),
// with its least-squares line.
std::vector<CountryScatter> scatter_series(const std::vector<PublisherCounts>& rows);

std::string scatter_to_csv(const CountryScatter& scatter);

struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string toolkit_version;
    std::string timestamp;
};

void to_json(nlohmann::json& j, const RunManifest& m);

} // namespace mortkit
