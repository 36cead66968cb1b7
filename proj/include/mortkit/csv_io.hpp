#pragma once

#include <string>
#include <vector>

#include "mortkit/cohort.hpp"
#include "mortkit/cohort_sim.hpp"
#include "mortkit/media.hpp"
#include "mortkit/survival.hpp"

namespace mortkit {

// Cohort CSV: header `id,time,event[,x1,x2,...]`, event in {0,1}, times as
// decimal literals.
struct CohortCsv {
    Cohort cohort;
    std::vector<std::string> covariate_names;
};

CohortCsv parse_cohort_csv(const std::string& text, const std::string& source_name);
CohortCsv read_cohort_csv(const std::string& path);
std::string cohort_to_csv(const Cohort& cohort, const std::vector<std::string>& covariate_names);

// Survival curve as CSV `t,d,n,s,var`.
std::string curve_to_csv(const SurvivalCurve& curve);

// Publisher counts CSV: header `name,country,medium,with,from,of`.
std::vector<PublisherCounts> parse_counts_csv(const std::string& text,
                                              const std::string& source_name);
std::vector<PublisherCounts> read_counts_csv(const std::string& path);
std::string counts_to_csv(const std::vector<PublisherCounts>& rows);

// Death record CSV: header `death_time,first_positive_test_time,
// covid_on_certificate`, empty test field for never-tested records.
std::vector<DeathRecord> parse_death_records_csv(const std::string& text,
                                                 const std::string& source_name);
std::vector<DeathRecord> read_death_records_csv(const std::string& path);
std::string death_records_to_csv(const std::vector<DeathRecord>& records);

// Flat key=value simulation config; '#' starts a comment. Recognized keys
// match the SimConfig field names. An optional `replicates` key is returned
// separately (0 when absent).
struct SimConfigFile {
    SimConfig config;
    int replicates = 0;
};

SimConfigFile parse_sim_config(const std::string& text, const std::string& source_name);
SimConfigFile read_sim_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace mortkit
