#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace mortkit {

enum class Country { UK, USA };
enum class Medium { Newspaper, TV };

std::string to_string(Country c);
std::string to_string(Medium m);
Country parse_country(const std::string& s);
Medium parse_medium(const std::string& s);

// Per-outlet counts of articles using each phrasing. 'with' is the correct
// form; 'from' and 'of' are the incorrect ones.
struct PublisherCounts {
    std::string name;
    Country country = Country::UK;
    Medium medium = Medium::Newspaper;
    long long with_count = 0;
    long long from_count = 0;
    long long of_count = 0;
};

long long total_articles(const PublisherCounts& p);
long long incorrect_articles(const PublisherCounts& p);

// (from + of) / (with + from + of). Throws NoArticles when all counts are 0.
double incorrect_proportion(const PublisherCounts& p);

// Unweighted mean of per-publisher incorrect proportions and its sample
// (1/(n-1)) standard deviation. Needs at least two publishers.
std::pair<double, double> macro_average(const std::vector<PublisherCounts>& publishers);

// Article-weighted proportion: sum of incorrect over sum of all articles.
double pooled_proportion(const std::vector<PublisherCounts>& publishers);

struct AggregateReport {
    double macro_average = 0.0;
    double macro_sample_std = 0.0;
    double pooled = 0.0;
    std::vector<std::pair<std::string, double>> per_publisher;
};

AggregateReport aggregate(const std::vector<PublisherCounts>& publishers);

struct ScanResult {
    PublisherCounts counts;
    std::vector<std::size_t> skipped_documents; // indices of undecodable docs
};

// Counts the documents that contain each exact phrase ('deaths with COVID',
// 'deaths from COVID', 'deaths of COVID') at least once, case-insensitively
// and with substring semantics, so suffixed variants like 'COVID-19' match.
// Documents that are not valid UTF-8 are skipped and reported.
ScanResult phrase_scan(const std::string& publisher, Country country, Medium medium,
                       const std::vector<std::string>& documents);

bool utf8_valid(const std::string& text);

} // namespace mortkit
