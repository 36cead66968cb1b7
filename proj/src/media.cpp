#include "mortkit/media.hpp"

#include <algorithm>
#include <cmath>

#include "mortkit/errors.hpp"

namespace mortkit {

namespace {

const char* kWithPhrase = "deaths with covid";
const char* kFromPhrase = "deaths from covid";
const char* kOfPhrase = "deaths of covid";

std::string ascii_lower(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

} // namespace

std::string to_string(Country c) { return c == Country::UK ? "UK" : "USA"; }

std::string to_string(Medium m) { return m == Medium::Newspaper ? "newspaper" : "tv"; }

Country parse_country(const std::string& s) {
    if (s == "UK") return Country::UK;
    if (s == "USA") return Country::USA;
    throw InvalidInput("unknown country '" + s + "' (expected UK or USA)");
}

Medium parse_medium(const std::string& s) {
    if (s == "newspaper") return Medium::Newspaper;
    if (s == "tv") return Medium::TV;
    throw InvalidInput("unknown medium '" + s + "' (expected newspaper or tv)");
}

long long total_articles(const PublisherCounts& p) {
    return p.with_count + p.from_count + p.of_count;
}

long long incorrect_articles(const PublisherCounts& p) { return p.from_count + p.of_count; }

double incorrect_proportion(const PublisherCounts& p) {
    const long long total = total_articles(p);
    if (total <= 0) {
        throw NoArticles("publisher '" + p.name + "' has no articles");
    }
    return static_cast<double>(incorrect_articles(p)) / static_cast<double>(total);
}

std::pair<double, double> macro_average(const std::vector<PublisherCounts>& publishers) {
    if (publishers.size() < 2) {
        throw InsufficientData("macro average needs at least 2 publishers");
    }
    std::vector<double> props;
    props.reserve(publishers.size());
    for (const PublisherCounts& p : publishers) props.push_back(incorrect_proportion(p));

    double mean = 0.0;
    for (double v : props) mean += v;
    mean /= static_cast<double>(props.size());
    double ss = 0.0;
    for (double v : props) ss += (v - mean) * (v - mean);
    const double std_dev = std::sqrt(ss / static_cast<double>(props.size() - 1));
    return {mean, std_dev};
}

double pooled_proportion(const std::vector<PublisherCounts>& publishers) {
    long long incorrect = 0;
    long long total = 0;
    for (const PublisherCounts& p : publishers) {
        incorrect += incorrect_articles(p);
        total += total_articles(p);
    }
    if (total <= 0) {
        throw NoArticles("no articles across all publishers");
    }
    return static_cast<double>(incorrect) / static_cast<double>(total);
}

AggregateReport aggregate(const std::vector<PublisherCounts>& publishers) {
    AggregateReport report;
    const auto [mean, std_dev] = macro_average(publishers);
    report.macro_average = mean;
    report.macro_sample_std = std_dev;
    report.pooled = pooled_proportion(publishers);
    for (const PublisherCounts& p : publishers) {
        report.per_publisher.push_back({p.name, incorrect_proportion(p)});
    }
    return report;
}

bool utf8_valid(const std::string& text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t extra;
        unsigned long code;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c >> 5) == 0x6) {
            extra = 1;
            code = c & 0x1f;
        } else if ((c >> 4) == 0xe) {
            extra = 2;
            code = c & 0x0f;
        } else if ((c >> 3) == 0x1e) {
            extra = 3;
            code = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= n) return false; // truncated sequence
        for (std::size_t k = 1; k <= extra; ++k) {
            const unsigned char cc = static_cast<unsigned char>(text[i + k]);
            if ((cc >> 6) != 0x2) return false;
            code = (code << 6) | (cc & 0x3f);
        }
        // reject overlong encodings, surrogates, and out-of-range points
        if (extra == 1 && code < 0x80) return false;
        if (extra == 2 && code < 0x800) return false;
        if (extra == 3 && code < 0x10000) return false;
        if (code >= 0xd800 && code <= 0xdfff) return false;
        if (code > 0x10ffff) return false;
        i += extra + 1;
    }
    return true;
}

ScanResult phrase_scan(const std::string& publisher, Country country, Medium medium,
                       const std::vector<std::string>& documents) {
    ScanResult result;
    result.counts.name = publisher;
    result.counts.country = country;
    result.counts.medium = medium;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (!utf8_valid(documents[i])) {
            result.skipped_documents.push_back(i);
            continue;
        }
        const std::string lowered = ascii_lower(documents[i]);
        if (lowered.find(kWithPhrase) != std::string::npos) ++result.counts.with_count;
        if (lowered.find(kFromPhrase) != std::string::npos) ++result.counts.from_count;
        if (lowered.find(kOfPhrase) != std::string::npos) ++result.counts.of_count;
    }
    return result;
}

} // namespace mortkit
