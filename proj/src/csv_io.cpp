#include "mortkit/csv_io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mortkit/errors.hpp"

namespace mortkit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

// Lines of the file with trailing \r stripped; empty trailing lines dropped.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream stream(text);
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

[[noreturn]] void fail(const std::string& source, std::size_t row, const std::string& message) {
    throw InvalidInput(source + ", row " + std::to_string(row) + ": " + message);
}

double parse_double(const std::string& text, const std::string& source, std::size_t row,
                    const std::string& column) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        fail(source, row, "cannot parse '" + text + "' as a number in column " + column);
    }
    return value;
}

long long parse_count(const std::string& text, const std::string& source, std::size_t row,
                      const std::string& column) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(source, row, "cannot parse '" + text + "' as an integer in column " + column);
    }
    if (value < 0) fail(source, row, "negative count in column " + column);
    return value;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << content;
    if (!out) throw InvalidInput("short write to '" + path + "'");
}

CohortCsv parse_cohort_csv(const std::string& text, const std::string& source_name) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw InvalidInput(source_name + ": empty cohort CSV");

    const std::vector<std::string> header = split_line(lines[0]);
    if (header.size() < 3 || header[0] != "id" || header[1] != "time" || header[2] != "event") {
        throw InvalidInput(source_name + ": header must start with id,time,event");
    }
    CohortCsv out;
    for (std::size_t k = 3; k < header.size(); ++k) out.covariate_names.push_back(header[k]);
    const std::size_t p = out.covariate_names.size();

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i + 1;
        if (lines[i].empty()) fail(source_name, row, "empty line");
        const std::vector<std::string> fields = split_line(lines[i]);
        if (fields.size() != 3 + p) {
            fail(source_name, row,
                 "expected " + std::to_string(3 + p) + " fields, got " +
                     std::to_string(fields.size()));
        }
        Subject s;
        s.id = fields[0];
        s.observed_time = parse_double(fields[1], source_name, row, "time");
        if (!std::isfinite(s.observed_time) || s.observed_time < 0.0) {
            fail(source_name, row, "time must be a finite non-negative number");
        }
        if (fields[2] == "1") {
            s.event = true;
        } else if (fields[2] == "0") {
            s.event = false;
        } else {
            fail(source_name, row, "event must be 0 or 1, got '" + fields[2] + "'");
        }
        s.covariates.reserve(p);
        for (std::size_t k = 0; k < p; ++k) {
            s.covariates.push_back(
                parse_double(fields[3 + k], source_name, row, out.covariate_names[k]));
        }
        out.cohort.subjects.push_back(std::move(s));
    }
    if (out.cohort.subjects.empty()) {
        throw InvalidInput(source_name + ": no subject rows");
    }
    out.cohort.label = source_name;
    return out;
}

CohortCsv read_cohort_csv(const std::string& path) {
    return parse_cohort_csv(read_file(path), path);
}

std::string cohort_to_csv(const Cohort& cohort, const std::vector<std::string>& covariate_names) {
    std::ostringstream out;
    out << "id,time,event";
    for (const std::string& name : covariate_names) out << ',' << name;
    out << '\n';
    for (const Subject& s : cohort.subjects) {
        out << s.id << ',' << format_double(s.observed_time) << ',' << (s.event ? 1 : 0);
        for (double x : s.covariates) out << ',' << format_double(x);
        out << '\n';
    }
    return out.str();
}

std::string curve_to_csv(const SurvivalCurve& curve) {
    std::ostringstream out;
    out << "t,d,n,s,var\n";
    for (const SurvivalStep& step : curve.steps) {
        out << format_double(step.time) << ',' << step.deaths << ',' << step.at_risk << ','
            << format_double(step.estimate) << ',' << format_double(step.variance) << '\n';
    }
    return out.str();
}

std::vector<PublisherCounts> parse_counts_csv(const std::string& text,
                                              const std::string& source_name) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw InvalidInput(source_name + ": empty counts CSV");
    if (lines[0] != "name,country,medium,with,from,of") {
        throw InvalidInput(source_name + ": header must be name,country,medium,with,from,of");
    }
    std::vector<PublisherCounts> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i + 1;
        if (lines[i].empty()) fail(source_name, row, "empty line");
        const std::vector<std::string> fields = split_line(lines[i]);
        if (fields.size() != 6) {
            fail(source_name, row, "expected 6 fields, got " + std::to_string(fields.size()));
        }
        PublisherCounts p;
        p.name = fields[0];
        if (p.name.empty()) fail(source_name, row, "publisher name is empty");
        try {
            p.country = parse_country(fields[1]);
            p.medium = parse_medium(fields[2]);
        } catch (const InvalidInput& e) {
            fail(source_name, row, e.what());
        }
        p.with_count = parse_count(fields[3], source_name, row, "with");
        p.from_count = parse_count(fields[4], source_name, row, "from");
        p.of_count = parse_count(fields[5], source_name, row, "of");
        rows.push_back(std::move(p));
    }
    return rows;
}

std::vector<PublisherCounts> read_counts_csv(const std::string& path) {
    return parse_counts_csv(read_file(path), path);
}

std::string counts_to_csv(const std::vector<PublisherCounts>& rows) {
    std::ostringstream out;
    out << "name,country,medium,with,from,of\n";
    for (const PublisherCounts& p : rows) {
        out << p.name << ',' << to_string(p.country) << ',' << to_string(p.medium) << ','
            << p.with_count << ',' << p.from_count << ',' << p.of_count << '\n';
    }
    return out.str();
}

std::vector<DeathRecord> parse_death_records_csv(const std::string& text,
                                                 const std::string& source_name) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw InvalidInput(source_name + ": empty death record CSV");
    if (lines[0] != "death_time,first_positive_test_time,covid_on_certificate") {
        throw InvalidInput(source_name +
                           ": header must be death_time,first_positive_test_time,"
                           "covid_on_certificate");
    }
    std::vector<DeathRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i + 1;
        if (lines[i].empty()) fail(source_name, row, "empty line");
        const std::vector<std::string> fields = split_line(lines[i]);
        if (fields.size() != 3) {
            fail(source_name, row, "expected 3 fields, got " + std::to_string(fields.size()));
        }
        DeathRecord r;
        r.death_time = parse_double(fields[0], source_name, row, "death_time");
        if (!std::isfinite(r.death_time) || r.death_time < 0.0) {
            fail(source_name, row, "death_time must be a finite non-negative number");
        }
        if (!fields[1].empty()) {
            const double t =
                parse_double(fields[1], source_name, row, "first_positive_test_time");
            if (!std::isfinite(t) || t < 0.0) {
                fail(source_name, row, "test time must be a finite non-negative number");
            }
            if (t > r.death_time) {
                fail(source_name, row, "first positive test after death is excluded");
            }
            r.first_positive_test_time = t;
        }
        if (fields[2] == "1") {
            r.covid_on_certificate = true;
        } else if (fields[2] == "0") {
            r.covid_on_certificate = false;
        } else {
            fail(source_name, row, "covid_on_certificate must be 0 or 1");
        }
        records.push_back(r);
    }
    return records;
}

std::vector<DeathRecord> read_death_records_csv(const std::string& path) {
    return parse_death_records_csv(read_file(path), path);
}

std::string death_records_to_csv(const std::vector<DeathRecord>& records) {
    std::ostringstream out;
    out << "death_time,first_positive_test_time,covid_on_certificate\n";
    for (const DeathRecord& r : records) {
        out << format_double(r.death_time) << ',';
        if (r.first_positive_test_time.has_value()) {
            out << format_double(*r.first_positive_test_time);
        }
        out << ',' << (r.covid_on_certificate ? 1 : 0) << '\n';
    }
    return out.str();
}

SimConfigFile parse_sim_config(const std::string& text, const std::string& source_name) {
    SimConfigFile out;
    const std::vector<std::string> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
        line.erase(line.begin(), std::find_if_not(line.begin(), line.end(), is_space));
        while (!line.empty() && is_space(line.back())) line.pop_back();
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(source_name, i + 1, "expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && is_space(key.back())) key.pop_back();
        value.erase(value.begin(), std::find_if_not(value.begin(), value.end(), is_space));

        if (key == "n_positive") {
            out.config.n_positive = static_cast<long>(parse_count(value, source_name, i + 1, key));
        } else if (key == "n_negative") {
            out.config.n_negative = static_cast<long>(parse_count(value, source_name, i + 1, key));
        } else if (key == "baseline_hazard") {
            out.config.baseline_hazard = parse_double(value, source_name, i + 1, key);
        } else if (key == "hazard_ratio_true") {
            out.config.hazard_ratio_true = parse_double(value, source_name, i + 1, key);
        } else if (key == "asymptomatic_fraction") {
            out.config.asymptomatic_fraction = parse_double(value, source_name, i + 1, key);
        } else if (key == "asymptomatic_hazard_multiplier") {
            out.config.asymptomatic_hazard_multiplier =
                parse_double(value, source_name, i + 1, key);
        } else if (key == "follow_up_days") {
            out.config.follow_up_days = parse_double(value, source_name, i + 1, key);
        } else if (key == "seed") {
            out.config.seed =
                static_cast<std::uint64_t>(parse_count(value, source_name, i + 1, key));
        } else if (key == "replicates") {
            out.replicates = static_cast<int>(parse_count(value, source_name, i + 1, key));
        } else {
            fail(source_name, i + 1, "unknown key '" + key + "'");
        }
    }
    validate_config(out.config);
    return out;
}

SimConfigFile read_sim_config(const std::string& path) {
    return parse_sim_config(read_file(path), path);
}

} // namespace mortkit
