#include "mortkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mortkit/errors.hpp"
#include "mortkit/version.hpp"

namespace mortkit {

namespace {

double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

double pct1(double fraction) { return round_to(fraction * 100.0, 1); }

nlohmann::json rounded_test(const TestResult& r) {
    nlohmann::json j;
    j["statistic"] = r.statistic; // full precision; not a percentage/correlation/p-value
    j["p_value"] = round_to(r.p_value, 4);
    j["method"] = r.method;
    j["n"] = r.n;
    return j;
}

struct CountryRows {
    Country country;
    std::vector<PublisherCounts> rows;
};

std::vector<CountryRows> group_by_country(const std::vector<PublisherCounts>& rows) {
    std::vector<CountryRows> groups;
    for (const PublisherCounts& row : rows) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const CountryRows& g) { return g.country == row.country; });
        if (it == groups.end()) {
            groups.push_back({row.country, {row}});
        } else {
            it->rows.push_back(row);
        }
    }
    return groups;
}

} // namespace

void to_json(nlohmann::json& j, const TestResult& r) {
    j = nlohmann::json{
        {"statistic", r.statistic}, {"p_value", r.p_value}, {"method", r.method}, {"n", r.n}};
}

void to_json(nlohmann::json& j, const CoxFit& fit) {
    j = nlohmann::json{{"coefficients", fit.coefficients},
                       {"hazard_ratios", fit.hazard_ratios},
                       {"standard_errors", fit.standard_errors},
                       {"log_partial_likelihood", fit.log_partial_likelihood},
                       {"iterations", fit.iterations},
                       {"converged", fit.converged}};
}

void to_json(nlohmann::json& j, const BiasResult& r) {
    j = nlohmann::json{{"hr_clean", r.hr_clean},
                       {"hr_contaminated", r.hr_contaminated},
                       {"replicates", r.replicates},
                       {"mean_inflation", r.mean_inflation},
                       {"inflation_se", r.inflation_se},
                       {"failed_replicates", r.failed_replicates}};
}

void to_json(nlohmann::json& j, const AggregateReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [name, proportion] : r.per_publisher) {
        per.push_back({{"name", name}, {"incorrect_proportion", proportion}});
    }
    j = nlohmann::json{{"macro_average", r.macro_average},
                       {"macro_sample_std", r.macro_sample_std},
                       {"pooled", r.pooled},
                       {"per_publisher", per}};
}

void to_json(nlohmann::json& j, const SurvivalStep& s) {
    j = nlohmann::json{
        {"t", s.time}, {"d", s.deaths}, {"n", s.at_risk}, {"s", s.estimate}, {"var", s.variance}};
}

void to_json(nlohmann::json& j, const IndicatorCounts& c) {
    j = nlohmann::json{{"any_prior", c.any_prior},
                       {"within_28", c.within_28},
                       {"within_60_or_cert", c.within_60_or_cert}};
}

nlohmann::json curve_to_json(const SurvivalCurve& curve) {
    nlohmann::json steps = nlohmann::json::array();
    for (const SurvivalStep& s : curve.steps) steps.push_back(s);
    return steps;
}

nlohmann::json build_analysis_report(const std::vector<PublisherCounts>& rows) {
    if (rows.empty()) throw InvalidInput("no publisher rows to analyze");
    for (const PublisherCounts& row : rows) {
        if (total_articles(row) <= 0) {
            throw NoArticles("publisher '" + row.name + "' has no articles");
        }
    }

    nlohmann::json report;
    report["toolkit_version"] = kVersion;
    nlohmann::json notes = nlohmann::json::array();
    nlohmann::json countries;

    std::vector<std::pair<Country, std::vector<double>>> proportions_by_country;
    for (const CountryRows& group : group_by_country(rows)) {
        const std::string cname = to_string(group.country);
        nlohmann::json cj;
        nlohmann::json publishers = nlohmann::json::array();
        std::vector<double> props, totals, incorrects;
        for (const PublisherCounts& p : group.rows) {
            const double prop = incorrect_proportion(p);
            props.push_back(prop);
            totals.push_back(static_cast<double>(total_articles(p)));
            incorrects.push_back(static_cast<double>(incorrect_articles(p)));
            publishers.push_back({{"name", p.name},
                                  {"medium", to_string(p.medium)},
                                  {"with", p.with_count},
                                  {"from", p.from_count},
                                  {"of", p.of_count},
                                  {"total", total_articles(p)},
                                  {"incorrect", incorrect_articles(p)},
                                  {"incorrect_proportion_pct", pct1(prop)}});
        }
        cj["publishers"] = publishers;
        cj["n_publishers"] = group.rows.size();

        nlohmann::json precise;
        const double pooled = pooled_proportion(group.rows);
        cj["pooled_pct"] = pct1(pooled);
        precise["pooled"] = pooled;
        precise["per_publisher_proportions"] = props;

        if (group.rows.size() >= 2) {
            const auto [mean, sd] = macro_average(group.rows);
            cj["macro_average_pct"] = pct1(mean);
            cj["macro_sample_std_pct"] = pct1(sd);
            precise["macro_average"] = mean;
            precise["macro_sample_std"] = sd;
        } else {
            cj["macro_average_pct"] = nullptr;
            cj["macro_sample_std_pct"] = nullptr;
            notes.push_back(cname + ": insufficient data for macro average (need >= 2 publishers)");
        }

        bool fit_ok = false;
        LogNormalParams fitted;
        try {
            fitted = fit_lognormal(props);
            fit_ok = true;
        } catch (const Error& e) {
            cj["lognormal_fit"] = nullptr;
            cj["ks_lognormal"] = nullptr;
            notes.push_back(cname + ": log-normal fit skipped (" + e.what() + ")");
        }
        if (fit_ok) {
            cj["lognormal_fit"] = {{"mu", fitted.mu}, {"sigma", fitted.sigma}};
            const TestResult ks = ks_one_sample(props, fitted, true);
            cj["ks_lognormal"] = rounded_test(ks);
            precise["ks_lognormal_p"] = ks.p_value;
            // Companion check: log-proportions against an unfitted standard
            // normal, equivalent to proportions against log-normal(0, 1).
            const TestResult ks_std = ks_one_sample(props, LogNormalParams{0.0, 1.0}, false);
            cj["ks_standard_normal_on_logs"] = rounded_test(ks_std);
            precise["ks_standard_normal_on_logs_p"] = ks_std.p_value;
        }

        if (group.rows.size() >= 2) {
            try {
                const double rho = pearson(totals, incorrects);
                cj["pearson_total_incorrect"] = round_to(rho, 3);
                precise["pearson_total_incorrect"] = rho;
            } catch (const Error& e) {
                cj["pearson_total_incorrect"] = nullptr;
                notes.push_back(cname + ": Pearson (total, incorrect) skipped (" +
                                std::string(e.what()) + ")");
            }
            try {
                std::vector<double> log_totals, log_incorrects;
                for (double v : totals) log_totals.push_back(std::log(v));
                for (double v : incorrects) log_incorrects.push_back(std::log(v));
                const double rho_log = pearson(log_totals, log_incorrects);
                cj["pearson_log_total_log_incorrect"] = round_to(rho_log, 3);
                precise["pearson_log_total_log_incorrect"] = rho_log;
            } catch (const Error& e) {
                cj["pearson_log_total_log_incorrect"] = nullptr;
                notes.push_back(cname + ": Pearson on log counts skipped (" +
                                std::string(e.what()) + ")");
            }
            try {
                const double rho_prop = pearson(totals, props);
                // volume vs per-outlet *proportion*, a distinct relationship
                cj["pearson_total_proportion"] = round_to(rho_prop, 3);
                precise["pearson_total_proportion"] = rho_prop;
            } catch (const Error& e) {
                cj["pearson_total_proportion"] = nullptr;
                notes.push_back(cname + ": Pearson (total, proportion) skipped (" +
                                std::string(e.what()) + ")");
            }
        } else {
            cj["pearson_total_incorrect"] = nullptr;
            cj["pearson_log_total_log_incorrect"] = nullptr;
            cj["pearson_total_proportion"] = nullptr;
            notes.push_back(cname + ": insufficient data for correlations");
        }

        cj["precise"] = precise;
        countries[cname] = cj;
        proportions_by_country.push_back({group.country, props});
    }
    report["countries"] = countries;

    nlohmann::json cross;
    if (proportions_by_country.size() == 2) {
        const TestResult ks2 = ks_two_sample(proportions_by_country[0].second,
                                             proportions_by_country[1].second);
        cross["ks_two_sample"] = rounded_test(ks2);
        cross["samples"] = {to_string(proportions_by_country[0].first),
                            to_string(proportions_by_country[1].first)};
        cross["precise"] = {{"p_value", ks2.p_value}};
    } else {
        cross = nullptr;
        notes.push_back("cross-country comparison needs exactly 2 countries");
    }
    report["cross_country"] = cross;
    report["notes"] = notes;
    return report;
}

std::vector<CountryScatter> scatter_series(const std::vector<PublisherCounts>& rows) {
    std::vector<CountryScatter> out;
    for (const CountryRows& group : group_by_country(rows)) {
        CountryScatter s;
        s.country = group.country;
        for (const PublisherCounts& p : group.rows) {
            s.points.push_back({static_cast<double>(total_articles(p)),
                                static_cast<double>(incorrect_articles(p)), p.name});
        }
        if (s.points.size() >= 2) {
            const auto [intercept, slope] = least_squares(s.points);
            s.intercept = intercept;
            s.slope = slope;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string scatter_to_csv(const CountryScatter& scatter) {
    std::ostringstream out;
    out << "name,total,incorrect,fit_incorrect\n";
    for (const ScatterPoint& p : scatter.points) {
        char fit[48];
        std::snprintf(fit, sizeof(fit), "%.6f", scatter.intercept + scatter.slope * p.x);
        out << p.label << ',' << static_cast<long long>(p.x) << ','
            << static_cast<long long>(p.y) << ',' << fit << '\n';
    }
    return out.str();
}

std::string render_text_report(const nlohmann::json& report) {
    std::ostringstream out;
    char buf[160];
    for (const auto& [cname, cj] : report.at("countries").items()) {
        out << "Country: " << cname << " (" << cj.at("n_publishers").get<std::size_t>()
            << " publishers)\n";
        std::snprintf(buf, sizeof(buf), "  %-20s %10s %10s %12s\n", "publisher", "total",
                      "incorrect", "proportion");
        out << buf;
        for (const auto& p : cj.at("publishers")) {
            std::snprintf(buf, sizeof(buf), "  %-20s %10lld %10lld %11.1f%%\n",
                          p.at("name").get<std::string>().c_str(),
                          p.at("total").get<long long>(), p.at("incorrect").get<long long>(),
                          p.at("incorrect_proportion_pct").get<double>());
            out << buf;
        }
        if (!cj.at("macro_average_pct").is_null()) {
            std::snprintf(buf, sizeof(buf),
                          "  macro average: %.1f%%  (sample std %.1f%%)\n",
                          cj.at("macro_average_pct").get<double>(),
                          cj.at("macro_sample_std_pct").get<double>());
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "  pooled:        %.1f%%\n",
                      cj.at("pooled_pct").get<double>());
        out << buf;
        if (!cj.at("ks_lognormal").is_null()) {
            std::snprintf(buf, sizeof(buf),
                          "  KS vs fitted log-normal:        D=%.4f  p=%.4f\n",
                          cj.at("ks_lognormal").at("statistic").get<double>(),
                          cj.at("ks_lognormal").at("p_value").get<double>());
            out << buf;
            std::snprintf(buf, sizeof(buf),
                          "  KS logs vs standard normal:     D=%.4f  p=%.4f\n",
                          cj.at("ks_standard_normal_on_logs").at("statistic").get<double>(),
                          cj.at("ks_standard_normal_on_logs").at("p_value").get<double>());
            out << buf;
        }
        if (!cj.at("pearson_total_incorrect").is_null()) {
            std::snprintf(buf, sizeof(buf), "  Pearson (total, incorrect):     %.3f\n",
                          cj.at("pearson_total_incorrect").get<double>());
            out << buf;
        }
        if (!cj.at("pearson_log_total_log_incorrect").is_null()) {
            std::snprintf(buf, sizeof(buf), "  Pearson (log total, log inc.):  %.3f\n",
                          cj.at("pearson_log_total_log_incorrect").get<double>());
            out << buf;
        }
        if (!cj.at("pearson_total_proportion").is_null()) {
            std::snprintf(buf, sizeof(buf), "  Pearson (total, proportion):    %.3f\n",
                          cj.at("pearson_total_proportion").get<double>());
            out << buf;
        }
        out << '\n';
    }
    if (!report.at("cross_country").is_null()) {
        const auto& ks2 = report.at("cross_country").at("ks_two_sample");
        std::snprintf(buf, sizeof(buf), "Two-sample KS across countries: D=%.4f  p=%.4f\n",
                      ks2.at("statistic").get<double>(), ks2.at("p_value").get<double>());
        out << buf;
    }
    for (const auto& note : report.at("notes")) {
        out << "note: " << note.get<std::string>() << '\n';
    }
    return out.str();
}

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = nlohmann::json{{"command", m.command},
                       {"inputs", m.inputs},
                       {"outputs", m.outputs},
                       {"toolkit_version", m.toolkit_version},
                       {"timestamp", m.timestamp}};
}

} // namespace mortkit
