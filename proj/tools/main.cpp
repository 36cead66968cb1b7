#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mortkit/cohort_sim.hpp"
#include "mortkit/cox.hpp"
#include "mortkit/csv_io.hpp"
#include "mortkit/errors.hpp"
#include "mortkit/media.hpp"
#include "mortkit/report.hpp"
#include "mortkit/survival.hpp"
#include "mortkit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("MORTKIT_LOG");
    if (env == nullptr) return LogLevel::Quiet;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Quiet;
}

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::Info) std::cerr << "[mortkit] " << message << '\n';
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// A buffered output file: nothing touches the filesystem until commit(), so a
// failed command leaves no partial outputs behind.
struct PendingOutputs {
    std::vector<std::pair<std::string, std::string>> files;

    void add(const std::string& path, const std::string& content) {
        files.push_back({path, content});
    }
    std::vector<std::string> paths() const {
        std::vector<std::string> out;
        for (const auto& [p, _] : out_pairs()) out.push_back(p);
        return out;
    }
    const std::vector<std::pair<std::string, std::string>>& out_pairs() const { return files; }
    void commit() const {
        for (const auto& [path, content] : files) {
            const fs::path parent = fs::path(path).parent_path();
            if (!parent.empty()) fs::create_directories(parent);
            mortkit::write_file(path, content);
            log_info("wrote " + path);
        }
    }
};

void write_manifest(const std::string& command, const std::vector<std::string>& inputs,
                    PendingOutputs& outputs, const std::string& manifest_path) {
    mortkit::RunManifest manifest;
    manifest.command = command;
    manifest.inputs = inputs;
    manifest.outputs = outputs.paths();
    manifest.outputs.push_back(manifest_path);
    manifest.toolkit_version = mortkit::kVersion;
    manifest.timestamp = timestamp_now();
    outputs.add(manifest_path, json(manifest).dump(2) + "\n");
}

int run_analyze(const std::vector<std::string>& csv_paths, const std::string& out_dir,
                const std::string& format) {
    std::vector<mortkit::PublisherCounts> rows;
    for (const std::string& path : csv_paths) {
        const std::vector<mortkit::PublisherCounts> file_rows = mortkit::read_counts_csv(path);
        for (std::size_t i = 0; i < file_rows.size(); ++i) {
            if (mortkit::total_articles(file_rows[i]) <= 0) {
                throw mortkit::InvalidInput(path + ", row " + std::to_string(i + 2) +
                                            ": publisher '" + file_rows[i].name +
                                            "' has no articles");
            }
        }
        rows.insert(rows.end(), file_rows.begin(), file_rows.end());
        log_info("read " + std::to_string(file_rows.size()) + " rows from " + path);
    }

    const json report = mortkit::build_analysis_report(rows);
    const std::string text = mortkit::render_text_report(report);

    PendingOutputs outputs;
    const fs::path dir(out_dir);
    outputs.add((dir / "report.json").string(), report.dump(2) + "\n");
    outputs.add((dir / "report.txt").string(), text);
    for (const mortkit::CountryScatter& s : mortkit::scatter_series(rows)) {
        std::string cc = mortkit::to_string(s.country);
        std::transform(cc.begin(), cc.end(), cc.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        const std::string title = mortkit::to_string(s.country) +
                                  ": incorrect vs total articles";
        outputs.add((dir / ("scatter_" + cc + ".csv")).string(), mortkit::scatter_to_csv(s));
        outputs.add((dir / ("scatter_" + cc + ".svg")).string(),
                    mortkit::svg_scatter(title, "total articles", "incorrectly phrased articles",
                                         s.points, s.intercept, s.slope));
    }
    write_manifest("analyze", csv_paths, outputs, (dir / "manifest.json").string());
    outputs.commit();

    if (format == "json") {
        std::cout << report.dump(2) << '\n';
    } else if (format == "csv") {
        std::cout << mortkit::counts_to_csv(rows);
    } else {
        std::cout << text;
    }
    return kExitOk;
}

int run_scan(const std::string& corpus_dir, const std::string& out_csv,
             const std::string& country_name, const std::string& medium_name,
             const std::string& format) {
    if (!fs::is_directory(corpus_dir)) {
        throw mortkit::InvalidInput("corpus directory '" + corpus_dir + "' does not exist");
    }
    const mortkit::Country country = mortkit::parse_country(country_name);
    const mortkit::Medium medium = mortkit::parse_medium(medium_name);

    std::vector<std::string> publishers;
    for (const fs::directory_entry& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.is_directory()) publishers.push_back(entry.path().filename().string());
    }
    std::sort(publishers.begin(), publishers.end());

    std::vector<mortkit::PublisherCounts> rows;
    std::size_t total_skipped = 0;
    for (const std::string& publisher : publishers) {
        std::vector<std::string> names;
        for (const fs::directory_entry& entry :
             fs::directory_iterator(fs::path(corpus_dir) / publisher)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                names.push_back(entry.path().string());
            }
        }
        std::sort(names.begin(), names.end());
        std::vector<std::string> documents;
        for (const std::string& name : names) documents.push_back(mortkit::read_file(name));

        const mortkit::ScanResult scan =
            mortkit::phrase_scan(publisher, country, medium, documents);
        for (std::size_t idx : scan.skipped_documents) {
            std::cerr << "warning: skipped undecodable document " << names[idx] << '\n';
        }
        total_skipped += scan.skipped_documents.size();
        rows.push_back(scan.counts);
    }
    if (total_skipped > 0) {
        std::cerr << "warning: " << total_skipped << " document(s) skipped\n";
    }

    const std::string csv = mortkit::counts_to_csv(rows);
    PendingOutputs outputs;
    outputs.add(out_csv, csv);
    write_manifest("scan", {corpus_dir}, outputs, out_csv + ".manifest.json");
    outputs.commit();

    if (format == "json") {
        json j = json::array();
        for (const mortkit::PublisherCounts& p : rows) {
            j.push_back({{"name", p.name},
                         {"country", mortkit::to_string(p.country)},
                         {"medium", mortkit::to_string(p.medium)},
                         {"with", p.with_count},
                         {"from", p.from_count},
                         {"of", p.of_count}});
        }
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << csv;
    }
    return kExitOk;
}

int run_km(const std::string& cohort_csv, const std::string& out_prefix,
           const std::string& format) {
    const mortkit::CohortCsv input = mortkit::read_cohort_csv(cohort_csv);
    double x_max = 0.0;
    for (const mortkit::Subject& s : input.cohort.subjects) {
        x_max = std::max(x_max, s.observed_time);
    }

    // With a binary first covariate the file describes two groups; plot both.
    std::vector<mortkit::LabelledCurve> curves;
    bool grouped = false;
    if (!input.covariate_names.empty()) {
        grouped = std::all_of(input.cohort.subjects.begin(), input.cohort.subjects.end(),
                              [](const mortkit::Subject& s) {
                                  return s.covariates[0] == 0.0 || s.covariates[0] == 1.0;
                              });
    }
    if (grouped) {
        mortkit::Cohort group0, group1;
        group0.label = input.covariate_names[0] + "=0";
        group1.label = input.covariate_names[0] + "=1";
        for (const mortkit::Subject& s : input.cohort.subjects) {
            (s.covariates[0] == 1.0 ? group1 : group0).subjects.push_back(s);
        }
        if (!group0.subjects.empty() && !group1.subjects.empty()) {
            curves.push_back({group0.label, mortkit::kaplan_meier(group0)});
            curves.push_back({group1.label, mortkit::kaplan_meier(group1)});
        }
    }
    if (curves.empty()) {
        curves.push_back({input.cohort.label, mortkit::kaplan_meier(input.cohort)});
    }

    PendingOutputs outputs;
    json curves_json = json::array();
    for (const mortkit::LabelledCurve& lc : curves) {
        curves_json.push_back(
            {{"label", lc.label}, {"steps", mortkit::curve_to_json(lc.curve)},
             {"degenerate_step", lc.curve.degenerate_step}});
    }
    outputs.add(out_prefix + ".json", curves_json.dump(2) + "\n");
    outputs.add(out_prefix + ".csv", mortkit::curve_to_csv(curves.front().curve));
    if (curves.size() > 1) {
        outputs.add(out_prefix + "_group1.csv", mortkit::curve_to_csv(curves.back().curve));
    }
    outputs.add(out_prefix + ".svg",
                mortkit::svg_survival("Kaplan-Meier survival estimate", curves, x_max));
    write_manifest("km", {cohort_csv}, outputs, out_prefix + ".manifest.json");
    outputs.commit();

    if (format == "json") {
        std::cout << curves_json.dump(2) << '\n';
    } else if (format == "csv") {
        std::cout << mortkit::curve_to_csv(curves.front().curve);
    } else {
        for (const mortkit::LabelledCurve& lc : curves) {
            std::cout << lc.label << ": " << lc.curve.steps.size() << " steps, s(end)="
                      << (lc.curve.steps.empty() ? 1.0 : lc.curve.steps.back().estimate) << '\n';
        }
    }
    return kExitOk;
}

int run_cox(const std::string& cohort_csv, const std::string& out_json,
            const std::string& format) {
    const mortkit::CohortCsv input = mortkit::read_cohort_csv(cohort_csv);
    if (input.covariate_names.empty()) {
        throw mortkit::InvalidInput(cohort_csv + ": no covariate columns (x1,...) in header");
    }
    const mortkit::CoxFit fit =
        mortkit::cox_fit(input.cohort, mortkit::CovariateSpec{input.covariate_names});

    json j = fit;
    j["covariates"] = input.covariate_names;

    PendingOutputs outputs;
    outputs.add(out_json, j.dump(2) + "\n");
    write_manifest("cox", {cohort_csv}, outputs, out_json + ".manifest.json");
    outputs.commit();

    if (format == "text") {
        for (std::size_t k = 0; k < input.covariate_names.size(); ++k) {
            std::printf("%-12s coef=%+.6f  HR=%.6f  SE=%.6f\n",
                        input.covariate_names[k].c_str(), fit.coefficients[k],
                        fit.hazard_ratios[k], fit.standard_errors[k]);
        }
        std::printf("log partial likelihood: %.6f  iterations: %d  converged: %s\n",
                    fit.log_partial_likelihood, fit.iterations, fit.converged ? "yes" : "no");
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& out_json, int replicates_flag,
                 long long seed_flag, bool seed_given, const std::string& emit_records,
                 const std::string& records_csv, const std::string& format) {
    mortkit::SimConfigFile file = mortkit::read_sim_config(config_path);
    if (seed_given) file.config.seed = static_cast<std::uint64_t>(seed_flag);
    int replicates = replicates_flag > 0 ? replicates_flag : file.replicates;
    if (replicates <= 0) replicates = 200;

    log_info("running bias experiment with " + std::to_string(replicates) + " replicates");
    const mortkit::BiasResult bias = mortkit::bias_experiment(file.config, replicates);

    // indicators from supplied records, or from one realization at the base seed
    std::vector<mortkit::DeathRecord> records;
    std::string records_source;
    const mortkit::SimCohorts realization = mortkit::generate_cohorts(file.config);
    if (!records_csv.empty()) {
        records = mortkit::read_death_records_csv(records_csv);
        records_source = records_csv;
    } else {
        records = mortkit::death_records(realization);
        records_source = "simulated";
    }
    const mortkit::IndicatorCounts indicators = mortkit::england_indicators(records);

    json j;
    j["bias_experiment"] = bias;
    j["england_indicators"] = indicators;
    j["indicator_records"] = records_source;
    j["n_death_records"] = records.size();
    j["seed"] = file.config.seed;
    j["replicates_requested"] = replicates;

    PendingOutputs outputs;
    outputs.add(out_json, j.dump(2) + "\n");
    std::vector<std::string> inputs = {config_path};
    if (!records_csv.empty()) inputs.push_back(records_csv);
    if (!emit_records.empty()) {
        outputs.add(emit_records,
                    mortkit::death_records_to_csv(mortkit::death_records(realization)));
    }
    write_manifest("simulate", inputs, outputs, out_json + ".manifest.json");
    outputs.commit();

    if (format == "text") {
        std::printf("hr_clean=%.4f  hr_contaminated=%.4f  mean_inflation=%+.4f (se %.4f)\n",
                    bias.hr_clean, bias.hr_contaminated, bias.mean_inflation, bias.inflation_se);
        std::printf("replicates: %d ok, %d failed\n", bias.replicates, bias.failed_replicates);
        std::printf("indicators: any_prior=%ld within_28=%ld within_60_or_cert=%ld\n",
                    indicators.any_prior, indicators.within_28, indicators.within_60_or_cert);
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Survival-analysis and mortality-reporting toolkit"};
    app.set_version_flag("--version", mortkit::kVersion);
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string out;
    std::string format = "text";
    long long seed_flag = 0;
    bool seed_given = false;
    app.add_option("--out", out, "Output path (directory, file, or prefix per command)")
        ->required();
    app.add_option("--format", format, "Stdout format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    auto* seed_opt = app.add_option("--seed", seed_flag, "Override the simulation seed");

    auto* analyze = app.add_subcommand("analyze", "Aggregate publisher phrase counts");
    std::vector<std::string> counts_csvs;
    analyze->add_option("csv", counts_csvs, "Counts CSV file(s)")->required();

    auto* scan = app.add_subcommand("scan", "Count phrases in a corpus directory");
    std::string corpus_dir, scan_country = "UK", scan_medium = "newspaper";
    scan->add_option("corpus", corpus_dir, "Directory of per-publisher subdirectories")
        ->required();
    scan->add_option("--country", scan_country, "Country tag for scanned publishers")
        ->check(CLI::IsMember({"UK", "USA"}));
    scan->add_option("--medium", scan_medium, "Medium tag for scanned publishers")
        ->check(CLI::IsMember({"newspaper", "tv"}));

    auto* km = app.add_subcommand("km", "Kaplan-Meier curve from a cohort CSV");
    std::string km_csv;
    km->add_option("cohort", km_csv, "Cohort CSV")->required();

    auto* cox = app.add_subcommand("cox", "Cox proportional-hazards fit from a cohort CSV");
    std::string cox_csv;
    cox->add_option("cohort", cox_csv, "Cohort CSV")->required();

    auto* simulate = app.add_subcommand("simulate", "Contamination bias experiment");
    std::string sim_config, emit_records, records_csv;
    int replicates = 0;
    simulate->add_option("config", sim_config, "key=value simulation config")->required();
    simulate->add_option("--replicates", replicates, "Number of replicates (default 200)");
    simulate->add_option("--emit-records", emit_records,
                         "Also write simulated death records to this CSV");
    simulate->add_option("--records", records_csv,
                         "Compute England indicators from this death-record CSV instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return kExitInputError;
    }
    seed_given = seed_opt->count() > 0;

    try {
        if (analyze->parsed()) return run_analyze(counts_csvs, out, format);
        if (scan->parsed()) return run_scan(corpus_dir, out, scan_country, scan_medium, format);
        if (km->parsed()) return run_km(km_csv, out, format);
        if (cox->parsed()) return run_cox(cox_csv, out, format);
        if (simulate->parsed()) {
            return run_simulate(sim_config, out, replicates, seed_flag, seed_given, emit_records,
                                records_csv, format);
        }
    } catch (const mortkit::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mortkit::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mortkit::NoArticles& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mortkit::InsufficientData& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mortkit::Error& e) {
        // numerical failures: divergence, degenerate data, failed experiments
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
