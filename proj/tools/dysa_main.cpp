// dysa: command-line front end for the support-tool selection pipeline.

#include "dysa/commands.hpp"
#include "dysa/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw dysa::ConfigError("--difficulties: '" + cell + "' is not a number");
        }
    }
    return out;
}

dysa::ImputePolicy parse_impute(const std::string& s) {
    return s == "median" ? dysa::ImputePolicy::Median : dysa::ImputePolicy::DropRow;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-target classifier selection for survey-based support-tool recommendation"};
    app.require_subcommand(1);
    auto* config_opt = app.set_config("--config", "", "Declarative run file (TOML/INI); command-line flags win");

    // ingest
    dysa::IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate a survey file and write a dataset archive");
    c_ingest->add_option("--survey", ingest.survey, "Delimited survey file")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--catalog", ingest.catalog, "Catalog file (ID<TAB>label)")->check(CLI::ExistingFile);
    c_ingest->add_option("--max-missing-rate", ingest.max_missing_rate, "Targets missing above this rate are dropped")
        ->check(CLI::Range(0.0, 1.0));
    c_ingest->add_flag("--strict", ingest.strict, "Fail on the first malformed row instead of skipping it");
    c_ingest->add_option("--out", ingest.out, "Output directory")->required();

    // synth
    dysa::SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a planted synthetic survey and its manifest");
    c_synth->add_option("--plan", synth.plan, "Plant spec (JSON)")->check(CLI::ExistingFile);
    c_synth->add_option("--seed", synth.seed, "Random seed");
    c_synth->add_option("--students", synth.students, "Number of students");
    c_synth->add_option("--noise", synth.noise, "Label flip probability");
    c_synth->add_option("--out", synth.out, "Output directory")->required();

    // evaluate
    dysa::EvaluateOptions evaluate;
    std::string eval_inputs, eval_impute = "drop";
    auto* c_eval = app.add_subcommand("evaluate", "Run the 10-fold CV grid search over every active target");
    c_eval->add_option("--dataset", evaluate.dataset, "dataset.json archive or survey .csv")
        ->required()
        ->check(CLI::ExistingFile);
    c_eval->add_option("--grid", evaluate.grid, "Grid file (JSON)")->check(CLI::ExistingFile);
    c_eval->add_option("--seed", evaluate.seed, "Random seed")->required();
    c_eval->add_option("--jobs", evaluate.jobs, "Worker threads")->check(CLI::PositiveNumber);
    c_eval->add_option("--threshold", evaluate.threshold, "Only this threshold")->check(CLI::Range(0, 5));
    c_eval->add_option("--inputs", eval_inputs, "Only this input encoding")
        ->check(CLI::IsMember({"numeric", "binary"}));
    c_eval->add_option("--impute", eval_impute, "Missing difficulty policy")->check(CLI::IsMember({"drop", "median"}));
    bool no_models = false;
    c_eval->add_flag("--no-models", no_models, "Skip refitting the model registry");
    c_eval->add_option("--out", evaluate.out, "Output directory")->required();

    // report
    std::filesystem::path report_in, report_out;
    std::optional<std::filesystem::path> report_catalog;
    auto* c_report = app.add_subcommand("report", "Render tables and chart data from report.json");
    c_report->add_option("--report", report_in, "report.json")->required()->check(CLI::ExistingFile);
    c_report->add_option("--catalog", report_catalog, "Catalog file")->check(CLI::ExistingFile);
    c_report->add_option("--out", report_out, "Output directory")->required();

    // predict
    std::filesystem::path models;
    std::string difficulties;
    auto* c_predict = app.add_subcommand("predict", "Predict useful tools and strategies for one student");
    c_predict->add_option("--models", models, "models.json written by evaluate")->required()->check(CLI::ExistingFile);
    c_predict->add_option("--difficulties", difficulties, "Twelve comma-separated 0-5 values (P1..P12)")->required();

    // rosenberg-score
    std::filesystem::path answers;
    auto* c_ros = app.add_subcommand("rosenberg-score", "Score a Rosenberg self-esteem answer sheet");
    c_ros->add_option("--answers", answers, "Answers file")->required()->check(CLI::ExistingFile);

    // sessions
    std::filesystem::path table_dir, session_file;
    dysa::SessionFilter filter;
    std::string list_kind = "all";
    auto* c_sessions = app.add_subcommand("sessions", "Validate, import or list psychometric sessions");
    c_sessions->require_subcommand(1);
    auto* s_validate = c_sessions->add_subcommand("validate", "Check a session file without storing it");
    s_validate->add_option("file", session_file, "JSON-lines session file")->required()->check(CLI::ExistingFile);
    auto* s_import = c_sessions->add_subcommand("import", "Append a session file to the tables");
    s_import->add_option("--table-dir", table_dir, "Table directory")->required();
    s_import->add_option("file", session_file, "JSON-lines session file")->required()->check(CLI::ExistingFile);
    auto* s_list = c_sessions->add_subcommand("list", "List stored sessions");
    s_list->add_option("--table-dir", table_dir, "Table directory")->required();
    s_list->add_option("--user", filter.user_id, "User id");
    s_list->add_option("--environment", filter.environment, "Environment id");
    s_list->add_option("--from", filter.from, "Earliest start time (inclusive)");
    s_list->add_option("--to", filter.to, "Latest start time (inclusive)");
    s_list->add_option("--kind", list_kind, "all | silent_reading | rosenberg")
        ->check(CLI::IsMember({"all", "silent_reading", "rosenberg"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    std::optional<std::filesystem::path> config_file;
    if (config_opt->count() > 0) config_file = config_opt->as<std::string>();

    try {
        if (*c_ingest) {
            ingest.config_file = config_file;
            auto r = dysa::cmd_ingest(ingest);
            std::cout << "records: " << r.dataset.size() << ", rejected rows: " << r.rejected.size()
                      << ", active targets: " << r.dataset.active_targets().size() << "\n";
            for (const auto& [id, rate] : r.dataset.dropped_targets())
                std::cout << "dropped " << id << " (missing rate " << rate << ")\n";
            for (const auto& issue : r.rejected)
                std::cerr << "row " << issue.row << (issue.column.empty() ? "" : " column " + issue.column) << ": "
                          << issue.message << "\n";
        } else if (*c_synth) {
            synth.config_file = config_file;
            auto m = dysa::cmd_synth(synth);
            std::cout << "planted " << m.rules.size() << " targets for " << m.spec.n_students << " students -> "
                      << (synth.out / "survey.csv").string() << "\n";
        } else if (*c_eval) {
            evaluate.config_file = config_file;
            if (!eval_inputs.empty()) evaluate.inputs_binarized = eval_inputs == "binary";
            evaluate.impute = parse_impute(eval_impute);
            evaluate.write_models = !no_models;
            auto report = dysa::cmd_evaluate(evaluate);
            std::cout << dysa::render_summary(report);
            for (const auto& r : report.results)
                if (r.error) std::cerr << r.target << ": " << *r.error << "\n";
        } else if (*c_report) {
            for (const auto& p : dysa::cmd_report(report_in, report_out, report_catalog)) std::cout << p.string() << "\n";
        } else if (*c_predict) {
            auto x = parse_vector(difficulties);
            for (const auto& [target, label] : dysa::cmd_predict(models, x))
                std::cout << target << " " << (label ? "useful" : "not-useful") << "\n";
        } else if (*c_ros) {
            auto score = dysa::cmd_rosenberg_score(answers);
            std::cout << score.total << " " << dysa::to_string(score.band) << "\n";
        } else if (*c_sessions) {
            if (*s_validate) {
                bool ok = true;
                for (const auto& c : dysa::cmd_sessions_validate(session_file)) {
                    if (c.result.ok()) {
                        std::cout << "line " << c.line << " (" << c.type << "): pass\n";
                        continue;
                    }
                    ok = false;
                    for (const auto& v : c.result.violations)
                        std::cout << "line " << c.line << " (" << c.type << "): " << v.field << ": " << v.message << "\n";
                }
                return ok ? 0 : kExitData;
            }
            if (*s_import) {
                std::cout << "imported " << dysa::cmd_sessions_import(table_dir, session_file) << " records\n";
            } else {
                for (const auto& line : dysa::cmd_sessions_list(table_dir, filter, list_kind)) std::cout << line << "\n";
            }
        }
    } catch (const dysa::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dysa::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
