#include "fixtures.hpp"

#include "dysa/commands.hpp"
#include "dysa/error.hpp"
#include "dysa/registry.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace dysa;
using fixtures::TempDir;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
    std::string cmd = std::string(DYSA_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// Small planted survey and a one-threshold, two-learner grid.
struct SmallRun {
    TempDir dir{"cli"};
    std::filesystem::path survey, grid;

    SmallRun() {
        SynthOptions s;
        s.seed = 11;
        s.students = 120;
        s.out = dir / "synth";
        cmd_synth(s);
        survey = dir / "synth" / "survey.csv";
        grid = dir / "grid.json";
        Grid g;
        g.thresholds = {1};
        g.learners = {KnnSpec{5}, LogisticSpec{}};
        g.consensus = false;
        write_text(grid, g.to_json().dump());
    }

    EvaluateOptions options(const std::string& out) const {
        EvaluateOptions e;
        e.dataset = survey;
        e.grid = grid;
        e.seed = 3;
        e.out = dir / out;
        return e;
    }
};

}  // namespace

TEST_CASE("synth writes survey, manifest and run manifest") {
    TempDir dir("synth");
    SynthOptions s;
    s.seed = 4;
    s.students = 50;
    s.out = dir.path();
    auto m = cmd_synth(s);
    CHECK(m.spec.n_students == 50);
    CHECK(std::filesystem::exists(dir / "survey.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    auto rm = nlohmann::json::parse(fixtures::slurp(dir / "run_manifest.json"));
    CHECK(rm["command"] == "synth");
    CHECK(rm["seed"] == 4);
    CHECK(rm.contains("timestamp"));
}

TEST_CASE("synth without any seed is a configuration error") {
    TempDir dir("noseed");
    SynthOptions s;
    s.out = dir.path();
    CHECK_THROWS_AS(cmd_synth(s), ConfigError);
}

TEST_CASE("ingest drops the sparse target and archives the dataset") {
    SmallRun run;
    IngestOptions in;
    in.survey = run.survey;
    in.out = run.dir / "ingest";
    auto r = cmd_ingest(in);
    CHECK(r.dataset.active_targets().size() == 38);
    auto archived = dataset_from_json(nlohmann::json::parse(fixtures::slurp(run.dir / "ingest" / "dataset.json")));
    CHECK(archived == r.dataset);
}

TEST_CASE("evaluate is reproducible and predict only loads models") {
    SmallRun run;
    auto a = cmd_evaluate(run.options("a"));
    auto b = cmd_evaluate(run.options("b"));
    CHECK(a.results.size() == 38);
    for (auto f : {"report.json", "tools_table.txt", "strategies_table.txt", "tools_ccr.csv", "models.json"})
        CHECK(fixtures::slurp(run.dir / "a" / f) == fixtures::slurp(run.dir / "b" / f));

    auto reg = ModelRegistry::load(run.dir / "a" / "models.json");
    std::vector<double> zeros(12, 0.0);
    auto labels = cmd_predict(run.dir / "a" / "models.json", zeros);
    REQUIRE(labels.size() == reg.entries.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        CHECK(labels[i].first == reg.entries[i].target);
        CHECK(labels[i].second == reg.entries[i].predict(zeros));
    }
    std::vector<double> bad(12, 6.0);
    CHECK_THROWS_AS(cmd_predict(run.dir / "a" / "models.json", bad), DataError);

    auto re = cmd_report(run.dir / "a" / "report.json", run.dir / "re");
    CHECK(fixtures::slurp(run.dir / "re" / "tools_table.txt") == fixtures::slurp(run.dir / "a" / "tools_table.txt"));
    CHECK(!re.empty());
}

TEST_CASE("evaluate restricted to one encoding") {
    SmallRun run;
    auto opt = run.options("bin");
    opt.inputs_binarized = true;
    opt.write_models = false;
    auto rep = cmd_evaluate(opt);
    for (const auto& r : rep.results) CHECK(r.best_config.inputs_binarized);
    CHECK_FALSE(std::filesystem::exists(run.dir / "bin" / "models.json"));
    // The flag replaces the grid's thresholds.
    opt.threshold = 4;
    opt.out = run.dir / "thr4";
    for (const auto& r : cmd_evaluate(opt).results) CHECK(r.best_config.threshold == 4);
}

TEST_CASE("rosenberg score from an answers file") {
    TempDir dir("ros");
    write_text(dir / "max.txt",
               "strongly agree\nstrongly disagree\nstrongly agree\nstrongly agree\nstrongly disagree\n"
               "strongly disagree\nstrongly agree\nstrongly disagree\nstrongly disagree\nstrongly agree\n");
    auto s = cmd_rosenberg_score(dir / "max.txt");
    CHECK(s.total == 40);
    CHECK(s.band == SelfEsteemBand::High);
    CHECK(run_cli("rosenberg-score --answers " + (dir / "max.txt").string(), dir / "out.txt") == 0);
    CHECK(fixtures::slurp(dir / "out.txt") == "40 High\n");
    write_text(dir / "short.txt", "agree\nagree\n");
    CHECK(run_cli("rosenberg-score --answers " + (dir / "short.txt").string(), dir / "out.txt") == 3);
}

TEST_CASE("exit codes: usage 2, data 3") {
    TempDir dir("exit");
    CHECK(run_cli("", dir / "log") == 2);
    CHECK(run_cli("evaluate --out x", dir / "log") == 2);
    CHECK(run_cli("--help", dir / "log") == 0);
    write_text(dir / "bad.csv", "student_id,P1\nx,1\n");
    CHECK(run_cli("ingest --survey " + (dir / "bad.csv").string() + " --out " + (dir / "o").string(), dir / "log") == 3);
    CHECK(run_cli("predict --models " + (dir / "bad.csv").string() + " --difficulties 1,2", dir / "log") == 3);
    CHECK(run_cli("predict --models " + (dir / "bad.csv").string() + " --difficulties a,b", dir / "log") == 2);
}

TEST_CASE("config file supplies options and flags win") {
    SmallRun run;
    write_text(run.dir / "run.toml", "[evaluate]\nseed = 5\njobs = 2\nno-models = true\n");
    std::string common = "--config " + (run.dir / "run.toml").string() + " evaluate --dataset " + run.survey.string() +
                         " --grid " + run.grid.string();
    REQUIRE(run_cli(common + " --out " + (run.dir / "c1").string(), run.dir / "log") == 0);
    auto r1 = nlohmann::json::parse(fixtures::slurp(run.dir / "c1" / "report.json"));
    CHECK(r1["metadata"]["seed"] == 5);
    CHECK_FALSE(std::filesystem::exists(run.dir / "c1" / "models.json"));
    auto m1 = nlohmann::json::parse(fixtures::slurp(run.dir / "c1" / "run_manifest.json"));
    CHECK(m1["config_file"] == (run.dir / "run.toml").string());

    REQUIRE(run_cli(common + " --seed 9 --out " + (run.dir / "c2").string(), run.dir / "log") == 0);
    auto r2 = nlohmann::json::parse(fixtures::slurp(run.dir / "c2" / "report.json"));
    CHECK(r2["metadata"]["seed"] == 9);
}

TEST_CASE("sessions validate, import and list through the binary") {
    TempDir dir("sess");
    auto file = fixtures::source_dir() / "data" / "sessions_100.jsonl";
    CHECK(run_cli("sessions validate " + file.string(), dir / "log") == 0);
    CHECK(run_cli("sessions import --table-dir " + (dir / "db").string() + " " + file.string(), dir / "log") == 0);
    CHECK(run_cli("sessions list --table-dir " + (dir / "db").string() + " --user u1 --kind rosenberg", dir / "log") == 0);
    auto listed = fixtures::slurp(dir / "log");
    CHECK(!listed.empty());
    CHECK(listed.find("\"u2\"") == std::string::npos);

    write_text(dir / "bad.jsonl",
               R"({"type":"silent_reading","user_id":"u1","environment":"noisy_class","language":"Italian",)"
               R"("start_time":"2022-03-01T10:00:00Z","error_count":11,"interaction_times":[1,1,1],"voice_recognition_errors":0})"
               "\n");
    CHECK(run_cli("sessions validate " + (dir / "bad.jsonl").string(), dir / "log") == 3);
    auto log = fixtures::slurp(dir / "log");
    CHECK(log.find("error_count") != std::string::npos);
    CHECK(log.find("interaction_times") != std::string::npos);
}
