// End-to-end checks of the installed command surface: subcommands, flags,
// artifact files and exit codes (0 ok, 2 config error, 3 data error).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef PKIFLOW_CLI
#error "PKIFLOW_CLI must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
    int exit_code;
    std::string output;
};

Run run_cli(const std::string& args) {
    std::string out_path = (fs::temp_directory_path() / "pkiflow_cli_out.txt").string();
    std::string cmd = std::string(PKIFLOW_CLI) + " " + args + " > " + out_path + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    int code = -1;
    if (WIFEXITED(status)) code = WEXITSTATUS(status);
    return {code, buf.str()};
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

const char* kSmallConfig = R"({
  "seed": 3,
  "synthetic": {
    "class_names": ["A", "B"],
    "train_counts": [80, 90],
    "test_counts": [20, 20],
    "n_features": 4,
    "separation": 7.0
  },
  "methods": {"supervised": ["dt"], "selection": ["anova"], "unsupervised": ["kmeans"]},
  "sweeps": {"cluster_k_max": 3, "max_stack": 2}
})";

} // namespace

TEST_CASE("cli: no subcommand fails with usage") {
    Run r = run_cli("");
    CHECK(r.exit_code != 0);
}

TEST_CASE("cli: synth then full ladder then score and report") {
    fs::path dir = fresh_dir("pkiflow_cli_case");
    write_file(dir / "config.json", kSmallConfig);

    Run synth = run_cli("synth --config " + (dir / "config.json").string() + " --out " +
                        (dir / "data").string());
    CHECK(synth.exit_code == 0);
    CHECK(fs::exists(dir / "data" / "train.csv"));
    CHECK(fs::exists(dir / "data" / "test.csv"));

    Run pki = run_cli("pki --config " + (dir / "config.json").string() + " --out " +
                      (dir / "run").string() + " --jobs 2");
    CHECK(pki.exit_code == 0);
    CHECK(fs::exists(dir / "run" / "report.json"));
    CHECK(fs::exists(dir / "run" / "pki_kmeans_dt.model.json"));
    CHECK(fs::exists(dir / "run" / "comparison.csv"));

    Run score = run_cli("score " + (dir / "run" / "pki_kmeans_dt.model.json").string() + " " +
                        (dir / "data" / "test.csv").string() + " --out " +
                        (dir / "scored").string());
    CHECK(score.exit_code == 0);
    CHECK(fs::exists(dir / "scored" / "predictions.csv"));
    CHECK(fs::exists(dir / "scored" / "score_report.txt"));
    CHECK(score.output.find("M Avg") != std::string::npos);

    Run report = run_cli("report " + (dir / "run" / "report.json").string() + " --format csv" +
                         " --out " + (dir / "rendered").string());
    CHECK(report.exit_code == 0);
    CHECK(fs::exists(dir / "rendered" / "comparison.csv"));
}

TEST_CASE("cli: config errors exit 2") {
    fs::path dir = fresh_dir("pkiflow_cli_cfg");
    write_file(dir / "bad.json", R"({"unknown_option": 1})");
    Run r = run_cli("baseline --config " + (dir / "bad.json").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("config error") != std::string::npos);

    // ingest without csv paths is a config problem too
    write_file(dir / "synth_only.json", kSmallConfig);
    Run ingest = run_cli("ingest --config " + (dir / "synth_only.json").string());
    CHECK(ingest.exit_code == 2);
}

TEST_CASE("cli: data errors exit 3") {
    fs::path dir = fresh_dir("pkiflow_cli_data");
    write_file(dir / "train.csv", "a,b,Label\n1,2,A\n3,bogus,B\n");
    write_file(dir / "test.csv", "a,b,Label\n1,2,A\n");
    std::string config = std::string(R"({"data": {"train_csv": ")") +
                         (dir / "train.csv").string() + R"(", "test_csv": ")" +
                         (dir / "test.csv").string() + R"("}})";
    write_file(dir / "config.json", config);
    Run r = run_cli("ingest --config " + (dir / "config.json").string() + " --out " +
                    (dir / "out").string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("data error") != std::string::npos);
}

TEST_CASE("cli: ingest produces sanitized csv and provenance log") {
    fs::path dir = fresh_dir("pkiflow_cli_ingest");
    write_file(dir / "train.csv",
               "Flow ID,Src IP,dur,rate,Label\nf1,10.0.0.1,1.5,Infinity,NT\nf2,10.0.0.2,2.5,3.5,DE\n");
    write_file(dir / "test.csv", "Flow ID,Src IP,dur,rate,Label\nf3,10.0.0.3,2.0,NaN,NT\n");
    std::string config = std::string(R"({"data": {"train_csv": ")") +
                         (dir / "train.csv").string() + R"(", "test_csv": ")" +
                         (dir / "test.csv").string() + R"("}})";
    write_file(dir / "config.json", config);
    Run r = run_cli("ingest --config " + (dir / "config.json").string() + " --out " +
                    (dir / "out").string());
    CHECK(r.exit_code == 0);
    std::ifstream clean(dir / "out" / "train_clean.csv");
    std::ostringstream buf;
    buf << clean.rdbuf();
    CHECK(buf.str() == "dur,rate,Label\n1.5,3.5,NT\n2.5,3.5,DE\n");
    std::ifstream log(dir / "out" / "train_sanitize.json");
    std::ostringstream logbuf;
    logbuf << log.rdbuf();
    CHECK(logbuf.str().find("\"rate\":{\"replaced\":1") != std::string::npos);
}

TEST_CASE("cli: seed override changes the provenance hash") {
    fs::path dir = fresh_dir("pkiflow_cli_seed");
    write_file(dir / "config.json", kSmallConfig);
    Run a = run_cli("baseline --config " + (dir / "config.json").string() + " --out " +
                    (dir / "a").string());
    Run b = run_cli("baseline --config " + (dir / "config.json").string() + " --seed 99 --out " +
                    (dir / "b").string());
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    std::ifstream ra(dir / "a" / "report.json"), rb(dir / "b" / "report.json");
    std::ostringstream sa, sb;
    sa << ra.rdbuf();
    sb << rb.rdbuf();
    CHECK(sa.str() != sb.str());
}
