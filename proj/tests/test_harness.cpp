#include <catch2/catch_amalgamated.hpp>
#include <lowrank/lowrank.hpp>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using namespace lowrank;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("lowrank_harness_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

#ifdef LOWRANK_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("\"") + LOWRANK_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}
#endif

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n') ? 1 : 0;
    return n;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

} // namespace

TEST_CASE("experiment configs are validated field by field") {
    ExperimentConfig ok;
    CHECK_NOTHROW(validate(ok));
    ExperimentConfig bad = ok;
    bad.n = 0;
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.trials = 0;
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.success_quota = bad.trials + 1;
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.ranks = {2, 2};
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.ranks = {4, 2};
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.workers = 0;
    CHECK_THROWS_AS(validate(bad), parameter_error);
    bad = ok;
    bad.solver.rel_tol = 0.0;
    CHECK_THROWS_AS(validate(bad), parameter_error);
}

TEST_CASE("parallel for covers every index once and propagates failures") {
    std::vector<int> hits(97, 0);
    std::atomic<int> sum{0};
    parallel_for(hits.size(), 3, [&](std::size_t i) {
        hits[i] += 1;
        sum += static_cast<int>(i);
    });
    for (int h : hits) CHECK(h == 1);
    CHECK(sum == 96 * 97 / 2);
    CHECK_THROWS_AS(parallel_for(20, 4,
                                 [&](std::size_t i) {
                                     if (i == 7) throw numerical_error("boom");
                                 }),
                    numerical_error);
}

TEST_CASE("phase transition handles the single-cell grid exactly") {
    ExperimentConfig cfg;
    cfg.experiment = "phase";
    cfg.n = 16;
    cfg.ranks = {1};
    cfg.trials = 2;
    cfg.success_quota = 2;
    cfg.grid_step = 1.0; // grid collapses to {1.0}
    std::vector<TrialRecord> records;
    const PhaseCurve curve = phase_transition(cfg, &records);
    REQUIRE(curve.p_star.size() == 1);
    REQUIRE(curve.p_star[0].has_value());
    // p = 1 observes everything; recovery is exact and the cell passes
    CHECK(*curve.p_star[0] == 1.0);
    REQUIRE_FALSE(records.empty());
    for (const TrialRecord& rec : records) {
        CHECK(rec.experiment == "phase");
        CHECK(rec.n == 16);
        CHECK(rec.r == 1);
        CHECK(rec.p == 1.0);
        CHECK(rec.rel_error <= 1e-12);
        CHECK(rec.success);
    }
    // the reference line is (1/2) mu0 r ln(2n) / n with mu0 = 1 here
    REQUIRE(curve.reference.size() == 1);
    CHECK(curve.reference[0] == Catch::Approx(0.5 * std::log(32.0) / 16.0).epsilon(1e-9));
}

TEST_CASE("phase transition insists on ranks dividing n") {
    ExperimentConfig cfg;
    cfg.experiment = "phase";
    cfg.n = 10;
    cfg.ranks = {3};
    cfg.trials = 1;
    cfg.success_quota = 1;
    CHECK_THROWS_AS(phase_transition(cfg), parameter_error);
}

TEST_CASE("completion experiments fill records and the sample slot") {
    ExperimentConfig cfg;
    cfg.experiment = "complete";
    cfg.n = 30;
    cfg.rank = 2;
    cfg.p = 0.95;
    cfg.trials = 2;
    cfg.success_quota = 2;
    const ExperimentOutput out = run_experiment(cfg);
    REQUIRE(out.records.size() == 2);
    for (const TrialRecord& rec : out.records) {
        CHECK(rec.experiment == "complete");
        CHECK(rec.n == 30);
        CHECK(rec.r == 2);
        CHECK(rec.p == 0.95);
        CHECK(rec.success == (rec.rel_error <= kSuccessThreshold));
    }
    REQUIRE(out.sample_estimate.has_value());
    CHECK(out.sample_estimate->rows() == 30);
    CHECK(out.sample_estimate->cols() == 30);
    CHECK(out.sample_iterations > 0);
    // seeds differ across trials and are derived from the base seed
    CHECK(out.records[0].seed != out.records[1].seed);
}

TEST_CASE("experiment outputs are reproducible modulo wall time") {
    ExperimentConfig cfg;
    cfg.experiment = "complete";
    cfg.n = 24;
    cfg.rank = 2;
    cfg.p = 0.9;
    cfg.trials = 2;
    cfg.success_quota = 1;
    const ExperimentOutput a = run_experiment(cfg);
    const ExperimentOutput b = run_experiment(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].seed == b.records[i].seed);
        CHECK(a.records[i].rel_error == b.records[i].rel_error);
        CHECK(a.records[i].success == b.records[i].success);
        CHECK(a.records[i].extra == b.records[i].extra);
    }
}

TEST_CASE("certify experiments record verdicts without aborting campaigns") {
    ExperimentConfig cfg;
    cfg.experiment = "certify";
    cfg.n = 30;
    cfg.rank = 2;
    cfg.p = 0.5;
    cfg.trials = 1;
    cfg.success_quota = 1;
    const ExperimentOutput out = run_experiment(cfg);
    REQUIRE(out.records.size() == 1);
    REQUIRE(out.certificates.size() == 1);
    const TrialRecord& rec = out.records[0];
    for (const char* key : {"op_norm", "cond2a", "cond2b", "threshold_2b", "halving_ok",
                            "k0", "q", "stagnated"})
        CHECK(rec.extra.count(key) == 1);
    CHECK(rec.extra.at("k0") == std::ceil(20.0 * std::log(30.0)));
    // verdict semantics: rel_error is the 0/1 complement of all_pass
    CHECK(rec.rel_error == (out.certificates[0].all_pass() ? 0.0 : 1.0));
    CHECK(rec.success == out.certificates[0].all_pass());
}

TEST_CASE("unknown experiment names are rejected") {
    ExperimentConfig cfg;
    cfg.experiment = "waffles";
    CHECK_THROWS_AS(run_experiment(cfg), parameter_error);
}

TEST_CASE("records survive the csv round trip bit for bit") {
    TempDir tmp("csv");
    std::vector<TrialRecord> recs(3);
    recs[0].experiment = "complete";
    recs[0].n = 240;
    recs[0].r = 16;
    recs[0].p = 1.0 / 3.0;
    recs[0].seed = 0xdeadbeefcafeULL;
    recs[0].rel_error = 1e-300;
    recs[0].success = true;
    recs[0].wall_time = 0.1;
    recs[1].experiment = "phase";
    recs[1].n = 12;
    recs[1].r = 1;
    recs[1].p = 0.02;
    recs[1].seed = 1;
    recs[1].rel_error = 0.123456789012345678;
    recs[1].success = false;
    recs[1].wall_time = 3.5;
    recs[2].experiment = "certify";
    recs[2].n = 200;
    recs[2].r = 5;
    recs[2].p = 0.5;
    recs[2].seed = 20240601;
    recs[2].rel_error = 1.0;
    recs[2].success = false;
    recs[2].wall_time = 42.0;

    const fs::path path = tmp.path / "records.csv";
    write_records_csv(path, recs);
    const std::string text = slurp(path);
    CHECK(text.rfind(kRecordsCsvHeader, 0) == 0);
    CHECK(count_lines(text) == 4);

    const std::vector<TrialRecord> back = read_records_csv(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].experiment == recs[i].experiment);
        CHECK(back[i].n == recs[i].n);
        CHECK(back[i].r == recs[i].r);
        CHECK(back[i].p == recs[i].p);
        CHECK(back[i].seed == recs[i].seed);
        CHECK(back[i].rel_error == recs[i].rel_error);
        CHECK(back[i].success == recs[i].success);
        CHECK(back[i].wall_time == recs[i].wall_time);
    }
}

TEST_CASE("csv reader refuses malformed inputs") {
    TempDir tmp("csvbad");
    CHECK_THROWS_AS(read_records_csv(tmp.path / "missing.csv"), io_error);
    const fs::path wrong_header = tmp.path / "h.csv";
    std::ofstream(wrong_header) << "a,b,c\n1,2,3\n";
    CHECK_THROWS_AS(read_records_csv(wrong_header), io_error);
    const fs::path short_row = tmp.path / "s.csv";
    std::ofstream(short_row) << kRecordsCsvHeader << "\ncomplete,10,2\n";
    CHECK_THROWS_AS(read_records_csv(short_row), io_error);
    const fs::path bad_field = tmp.path / "f.csv";
    std::ofstream(bad_field) << kRecordsCsvHeader
                             << "\ncomplete,10,2,0.5,seven,0.1,1,0.2\n";
    CHECK_THROWS_AS(read_records_csv(bad_field), io_error);
}

TEST_CASE("json report carries records and the curve with null sentinels") {
    TempDir tmp("json");
    std::vector<TrialRecord> recs(1);
    recs[0].experiment = "phase";
    recs[0].n = 16;
    recs[0].r = 2;
    recs[0].p = 0.5;
    recs[0].seed = 7;
    recs[0].rel_error = 2e-5;
    recs[0].success = true;
    recs[0].wall_time = 0.25;
    PhaseCurve curve;
    curve.ranks = {2, 4, 8};
    curve.p_star = {0.1, std::nullopt, 0.9};
    curve.reference = {0.01, 0.02, 0.04};
    const fs::path path = tmp.path / "records.json";
    write_records_json(path, recs, &curve);
    const nlohmann::json j = nlohmann::json::parse(slurp(path));
    REQUIRE(j.contains("records"));
    REQUIRE(j["records"].size() == 1);
    CHECK(j["records"][0]["experiment"] == "phase");
    CHECK(j["records"][0]["success"] == true);
    REQUIRE(j.contains("curve"));
    REQUIRE(j["curve"]["p_star"].size() == 3);
    CHECK(j["curve"]["p_star"][0].get<double>() == 0.1);
    CHECK(j["curve"]["p_star"][1].is_null());
    CHECK(j["curve"]["p_star"][2].get<double>() == 0.9);
}

TEST_CASE("phase svg plots markers only for attained thresholds") {
    TempDir tmp("svg");
    PhaseCurve curve;
    curve.ranks = {2, 4, 8};
    curve.p_star = {0.12, std::nullopt, 0.44};
    curve.reference = {0.011, 0.023, 0.046};
    const fs::path path = tmp.path / "phase.svg";
    write_phase_svg(path, curve);
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("class=\"reference\"") != std::string::npos);
    CHECK(count_occurrences(svg, "class=\"pstar\"") == 2);
    PhaseCurve broken = curve;
    broken.reference.pop_back();
    CHECK_THROWS_AS(write_phase_svg(tmp.path / "broken.svg", broken), parameter_error);
}

TEST_CASE("report emission validates its inputs") {
    TempDir tmp("emit");
    CHECK_THROWS_AS(emit_report(tmp.path, {}, nullptr, ReportFormat::csv), parameter_error);
    std::vector<TrialRecord> recs(1);
    recs[0].experiment = "complete";
    CHECK_THROWS_AS(emit_report(tmp.path, recs, nullptr, ReportFormat::svg), parameter_error);
    emit_report(tmp.path, recs, nullptr, ReportFormat::csv);
    CHECK(fs::exists(tmp.path / "records.csv"));
}

TEST_CASE("certificate reports serialize to json and csv") {
    TempDir tmp("cert");
    CertificateReport rep;
    rep.op_norm_tangent = 0.25;
    rep.cond2a_value = 0.4;
    rep.cond2b_value = 1e-4;
    rep.thresholds = {0.5, 0.5, 1e-3};
    rep.pass_op = rep.pass_2a = rep.pass_2b = true;
    rep.dk_frobenius_trace = {1.41, 0.7, 0.3};
    const fs::path jpath = tmp.path / "certificate_trial_000.json";
    write_certificate_trial_json(jpath, rep);
    const nlohmann::json j = nlohmann::json::parse(slurp(jpath));
    CHECK(j["op_norm_tangent"].get<double>() == 0.25);
    CHECK(j["all_pass"] == true);
    REQUIRE(j["dk_frobenius_trace"].size() == 3);
    const fs::path cpath = tmp.path / "certificate.csv";
    write_certificate_csv(cpath, {rep});
    const std::string csv = slurp(cpath);
    CHECK(csv.rfind(kCertificateCsvHeader, 0) == 0);
    CHECK(count_lines(csv) == 2);
}

TEST_CASE("config files parse keys, comments, and json alike") {
    TempDir tmp("cfg");
    const fs::path kv = tmp.path / "run.cfg";
    std::ofstream(kv) << "# a comment\n"
                         "\n"
                         "n = 32\n"
                         "grid-step=0.05\n"
                         "  experiment   =  phase  \n";
    const auto parsed = parse_config_file(kv);
    CHECK(parsed.at("n") == "32");
    CHECK(parsed.at("grid-step") == "0.05");
    CHECK(parsed.at("experiment") == "phase");

    const fs::path js = tmp.path / "run.json";
    std::ofstream(js) << "{\"n\": 48, \"experiment\": \"complete\", \"p\": 0.25}";
    const auto jparsed = parse_config_file(js);
    CHECK(jparsed.at("n") == "48");
    CHECK(jparsed.at("experiment") == "complete");
    CHECK(jparsed.at("p") == "0.25");

    const fs::path bad = tmp.path / "bad.cfg";
    std::ofstream(bad) << "n = 32\njust words\n";
    CHECK_THROWS_AS(parse_config_file(bad), parameter_error);
    const fs::path badjson = tmp.path / "bad.json";
    std::ofstream(badjson) << "{\"n\": [1,2]}";
    CHECK_THROWS_AS(parse_config_file(badjson), parameter_error);
    CHECK_THROWS_AS(parse_config_file(tmp.path / "absent.cfg"), io_error);
}

#ifdef LOWRANK_CLI_PATH

TEST_CASE("cli runs a completion campaign end to end") {
    TempDir tmp("cli_run");
    const std::string out = (tmp.path / "out").string();
    const int code = run_cli("complete --n 24 --rank 2 --p 0.9 --trials 2 --seed 5 --out " +
                             out + " --format csv");
    CHECK(code == 0);
    const std::vector<TrialRecord> recs = read_records_csv(fs::path(out) / "records.csv");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].n == 24);
    CHECK(recs[0].r == 2);
    // the first trial's solve is serialized alongside the table
    const Matrix est = read_matrix(fs::path(out) / "estimate.txt");
    CHECK(est.rows() == 24);
    CHECK(est.cols() == 24);
    CHECK(fs::exists(fs::path(out) / "solver.txt"));
}

TEST_CASE("cli maps failure classes onto distinct exit codes") {
    TempDir tmp("cli_err");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("complete --help") == 0);
    // parameter problems: exit 2
    CHECK(run_cli("complete --p 1.5 --out " + (tmp.path / "a").string()) == 2);
    CHECK(run_cli("complete --p 0 --out " + (tmp.path / "b").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("complete --format yaml") == 2);
    // io problems: exit 3
    CHECK(run_cli("complete --config /nonexistent/nowhere.cfg") == 3);
}

TEST_CASE("cli lets explicit flags override the config file") {
    TempDir tmp("cli_cfg");
    const fs::path cfg = tmp.path / "run.cfg";
    std::ofstream(cfg) << "n = 10\n"
                          "rank = 2\n"
                          "p = 0.9\n"
                          "trials = 1\n"
                          "seed = 11\n";
    const std::string out = (tmp.path / "out").string();
    const int code = run_cli("complete --config " + cfg.string() + " --n 16 --out " + out +
                             " --format csv");
    CHECK(code == 0);
    const std::vector<TrialRecord> recs = read_records_csv(fs::path(out) / "records.csv");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].n == 16); // flag wins
    CHECK(recs[0].r == 2);  // file value survives
    CHECK(recs[0].p == 0.9);
}

TEST_CASE("cli phase run emits every report format") {
    TempDir tmp("cli_phase");
    const std::string out = (tmp.path / "out").string();
    const int code = run_cli("phase --n 12 --ranks 1 --trials 2 --quota 2 --grid-step 1.0 "
                             "--seed 3 --out " + out + " --format all");
    CHECK(code == 0);
    CHECK(fs::exists(fs::path(out) / "records.csv"));
    CHECK(fs::exists(fs::path(out) / "records.json"));
    CHECK(fs::exists(fs::path(out) / "phase.svg"));
}

#endif
