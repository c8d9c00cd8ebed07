#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "swh/cli.hpp"
#include "swh/metrics.hpp"
#include "swh/screening.hpp"
#include "swh/text.hpp"

using namespace swh;
using nlohmann::json;

namespace {

struct Run {
    int rc = 0;
    std::string out;
    std::string err;
    [[nodiscard]] json summary() const { return json::parse(out); }
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = run_cli(args, out, err);
    return {rc, out.str(), err.str()};
}

std::vector<std::vector<double>> read_report(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> cols(3);
    while (std::getline(in, line)) {
        const auto f = split_fields(line, ',');
        for (std::size_t c = 0; c < 3; ++c) cols[c].push_back(*parse_double(f[c]));
    }
    return cols;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).rc == 2);
    CHECK(cli({"frobnicate"}).rc == 2);
    CHECK(cli({"gen-data", "--bogus"}).rc == 2);
    CHECK(cli({"train", "--model", "forest"}).rc == 2);
    CHECK(cli({"--help"}).rc == 0);
}

TEST_CASE("domain errors exit with 1 and name their category") {
    swh::test::TempDir dir;
    Run r = cli({"stats", "--data", dir.file("missing.csv")});
    CHECK(r.rc == 1);
    CHECK(r.err.find("error[io]") != std::string::npos);
    r = cli({"gen-data"});
    CHECK(r.rc == 1);
    CHECK(r.err.find("error[argument]") != std::string::npos);
    write_file(dir.file("bad.csv"), "tube_length_mm\n1\n");
    r = cli({"stats", "--data", dir.file("bad.csv")});
    CHECK(r.rc == 1);
    CHECK(r.err.find("error[parse]") != std::string::npos);
}

TEST_CASE("gen-data writes a valid dataset and one summary line") {
    swh::test::TempDir dir;
    const Run r = cli({"gen-data", "--n", "915", "--seed", "7", "--out", dir.file("d.csv")});
    REQUIRE(r.rc == 0);
    CHECK(r.out.find('\n') == r.out.size() - 1);
    CHECK(r.summary().at("n") == 915);
    const Dataset ds = load_dataset(dir.file("d.csv"));
    CHECK(ds.size() == 915);
    for (const DesignRecord& rec : ds) CHECK(!first_invalid_field(rec));
    CHECK(r.summary().at("dataset_fingerprint") == to_hex64(fnv1a64(read_file(dir.file("d.csv")))));
}

TEST_CASE("flags override the config file which overrides defaults") {
    swh::test::TempDir dir;
    write_file(dir.file("run.json"), R"({"seed": 5, "gen-data": {"n": 30}})");
    Run r = cli({"--config", dir.file("run.json"), "gen-data", "--out", dir.file("a.csv")});
    REQUIRE(r.rc == 0);
    CHECK(r.summary().at("n") == 30);
    CHECK(r.summary().at("seed") == 5);
    r = cli({"--config", dir.file("run.json"), "gen-data", "--n", "12", "--out", dir.file("b.csv")});
    REQUIRE(r.rc == 0);
    CHECK(r.summary().at("n") == 12);
    CHECK(r.summary().at("seed") == 5);
    r = cli({"gen-data", "--out", dir.file("c.csv")});
    CHECK(r.summary().at("n") == 915);
    CHECK(r.summary().at("seed") == 7);

    write_file(dir.file("bad.json"), R"({"n": "many"})");
    r = cli({"--config", dir.file("bad.json"), "gen-data", "--out", dir.file("d.csv")});
    CHECK(r.rc == 1);
}

TEST_CASE("train, eval and predict") {
    swh::test::TempDir dir;
    REQUIRE(cli({"gen-data", "--n", "200", "--seed", "3", "--out", dir.file("d.csv")}).rc == 0);
    Run r = cli({"train", "--data", dir.file("d.csv"), "--model", "mlfn", "--target", "hcr", "--epochs", "500",
                 "--out", dir.file("hcr.model"), "--report", dir.file("train_report.csv"), "--test-out",
                 dir.file("test.csv"), "--sensitivity-seed", "9"});
    REQUIRE(r.rc == 0);
    const json s = r.summary();
    CHECK(s.at("n_train") == 170);
    CHECK(s.at("n_test") == 30);
    CHECK(s.at("model_fingerprint") == to_hex64(fnv1a64(read_file(dir.file("hcr.model")))));
    CHECK(s.at("sensitivity").at("seed") == 9);
    CHECK(load_dataset(dir.file("test.csv")).size() == 30);

    r = cli({"eval", "--model", dir.file("hcr.model"), "--data", dir.file("d.csv"), "--split", "0.85", "--seed", "7",
             "--report", dir.file("eval.csv")});
    REQUIRE(r.rc == 0);
    const json e = r.summary();
    CHECK(e.at("n_tot") == 30);
    CHECK(e.at("rms_error") == s.at("eval").at("rms_error"));
    CHECK(read_file(dir.file("eval.csv")) == read_file(dir.file("train_report.csv")));

    // Summary numbers are recomputable from the exported samples.
    const auto cols = read_report(dir.file("eval.csv"));
    CHECK(rms_error(cols[1], cols[0]) == e.at("rms_error").get<double>());
    CHECK(prediction_accuracy(cols[1], cols[0], 0.3) == e.at("accuracy_pct").get<double>());

    r = cli({"predict", "--model", dir.file("hcr.model"), "--tube-length", "1800", "--n-tubes", "20", "--tcd", "75",
             "--tank-volume", "150.599", "--area", "2.45", "--angle", "45", "--final-temp", "56"});
    REQUIRE(r.rc == 0);
    CHECK(std::isfinite(r.summary().at("hcr").get<double>()));

    r = cli({"predict", "--model", dir.file("hcr.model"), "--tube-length", "1800"});
    CHECK(r.rc == 1);
    r = cli({"predict", "--model", dir.file("hcr.model"), "--tube-length", "-1", "--n-tubes", "20", "--tcd", "75",
             "--tank-volume", "150", "--area", "2.45", "--angle", "45", "--final-temp", "56"});
    CHECK(r.rc == 1);
    CHECK(r.err.find("error[validation]") != std::string::npos);

    r = cli({"stats", "--data", dir.file("d.csv"), "--out", dir.file("stats.csv")});
    REQUIRE(r.rc == 0);
    CHECK(r.summary().at("columns").size() == 9);
    CHECK(read_file(dir.file("stats.csv")).rfind("variable,count,maximum", 0) == 0);
}

TEST_CASE("screen and candidate database commands") {
    swh::test::TempDir dir;
    REQUIRE(cli({"gen-data", "--n", "120", "--seed", "4", "--out", dir.file("d.csv")}).rc == 0);
    REQUIRE(cli({"train", "--data", dir.file("d.csv"), "--epochs", "200", "--out", dir.file("hcr.model")}).rc == 0);
    REQUIRE(cli({"train", "--data", dir.file("d.csv"), "--model", "elm", "--target", "hlc", "--out",
                 dir.file("hlc.model")})
                .rc == 0);

    Run r = cli({"screen", "--model", dir.file("hcr.model"), "--hlc-model", dir.file("hlc.model"), "--max-values", "4",
                 "--top-k", "10", "--out", dir.file("c.jsonl")});
    REQUIRE(r.rc == 0);
    CHECK(r.summary().at("candidates") == 10);
    const CandidateDB db = load_candidate_db(dir.file("c.jsonl"));
    CHECK(db.candidates.size() == 10);
    CHECK(db.candidates[0].predicted_hlc);

    r = cli({"screen", "--model", dir.file("hcr.model"), "--max-values", "4", "--top-k", "10", "--workers", "3",
             "--chunk-size", "5", "--hlc-model", dir.file("hlc.model"), "--out", dir.file("c3.jsonl")});
    REQUIRE(r.rc == 0);
    CHECK(read_file(dir.file("c3.jsonl")) == read_file(dir.file("c.jsonl")));

    r = cli({"screen", "--model", dir.file("hcr.model"), "--max-values", "4", "--cap", "100", "--out",
             dir.file("x.jsonl")});
    CHECK(r.rc == 1);
    CHECK(r.err.find("error[capacity]") != std::string::npos);
    r = cli({"screen", "--model", dir.file("hcr.model"), "--max-values", "4", "--cap", "100", "--allow-large",
             "--out", dir.file("x.jsonl")});
    CHECK(r.rc == 0);
    r = cli({"screen", "--model", dir.file("hcr.model"), "--top-k", "3", "--threshold", "9", "--out",
             dir.file("x.jsonl")});
    CHECK(r.rc == 1);
    r = cli({"screen", "--model", dir.file("hlc.model"), "--count", "tube_length=2", "--out", dir.file("x.jsonl")});
    CHECK(r.rc == 1);

    r = cli({"db", "export", "--db", dir.file("c.jsonl"), "--out", dir.file("cand.csv")});
    REQUIRE(r.rc == 0);
    const Dataset cand = load_dataset(dir.file("cand.csv"));
    CHECK(cand.size() == 10);

    // Measure the top candidate and merge it back.
    DesignRecord measured = cand[0];
    measured.hcr = *measured.hcr * 0.98;
    measured.hlc.reset();
    save_dataset(Dataset({measured}), dir.file("exp.csv"));
    r = cli({"db", "merge", "--db", dir.file("c.jsonl"), "--data", dir.file("d.csv"), "--experiments",
             dir.file("exp.csv"), "--out", dir.file("merged.csv"), "--db-out", dir.file("c2.jsonl")});
    REQUIRE(r.rc == 0);
    CHECK(r.summary().at("n_merged") == 121);
    REQUIRE(r.summary().at("validations").size() == 1);
    CHECK(r.summary().at("validations")[0].at("error_rate_pct").get<double>() ==
          doctest::Approx(100.0 * 0.02 / 0.98));
    const std::string merged_once = read_file(dir.file("merged.csv"));
    r = cli({"db", "merge", "--db", dir.file("c2.jsonl"), "--data", dir.file("merged.csv"), "--experiments",
             dir.file("exp.csv"), "--out", dir.file("merged2.csv"), "--db-out", dir.file("c3.jsonl")});
    REQUIRE(r.rc == 0);
    CHECK(read_file(dir.file("merged2.csv")) == merged_once);
    CHECK(read_file(dir.file("c3.jsonl")) == read_file(dir.file("c2.jsonl")));
}
