#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "qlsep/experiment.hpp"

using namespace qlsep;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string &name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

ExperimentConfig tiny_separation(const std::string &out) {
    ExperimentConfig c;
    c.experiment = "separation";
    c.n_list = {2};
    c.f_trials = 4;
    c.protocol_trials = 2;
    c.seed = 13;
    c.out_dir = out;
    validate_config(c);
    return c;
}

} // namespace

TEST_CASE("run_separation writes deterministic artifacts", "[experiment]") {
    TempDir a("qlsep_sep_a");
    const RunManifest ma = run_separation(tiny_separation(a.path.string()));

    REQUIRE(std::filesystem::exists(a.path / "results.csv"));
    REQUIRE(std::filesystem::exists(a.path / "summary.json"));
    REQUIRE(std::filesystem::exists(a.path / "tv_vs_n.svg"));
    REQUIRE(std::filesystem::exists(a.path / "config.json"));
    REQUIRE(std::filesystem::exists(a.path / "manifest.json"));

    const std::string csv_first = read_file((a.path / "results.csv").string());
    // Identical config and seed, run again into the same place.
    const RunManifest mb = run_separation(tiny_separation(a.path.string()));
    REQUIRE(read_file((a.path / "results.csv").string()) == csv_first);
    REQUIRE(ma.file_digests == mb.file_digests);
    REQUIRE(ma.config_hash == mb.config_hash);

    SECTION("a different seed changes the digests") {
        TempDir c("qlsep_sep_c");
        ExperimentConfig cfg = tiny_separation(c.path.string());
        cfg.seed = 14;
        const RunManifest mc = run_separation(cfg);
        bool any_diff = false;
        for (std::size_t i = 0; i < ma.file_digests.size(); ++i) {
            if (ma.file_digests[i].first == "results.csv" ||
                ma.file_digests[i].first == "summary.json") {
                any_diff = any_diff || ma.file_digests[i] != mc.file_digests[i];
            }
        }
        REQUIRE(any_diff);
    }
}

TEST_CASE("run_report regenerates summaries from the CSV", "[experiment]") {
    TempDir dir("qlsep_report");
    ExperimentConfig cfg = tiny_separation(dir.path.string());
    run_separation(cfg);
    const json before =
        parse_json_strict(read_file((dir.path / "summary.json").string())).at("summaries");

    cfg.experiment = "report";
    run_report(cfg);
    const json after =
        parse_json_strict(read_file((dir.path / "summary.json").string())).at("summaries");
    REQUIRE(before == after);
    REQUIRE(std::filesystem::exists(dir.path / "tv_vs_n.svg"));
}

TEST_CASE("run_hm produces per-protocol success rows", "[experiment]") {
    TempDir dir("qlsep_hm");
    ExperimentConfig c;
    c.experiment = "hm";
    c.n_list = {3};
    c.hm_protocols = {"quantum", "classical:c=4", "guess"};
    c.hm_trials = 50;
    c.seed = 5;
    c.out_dir = dir.path.string();
    c.transcripts = true;
    validate_config(c);

    run_hm(c);
    const std::string csv = read_file((dir.path / "hm_results.csv").string());
    REQUIRE(csv.find("quantum") != std::string::npos);
    REQUIRE(csv.find("classical:c=4") != std::string::npos);
    REQUIRE(csv.find("guess") != std::string::npos);
    // The quantum row reports success 1 at zero bits.
    REQUIRE(csv.find("3,quantum,50,1,") != std::string::npos);
    REQUIRE(std::filesystem::exists(dir.path / "hm_transcripts.jsonl"));
    REQUIRE(std::filesystem::exists(dir.path / "hm_success_vs_bits.svg"));

    SECTION("unknown protocol is a config error") {
        c.hm_protocols = {"telepathy"};
        REQUIRE_THROWS_AS(run_hm(c), ConfigError);
    }
}

TEST_CASE("run_distinguish writes a report", "[experiment]") {
    TempDir dir("qlsep_dist");
    ExperimentConfig c;
    c.experiment = "distinguish";
    c.n_list = {3};
    c.strategies = {"pauli-shadows"};
    c.ell = 20;
    c.distinguish_trials = 30;
    c.train_examples = 2;
    c.seed = 6;
    c.out_dir = dir.path.string();
    validate_config(c);

    run_distinguish(c);
    const json report = parse_json_strict(read_file((dir.path / "distinguisher.json").string()));
    REQUIRE(report.at("reports").size() == 1);
    const auto &r = report.at("reports").at(0);
    REQUIRE(r.at("n") == 3);
    REQUIRE(r.at("trials") == 30);
    REQUIRE(r.at("p_prf").get<double>() >= 0.0);
    REQUIRE(r.at("p_prf").get<double>() <= 1.0);
}

TEST_CASE("learn subcommands persist datasets and descriptions", "[experiment]") {
    SECTION("fq") {
        TempDir dir("qlsep_learnfq");
        ExperimentConfig c;
        c.experiment = "learn-fq";
        c.n_list = {4};
        c.ell = 2;
        c.seed = 9;
        c.out_dir = dir.path.string();
        validate_config(c);
        run_learn_fq(c);
        const json out =
            parse_json_strict(read_file((dir.path / "learner_output.json").string()));
        REQUIRE(out.at("learner").at("decode") == "v1");
        for (const auto &tv : out.at("self_check_tv")) {
            REQUIRE(tv.get<double>() <= 1e-9);
        }
        const auto data = dataset_from_jsonl(read_file((dir.path / "dataset.jsonl").string()));
        REQUIRE(data.size() == 3);  // default train_examples
        const LearnerOutput learned = learner_output_from_json(out.at("learner"));
        REQUIRE(learned.circuit.n == 4);
    }
    SECTION("mf with the leaky control") {
        TempDir dir("qlsep_learnmf");
        ExperimentConfig c;
        c.experiment = "learn-mf";
        c.n_list = {4};
        c.strategies = {"leaky-full-table"};
        c.allow_leaky = true;
        c.ell = 1;
        c.seed = 10;
        c.out_dir = dir.path.string();
        validate_config(c);
        run_learn_mf(c);
        const json out =
            parse_json_strict(read_file((dir.path / "mf_generator.json").string()));
        REQUIRE(out.at("generator").at("strategy") == "leaky-full-table");
        for (const auto &tv : out.at("self_check_tv")) {
            REQUIRE(tv.get<double>() <= 1e-9);
        }
    }
}
