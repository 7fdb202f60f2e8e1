#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qlsep/config.hpp"
#include "qlsep/digest.hpp"
#include "qlsep/distinguisher.hpp"
#include "qlsep/evaluation.hpp"
#include "qlsep/hm_game.hpp"
#include "qlsep/io.hpp"
#include "qlsep/svg.hpp"
#include "qlsep/verify.hpp"
#include "qlsep/version.hpp"

namespace qlsep {

// Every run records what it wrote: identical (config, seed, code version)
// must reproduce identical file digests. Wall-clock stats live here and
// only here, so output files stay byte-deterministic.
struct RunManifest {
    std::string config_hash;
    std::string code_version = kVersion;
    std::vector<std::pair<std::string, std::string>> file_digests;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> wall_sections;

    json to_json() const {
        json files = json::object();
        for (const auto &[name, digest] : file_digests) {
            files[name] = digest;
        }
        json sections = json::object();
        for (const auto &[name, secs] : wall_sections) {
            sections[name] = secs;
        }
        return json{{"config_hash", config_hash},
                    {"code_version", code_version},
                    {"files", files},
                    {"wall_seconds", wall_seconds},
                    {"wall_sections", sections}};
    }
};

namespace experiment_detail {

class OutputWriter {
  public:
    OutputWriter(const ExperimentConfig &config) : dir_(config.out_dir) {
        std::filesystem::create_directories(dir_);
        manifest_.config_hash = Sha256::of(config_to_json(config).dump());
        start_ = std::chrono::steady_clock::now();
    }

    void write(const std::string &name, const std::string &content) {
        write_file((std::filesystem::path(dir_) / name).string(), content);
        manifest_.file_digests.emplace_back(name, Sha256::of(content));
    }

    void section(const std::string &name, double seconds) {
        manifest_.wall_sections.emplace_back(name, seconds);
    }

    // Writes manifest.json and returns the manifest. Call last.
    RunManifest finish() {
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file((std::filesystem::path(dir_) / "manifest.json").string(),
                   manifest_.to_json().dump(2) + "\n");
        return manifest_;
    }

  private:
    std::string dir_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string arm_label(const SeparationSummary &s) {
    return s.protocol == "fq" ? std::string("fq") : ("mf:" + s.strategy);
}

} // namespace experiment_detail

inline SeparationPlan make_separation_plan(const ExperimentConfig &config) {
    SeparationPlan plan;
    plan.n_list = config.n_list;
    plan.arms.clear();
    plan.arms.push_back("fq");
    for (const auto &s : config.strategies) {
        plan.arms.push_back(s);
    }
    plan.f_trials = config.f_trials;
    plan.protocol_trials = config.protocol_trials;
    plan.ell_override = config.ell;
    plan.train_examples = config.train_examples;
    plan.label_mode = config.label_mode;
    plan.f_source = config.make_f_source();
    plan.criteria = config.criteria;
    plan.allow_leaky = config.allow_leaky;
    plan.exact = config.exact;
    plan.empirical_trials = config.empirical_trials;
    plan.exhaustive_x = config.x_mode == "exhaustive";
    plan.seed = config.seed;
    plan.threads = config.threads;
    return plan;
}

inline std::string separation_plot(const std::vector<SeparationSummary> &summaries) {
    std::map<std::string, PlotSeries> series;
    for (const auto &s : summaries) {
        const std::string label =
            s.protocol == "fq" ? std::string("fq") : ("mf:" + s.strategy);
        series[label].name = label;
        series[label].points.emplace_back(static_cast<double>(s.n), s.tv_median);
    }
    std::vector<PlotSeries> ordered;
    for (auto &[label, ps] : series) {
        ordered.push_back(std::move(ps));
    }
    return svg_line_chart("median exact TV vs n", "n (qubits)", "median TV", ordered);
}

// The separation experiment: one CSV row per (n, arm, trial), a summary
// JSON with quantiles, and a TV-vs-n plot. Deterministic given the config.
inline RunManifest run_separation(const ExperimentConfig &config) {
    experiment_detail::OutputWriter out(config);
    SeparationPlan plan = make_separation_plan(config);

    SeparationResult result;
    for (int n : plan.n_list) {
        for (const auto &arm : plan.arms) {
            experiment_detail::Stopwatch watch;
            SeparationPlan sub = plan;
            sub.n_list = {n};
            sub.arms = {arm};
            SeparationResult part = separation_experiment(sub);
            for (auto &row : part.rows) {
                result.rows.push_back(std::move(row));
            }
            for (auto &s : part.summaries) {
                result.summaries.push_back(std::move(s));
            }
            out.section("n=" + std::to_string(n) + "/" + (arm == "fq" ? arm : "mf:" + arm),
                        watch.seconds());
        }
    }

    out.write("config.json", config_to_json(config).dump(2) + "\n");
    out.write("results.csv", separation_rows_to_csv(result.rows));
    json summaries = json::array();
    for (const auto &s : result.summaries) {
        summaries.push_back(separation_summary_to_json(s));
    }
    out.write("summary.json",
              json{{"config", config_to_json(config)}, {"summaries", summaries}}.dump(2) + "\n");
    out.write("tv_vs_n.svg", separation_plot(result.summaries));
    return out.finish();
}

// Parses "quantum", "guess", "classical:c=<pairs>", "reduction:<strategy>".
inline HmProtocol hm_protocol_from_string(const std::string &text, const ExperimentConfig &config,
                                          int n) {
    if (text == "quantum") {
        return HmQuantumProtocol{};
    }
    if (text == "guess") {
        return HmRandomGuessProtocol{};
    }
    if (text.rfind("classical:c=", 0) == 0) {
        HmClassicalProtocol p;
        try {
            p.budget_pairs = std::stoi(text.substr(12));
        } catch (const std::exception &) {
            throw ConfigError("hm: cannot parse pair budget in '" + text + "'");
        }
        if (p.budget_pairs < 2) {
            throw ConfigError("hm: classical budget must be >= 2 pairs");
        }
        return p;
    }
    if (text.rfind("reduction:", 0) == 0) {
        const std::string strat = text.substr(10);
        HmReductionProtocol p;
        const int ell = config.ell_for(n);
        if (strat == "pauli-shadows") {
            p.strategy = Strategy::pauli_shadows(ell, derive_seed(config.seed, 0x5ad0));
        } else if (strat == "fourier") {
            p.strategy = Strategy::fourier(ell, derive_seed(config.seed, 0xf0f0));
        } else if (strat == "leaky-full-table") {
            if (!config.allow_leaky) {
                throw ConfigError("hm: reduction:leaky-full-table requires allow_leaky=true");
            }
            p.strategy = Strategy::leaky(ell, true);
        } else {
            throw ConfigError("hm: unknown reduction strategy '" + strat + "'");
        }
        p.train_examples = config.train_examples;
        p.f_source = config.make_f_source();
        return p;
    }
    throw ConfigError("hm: unknown protocol '" + text + "'");
}

inline RunManifest run_hm(const ExperimentConfig &config) {
    experiment_detail::OutputWriter out(config);

    std::string csv = "n,protocol,trials,success_rate,ci_lo,ci_hi,mean_sent_bits\n";
    std::map<std::string, PlotSeries> series;
    std::string transcript_lines;
    for (int n : config.n_list) {
        for (const auto &name : config.hm_protocols) {
            experiment_detail::Stopwatch watch;
            const HmProtocol protocol = hm_protocol_from_string(name, config, n);
            Rng rng(derive_seed(config.seed, mix64(static_cast<std::uint64_t>(n)) ^
                                                 fnv1a64(name)));
            std::vector<HmTranscript> transcripts;
            const SuccessEstimate est =
                estimate_success(protocol, n, config.hm_trials, rng,
                                 config.transcripts ? &transcripts : nullptr);
            csv += std::to_string(n) + "," + name + "," + std::to_string(est.trials) + "," +
                   fmt_double(est.rate) + "," + fmt_double(est.ci.lo) + "," +
                   fmt_double(est.ci.hi) + "," + fmt_double(est.mean_sent_bits) + "\n";
            series[name].name = name;
            series[name].points.emplace_back(est.mean_sent_bits, est.rate);
            for (const auto &t : transcripts) {
                transcript_lines +=
                    json{{"n", t.n},
                         {"x", u64_to_hex(t.x, t.n)},
                         {"f_digest", Sha256::of(bits_to_hex(t.f_table))},
                         {"sent_bits", bits_to_hex(t.payload)},
                         {"answer", json::array({u64_to_hex(t.answer.y1, t.n),
                                                 u64_to_hex(t.answer.y2, t.n), t.answer.parity})},
                         {"correct", t.correct}}
                        .dump() +
                    "\n";
            }
            out.section("n=" + std::to_string(n) + "/" + name, watch.seconds());
        }
    }

    out.write("config.json", config_to_json(config).dump(2) + "\n");
    out.write("hm_results.csv", csv);
    std::vector<PlotSeries> ordered;
    for (auto &[label, ps] : series) {
        ordered.push_back(std::move(ps));
    }
    out.write("hm_success_vs_bits.svg",
              svg_line_chart("HM success vs communication", "classical bits sent",
                             "success rate", ordered));
    if (config.transcripts) {
        out.write("hm_transcripts.jsonl", transcript_lines);
    }
    return out.finish();
}

inline RunManifest run_distinguish(const ExperimentConfig &config) {
    experiment_detail::OutputWriter out(config);

    json reports = json::array();
    std::map<std::string, PlotSeries> series;
    for (int n : config.n_list) {
        for (const auto &name : config.strategies) {
            experiment_detail::Stopwatch watch;
            DistinguisherConfig dcfg;
            dcfg.n = n;
            dcfg.train_examples = config.train_examples;
            dcfg.train_prf = config.prf;
            dcfg.include_zero_x = config.include_zero_x;
            const int ell = config.ell_for(n);
            if (name == "pauli-shadows") {
                dcfg.strategy = Strategy::pauli_shadows(ell, derive_seed(config.seed, 0x5ad0));
            } else if (name == "fourier") {
                dcfg.strategy = Strategy::fourier(ell, derive_seed(config.seed, 0xf0f0));
            } else {
                dcfg.strategy = Strategy::leaky(ell, config.allow_leaky);
            }
            Rng rng(derive_seed(config.seed, mix64(static_cast<std::uint64_t>(n)) ^
                                                 fnv1a64(name)));
            const DistinguisherReport report = estimate_advantage(
                config.prf, dcfg, config.distinguish_trials, rng, config.threads);
            reports.push_back(distinguisher_report_to_json(report));
            series[name + ":p_prf"].name = name + ":p_prf";
            series[name + ":p_prf"].points.emplace_back(static_cast<double>(n), report.p_prf);
            series[name + ":p_rand"].name = name + ":p_rand";
            series[name + ":p_rand"].points.emplace_back(static_cast<double>(n), report.p_rand);
            out.section("n=" + std::to_string(n) + "/" + name, watch.seconds());
        }
    }

    out.write("config.json", config_to_json(config).dump(2) + "\n");
    out.write("distinguisher.json",
              json{{"config", config_to_json(config)}, {"reports", reports}}.dump(2) + "\n");
    std::vector<PlotSeries> ordered;
    for (auto &[label, ps] : series) {
        ordered.push_back(std::move(ps));
    }
    out.write("distinguisher.svg",
              svg_line_chart("distinguisher acceptance probabilities", "n (qubits)",
                             "Pr[A^f = 1]", ordered));
    return out.finish();
}

// Trains the fully-quantum learner once and persists both the dataset and
// the learned classical description, plus a small exact-TV self-check.
inline RunManifest run_learn_fq(const ExperimentConfig &config) {
    experiment_detail::OutputWriter out(config);
    const int n = config.n_list.front();
    Rng rng(derive_seed(config.seed, fnv1a64("learn-fq")));
    const std::uint64_t x = rng.next_nonzero_bits(n);
    const int count = config.label_mode == LabelMode::FullX ? config.train_examples : n + 10;
    const auto data = generate_training_data(x, count, config.ell_for(n), config.label_mode,
                                             config.make_f_source(), n, rng);
    const LearnerOutput learned = fully_quantum_learn(data);

    json check = json::array();
    for (int j = 0; j < 10; ++j) {
        const BoolFunc f = config.make_f_source().draw(n, rng);
        const double tv =
            tv_distance(fq_exact_distribution(learned.circuit, f), concept_distribution(f, x));
        check.push_back(tv);
    }

    out.write("config.json", config_to_json(config).dump(2) + "\n");
    out.write("dataset.jsonl", dataset_to_jsonl(data));
    out.write("learner_output.json",
              json{{"learner", learner_output_to_json(learned)}, {"self_check_tv", check}}.dump(2) +
                  "\n");
    return out.finish();
}

inline RunManifest run_learn_mf(const ExperimentConfig &config) {
    experiment_detail::OutputWriter out(config);
    const int n = config.n_list.front();
    const std::string name = config.strategies.front();
    const int ell = config.ell_for(n);
    Strategy strategy;
    if (name == "pauli-shadows") {
        strategy = Strategy::pauli_shadows(ell, derive_seed(config.seed, 0x5ad0));
    } else if (name == "fourier") {
        strategy = Strategy::fourier(ell, derive_seed(config.seed, 0xf0f0));
    } else {
        strategy = Strategy::leaky(ell, config.allow_leaky);
    }
    Rng rng(derive_seed(config.seed, fnv1a64("learn-mf")));
    const std::uint64_t x = rng.next_nonzero_bits(n);
    const FSource source = config.make_f_source();

    std::string dataset_lines;
    std::vector<std::pair<ClassicalRep, Label>> data;
    const int count = config.label_mode == LabelMode::FullX ? config.train_examples : n + 10;
    for (int i = 0; i < count; ++i) {
        const BoolFunc f = source.draw(n, rng);
        ClassicalRep rep = measure(strategy, f, ell, rng);
        Label label;
        label.mode = config.label_mode;
        if (config.label_mode == LabelMode::FullX) {
            label.full = concept_sample(f, x, rng);
        } else {
            label.parity_i = rng.next_bits(n);
            label.parity_bit = dot_u64(label.parity_i, x);
        }
        dataset_lines += json{{"rep", classical_rep_to_json(rep)},
                              {"label",
                               json{{"mode", label_mode_name(label.mode)},
                                    {"bits", bits_to_hex(label.to_bits(n))}}},
                              {"n", n}}
                             .dump() +
                         "\n";
        data.emplace_back(std::move(rep), label);
    }
    const MfGenerator gen = measure_first_learn(strategy, data);

    json check = json::array();
    for (int j = 0; j < 10; ++j) {
        const BoolFunc f = source.draw(n, rng);
        const ClassicalRep rep = measure(strategy, f, ell, rng);
        check.push_back(tv_distance(mf_exact_distribution(gen, rep), concept_distribution(f, x)));
    }

    out.write("config.json", config_to_json(config).dump(2) + "\n");
    out.write("dataset.jsonl", dataset_lines);
    out.write("mf_generator.json",
              json{{"generator", json{{"n", gen.n},
                                      {"x", u64_to_hex(gen.x, gen.n)},
                                      {"strategy", gen.strategy_id},
                                      {"mom_groups", gen.mom_groups}}},
                   {"self_check_tv", check}}
                      .dump(2) +
                  "\n");
    return out.finish();
}

// Rebuilds summary.json and the TV plot from an existing results.csv.
inline RunManifest run_report(const ExperimentConfig &config) {
    const auto rows = separation_rows_from_csv(
        read_file((std::filesystem::path(config.out_dir) / "results.csv").string()));
    if (rows.empty()) {
        throw ConfigError("report: results.csv has no rows");
    }

    std::map<std::tuple<int, std::string, std::string>, std::vector<SeparationRow>> groups;
    for (const auto &row : rows) {
        groups[{row.n, row.protocol, row.strategy}].push_back(row);
    }
    std::vector<SeparationSummary> summaries;
    for (const auto &[key, group] : groups) {
        SeparationSummary s;
        s.n = std::get<0>(key);
        s.protocol = std::get<1>(key);
        s.strategy = std::get<2>(key);
        s.ell = group.front().ell;
        s.m = group.front().m;
        std::vector<double> tvs;
        std::map<int, std::pair<std::size_t, std::size_t>> per_run;  // run -> (good, total)
        std::size_t good = 0;
        for (const auto &row : group) {
            tvs.push_back(row.tv);
            good += static_cast<std::size_t>(row.indicator);
            auto &[g, t] = per_run[row.trial / std::max(1, config.f_trials)];
            g += static_cast<std::size_t>(row.indicator);
            ++t;
        }
        s.tv_median = median(tvs);
        s.tv_q25 = quantile(tvs, 0.25);
        s.tv_q75 = quantile(tvs, 0.75);
        s.delta_hat = static_cast<double>(good) / static_cast<double>(tvs.size());
        std::size_t meets = 0;
        for (const auto &[run, gt] : per_run) {
            if (static_cast<double>(gt.first) / static_cast<double>(gt.second) >=
                config.criteria.delta) {
                ++meets;
            }
        }
        s.p_hat = static_cast<double>(meets) / static_cast<double>(per_run.size());
        s.rows = tvs.size();
        summaries.push_back(std::move(s));
    }

    experiment_detail::OutputWriter out(config);
    json jsummaries = json::array();
    for (const auto &s : summaries) {
        jsummaries.push_back(separation_summary_to_json(s));
    }
    out.write("summary.json",
              json{{"config", config_to_json(config)}, {"summaries", jsummaries}}.dump(2) + "\n");
    out.write("tv_vs_n.svg", separation_plot(summaries));
    return out.finish();
}

// Dispatch by config.experiment. `verify` is handled by the CLI directly.
inline RunManifest run_experiment(const ExperimentConfig &config) {
    if (config.experiment == "separation") {
        return run_separation(config);
    }
    if (config.experiment == "hm") {
        return run_hm(config);
    }
    if (config.experiment == "distinguish") {
        return run_distinguish(config);
    }
    if (config.experiment == "learn-fq") {
        return run_learn_fq(config);
    }
    if (config.experiment == "learn-mf") {
        return run_learn_mf(config);
    }
    if (config.experiment == "report") {
        return run_report(config);
    }
    throw ConfigError("run_experiment: unhandled experiment '" + config.experiment + "'");
}

} // namespace qlsep
