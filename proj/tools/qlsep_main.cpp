// qlsep: seeded, reproducible experiment runner for the phase-state
// learning separation: fully-quantum vs measure-first protocols, the
// Hidden Matching game, and the PRF distinguisher.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlsep/experiment.hpp"
#include "qlsep/verify.hpp"
#include "qlsep/version.hpp"

namespace {

struct FlagVals {
    std::string config;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
    bool exact = false;
    bool empirical = false;
    std::vector<int> n;
    int ell = 0;
    int f_trials = 0;
    int protocol_trials = 0;
    int trials = 0;
    int train_examples = 0;
    std::vector<std::string> strategies;
    std::vector<std::string> protocols;
    bool allow_leaky = false;
    bool transcripts = false;
    std::string label_mode;
    std::string f_source;
    std::string x_mode;
    double epsilon = -1.0;
    double delta = -1.0;
    double p_succ = -1.0;
};

void add_common_flags(CLI::App *cmd, FlagVals &v) {
    cmd->add_option("--config", v.config, "JSON config file; flags override file values");
    cmd->add_option("--seed", v.seed, "master seed");
    cmd->add_option("--out", v.out, "output directory");
    cmd->add_option("--threads", v.threads, "worker threads over trials");
    cmd->add_flag("--exact", v.exact, "exact output distributions (n <= 12)");
    cmd->add_flag("--empirical", v.empirical, "empirical output distributions");
    cmd->add_option("--n", v.n, "qubit counts")->delimiter(',');
    cmd->add_option("--ell", v.ell, "copies per example (0 = default 10 n^2)");
    cmd->add_option("--f-trials", v.f_trials, "fresh f per train run");
    cmd->add_option("--protocol-trials", v.protocol_trials, "independent train runs");
    cmd->add_option("--train-examples", v.train_examples, "training examples per run");
    cmd->add_option("--strategies", v.strategies,
                    "measure-first strategies: pauli-shadows, fourier, leaky-full-table")
        ->delimiter(',');
    cmd->add_flag("--allow-leaky", v.allow_leaky, "permit the m = 2^n leaky control strategy");
    cmd->add_option("--label-mode", v.label_mode, "full-x or parity");
    cmd->add_option("--f-source", v.f_source, "uniform or prf");
    cmd->add_option("--x-mode", v.x_mode, "sampled or exhaustive");
    cmd->add_option("--epsilon", v.epsilon, "criteria epsilon");
    cmd->add_option("--delta", v.delta, "criteria delta");
    cmd->add_option("--p-succ", v.p_succ, "criteria p_succ");
}

qlsep::json overrides_from_flags(const CLI::App *cmd, const FlagVals &v,
                                 const std::string &experiment) {
    qlsep::json o = qlsep::json::object();
    o["experiment"] = experiment;
    if (cmd->count("--seed")) {
        o["seed"] = v.seed;
    }
    if (cmd->count("--out")) {
        o["out"] = v.out;
    }
    if (cmd->count("--threads")) {
        o["threads"] = v.threads;
    }
    if (v.exact && v.empirical) {
        throw qlsep::ConfigError("config: pass at most one of --exact / --empirical");
    }
    if (v.exact) {
        o["exact"] = true;
    }
    if (v.empirical) {
        o["exact"] = false;
    }
    if (cmd->count("--n")) {
        o["n"] = v.n;
    }
    if (cmd->count("--ell")) {
        o["ell"] = v.ell;
    }
    if (cmd->count("--f-trials")) {
        o["f_trials"] = v.f_trials;
    }
    if (cmd->count("--protocol-trials")) {
        o["protocol_trials"] = v.protocol_trials;
    }
    if (cmd->count("--train-examples")) {
        o["train_examples"] = v.train_examples;
    }
    if (cmd->count("--strategies")) {
        o["strategies"] = v.strategies;
    }
    if (v.allow_leaky) {
        o["allow_leaky"] = true;
    }
    if (cmd->count("--label-mode")) {
        o["label_mode"] = v.label_mode;
    }
    if (cmd->count("--f-source")) {
        o["f_source"] = v.f_source;
    }
    if (cmd->count("--x-mode")) {
        o["x_mode"] = v.x_mode;
    }
    qlsep::json crit = qlsep::json::object();
    if (v.epsilon >= 0.0) {
        crit["epsilon"] = v.epsilon;
    }
    if (v.delta >= 0.0) {
        crit["delta"] = v.delta;
    }
    if (v.p_succ >= 0.0) {
        crit["p_succ"] = v.p_succ;
    }
    if (!crit.empty()) {
        o["criteria"] = crit;
    }
    return o;
}

int run_verify_command(std::uint64_t seed) {
    const auto results = qlsep::run_verify_suite(seed);
    bool all_pass = true;
    for (const auto &r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return all_pass ? 0 : 1;
}

void print_manifest(const qlsep::RunManifest &m, const std::string &out_dir) {
    std::cout << "wrote " << out_dir << "/ (" << m.file_digests.size()
              << " files + manifest.json) in " << qlsep::fmt_double(m.wall_seconds) << " s\n";
    for (const auto &[name, digest] : m.file_digests) {
        std::cout << "  " << name << "  sha256:" << digest.substr(0, 16) << "...\n";
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"phase-state learning separation simulator"};
    app.set_version_flag("--version", qlsep::kVersion);
    app.require_subcommand(1);

    FlagVals verify_flags;
    auto *verify_cmd = app.add_subcommand("verify", "run the brute-force oracle suites");
    verify_cmd->add_option("--seed", verify_flags.seed, "master seed");

    struct Sub {
        CLI::App *cmd;
        FlagVals flags;
        std::string name;
    };
    std::vector<Sub> subs;
    subs.reserve(8);  // bound flag addresses must not move
    auto add_experiment = [&](const std::string &name, const std::string &desc) {
        subs.push_back(Sub{app.add_subcommand(name, desc), FlagVals{}, name});
        add_common_flags(subs.back().cmd, subs.back().flags);
        return subs.back().cmd;
    };

    add_experiment("separation", "fq vs measure-first TV table across n");
    auto *hm_cmd = add_experiment("hm", "Hidden Matching success rates");
    auto *dist_cmd = add_experiment("distinguish", "PRF-vs-uniform distinguisher probabilities");
    add_experiment("learn-fq", "train the fully-quantum learner once and dump its description");
    add_experiment("learn-mf", "train a measure-first learner once and dump its description");
    add_experiment("report", "regenerate summary and plots from an existing results.csv");

    for (auto &sub : subs) {
        if (sub.cmd == hm_cmd) {
            sub.cmd->add_option("--protocols", sub.flags.protocols,
                                "quantum | guess | classical:c=<pairs> | reduction:<strategy>")
                ->delimiter(',');
            sub.cmd->add_option("--trials", sub.flags.trials, "instances per protocol");
            sub.cmd->add_flag("--transcripts", sub.flags.transcripts,
                              "write per-instance game transcripts");
        }
        if (sub.cmd == dist_cmd) {
            sub.cmd->add_option("--trials", sub.flags.trials, "trials per arm");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify_cmd->parsed()) {
            return run_verify_command(verify_flags.seed);
        }
        for (auto &sub : subs) {
            if (!sub.cmd->parsed()) {
                continue;
            }
            qlsep::json overrides = overrides_from_flags(sub.cmd, sub.flags, sub.name);
            if (sub.cmd == hm_cmd && sub.cmd->count("--protocols")) {
                overrides["hm"] = qlsep::json{{"protocols", sub.flags.protocols}};
            }
            if (sub.cmd == hm_cmd && sub.cmd->count("--trials")) {
                if (!overrides.contains("hm")) {
                    overrides["hm"] = qlsep::json::object();
                }
                overrides["hm"]["trials"] = sub.flags.trials;
            }
            if (sub.cmd == hm_cmd && sub.flags.transcripts) {
                overrides["transcripts"] = true;
            }
            if (sub.cmd == dist_cmd && sub.cmd->count("--trials")) {
                overrides["distinguish"] = qlsep::json{{"trials", sub.flags.trials}};
            }
            const qlsep::ExperimentConfig config = qlsep::load_config(sub.flags.config, overrides);
            const qlsep::RunManifest manifest = qlsep::run_experiment(config);
            print_manifest(manifest, config.out_dir);
            return 0;
        }
    } catch (const qlsep::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qlsep::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
