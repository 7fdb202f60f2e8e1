#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/evaluation.hpp"
#include "qlsep/io.hpp"
#include "qlsep/mf_learner.hpp"
#include "qlsep/prf.hpp"

namespace qlsep {

// JSON parse that rejects duplicate keys instead of silently keeping the
// last occurrence.
inline json parse_json_strict(const std::string &text) {
    std::vector<std::set<std::string>> stack;
    json::parser_callback_t cb = [&stack](int /*depth*/, json::parse_event_t event,
                                          json &parsed) -> bool {
        if (event == json::parse_event_t::object_start) {
            stack.emplace_back();
        } else if (event == json::parse_event_t::object_end) {
            stack.pop_back();
        } else if (event == json::parse_event_t::key) {
            const auto key = parsed.get<std::string>();
            if (!stack.back().insert(key).second) {
                throw ConfigError("config: duplicate key '" + key + "'");
            }
        }
        return true;
    };
    try {
        return json::parse(text, cb);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// Everything an experiment run needs, validated up front and echoed
// verbatim into every output artifact.
struct ExperimentConfig {
    std::string experiment = "separation";
    std::vector<int> n_list{2, 4, 6, 8};
    int ell = 0;              // 0 -> honest default 10 n^2
    std::int64_t m_budget = 0;  // 0 -> 3 n ell
    std::vector<std::string> strategies{"pauli-shadows"};
    bool allow_leaky = false;
    LabelMode label_mode = LabelMode::FullX;
    std::string f_source = "uniform";  // uniform | prf
    int f_trials = 50;
    int protocol_trials = 5;
    int train_examples = 3;
    EvalCriteria criteria;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;
    bool exact = true;
    int empirical_trials = 100000;
    std::string x_mode = "sampled";  // sampled | exhaustive
    bool include_zero_x = false;
    bool transcripts = false;
    PrfSpec prf;

    std::vector<std::string> hm_protocols{"quantum", "classical:c=8", "reduction:pauli-shadows"};
    int hm_trials = 2000;
    int distinguish_trials = 1000;

    int ell_for(int n) const { return ell > 0 ? ell : default_ell(n); }

    std::int64_t budget_for(int n) const {
        return m_budget > 0 ? m_budget : std::int64_t{3} * n * ell_for(n);
    }

    FSource make_f_source() const {
        return f_source == "prf" ? FSource::prf_keys(prf) : FSource::uniform();
    }
};

namespace config_detail {

inline void expect_keys(const json &j, const std::set<std::string> &known,
                        const std::string &where) {
    for (const auto &item : j.items()) {
        if (!known.contains(item.key())) {
            throw ConfigError("config: unknown key '" + where + item.key() + "'");
        }
    }
}

template <typename T>
T get_or(const json &j, const std::string &key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError("config: key '" + key + "' has the wrong type");
    }
}

} // namespace config_detail

inline ExperimentConfig config_from_json(const json &j) {
    using config_detail::get_or;
    static const std::set<std::string> known{
        "experiment",  "n",           "ell",          "m_budget",    "strategies",
        "allow_leaky", "label_mode",  "f_source",     "f_trials",    "protocol_trials",
        "train_examples", "criteria", "seed",         "out",         "threads",
        "exact",       "empirical_trials", "x_mode",  "include_zero_x", "transcripts",
        "prf",         "hm",          "distinguish"};
    config_detail::expect_keys(j, known, "");

    ExperimentConfig c;
    c.experiment = get_or<std::string>(j, "experiment", c.experiment);
    c.n_list = get_or<std::vector<int>>(j, "n", c.n_list);
    c.ell = get_or<int>(j, "ell", c.ell);
    c.m_budget = get_or<std::int64_t>(j, "m_budget", c.m_budget);
    c.strategies = get_or<std::vector<std::string>>(j, "strategies", c.strategies);
    c.allow_leaky = get_or<bool>(j, "allow_leaky", c.allow_leaky);
    const std::string lm = get_or<std::string>(j, "label_mode", "full-x");
    if (lm == "full-x") {
        c.label_mode = LabelMode::FullX;
    } else if (lm == "parity") {
        c.label_mode = LabelMode::Parity;
    } else {
        throw ConfigError("config: label_mode must be 'full-x' or 'parity'");
    }
    c.f_source = get_or<std::string>(j, "f_source", c.f_source);
    c.f_trials = get_or<int>(j, "f_trials", c.f_trials);
    c.protocol_trials = get_or<int>(j, "protocol_trials", c.protocol_trials);
    c.train_examples = get_or<int>(j, "train_examples", c.train_examples);
    if (j.contains("criteria")) {
        const auto &jc = j.at("criteria");
        config_detail::expect_keys(jc, {"epsilon", "delta", "p_succ"}, "criteria.");
        c.criteria.epsilon = get_or<double>(jc, "epsilon", c.criteria.epsilon);
        c.criteria.delta = get_or<double>(jc, "delta", c.criteria.delta);
        c.criteria.p_succ = get_or<double>(jc, "p_succ", c.criteria.p_succ);
    }
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.out_dir = get_or<std::string>(j, "out", c.out_dir);
    c.threads = get_or<int>(j, "threads", c.threads);
    c.exact = get_or<bool>(j, "exact", c.exact);
    c.empirical_trials = get_or<int>(j, "empirical_trials", c.empirical_trials);
    c.x_mode = get_or<std::string>(j, "x_mode", c.x_mode);
    c.include_zero_x = get_or<bool>(j, "include_zero_x", c.include_zero_x);
    c.transcripts = get_or<bool>(j, "transcripts", c.transcripts);
    if (j.contains("prf")) {
        const auto &jp = j.at("prf");
        config_detail::expect_keys(jp, {"key_bits"}, "prf.");
        c.prf.key_bits = get_or<int>(jp, "key_bits", c.prf.key_bits);
    }
    if (j.contains("hm")) {
        const auto &jh = j.at("hm");
        config_detail::expect_keys(jh, {"protocols", "trials"}, "hm.");
        c.hm_protocols = get_or<std::vector<std::string>>(jh, "protocols", c.hm_protocols);
        c.hm_trials = get_or<int>(jh, "trials", c.hm_trials);
    }
    if (j.contains("distinguish")) {
        const auto &jd = j.at("distinguish");
        config_detail::expect_keys(jd, {"trials"}, "distinguish.");
        c.distinguish_trials = get_or<int>(jd, "trials", c.distinguish_trials);
    }
    return c;
}

inline void validate_config(const ExperimentConfig &c) {
    static const std::set<std::string> experiments{"separation", "hm",       "distinguish",
                                                   "learn-fq",   "learn-mf", "verify",
                                                   "report"};
    if (!experiments.contains(c.experiment)) {
        throw ConfigError("config: unknown experiment '" + c.experiment + "'");
    }
    if (c.n_list.empty()) {
        throw ConfigError("config: 'n' must list at least one qubit count");
    }
    // TV-based experiments score against the exact concept distribution, so
    // they cap at n = 12 whichever generator mode is active; the HM game and
    // the distinguisher only test relation membership and run to the
    // simulator cap.
    const bool needs_exact_concept = c.experiment == "separation" ||
                                     c.experiment == "learn-fq" ||
                                     c.experiment == "learn-mf" || c.experiment == "report";
    const int n_cap = needs_exact_concept ? kMaxExactQubits : kMaxSimQubits;
    for (int n : c.n_list) {
        if (n < 1 || n > n_cap) {
            throw ConfigError("config: n=" + std::to_string(n) + " outside 1.." +
                              std::to_string(n_cap) + " for experiment '" + c.experiment + "'");
        }
    }
    c.criteria.validate();
    if (c.ell < 0 || c.f_trials < 1 || c.protocol_trials < 1 || c.train_examples < 1 ||
        c.threads < 1 || c.empirical_trials < 1 || c.hm_trials < 1 || c.distinguish_trials < 1) {
        throw ConfigError("config: trial/thread/budget counts must be positive");
    }
    if (c.f_source != "uniform" && c.f_source != "prf") {
        throw ConfigError("config: f_source must be 'uniform' or 'prf'");
    }
    if (c.x_mode != "sampled" && c.x_mode != "exhaustive") {
        throw ConfigError("config: x_mode must be 'sampled' or 'exhaustive'");
    }
    if (c.x_mode == "exhaustive") {
        for (int n : c.n_list) {
            if (n > kMaxExactQubits) {
                throw ConfigError("config: exhaustive x sweep supports n <= 12");
            }
        }
    }
    static const std::set<std::string> known_strategies{"pauli-shadows", "fourier",
                                                        "leaky-full-table"};
    for (const auto &s : c.strategies) {
        if (!known_strategies.contains(s)) {
            throw ConfigError("config: unknown strategy '" + s + "'");
        }
        if (s == "leaky-full-table" && !c.allow_leaky) {
            throw ConfigError(
                "config: strategy 'leaky-full-table' requires allow_leaky=true (m = 2^n "
                "ignores the budget)");
        }
    }
    // Honest strategies must fit the classical-bit budget m <= budget(n).
    for (int n : c.n_list) {
        const std::int64_t budget = c.budget_for(n);
        for (const auto &s : c.strategies) {
            if (s == "leaky-full-table") {
                continue;
            }
            Strategy strat = s == "fourier" ? Strategy::fourier(c.ell_for(n), 0)
                                            : Strategy::pauli_shadows(c.ell_for(n), 0);
            if (strat.rep_bits(n) > budget) {
                throw ConfigError("config: strategy '" + s + "' needs m=" +
                                  std::to_string(strat.rep_bits(n)) + " bits at n=" +
                                  std::to_string(n) + ", over the budget " +
                                  std::to_string(budget));
            }
        }
    }
    if (c.prf.key_bits <= 0 || c.prf.key_bits % 64 != 0) {
        throw ConfigError("config: prf.key_bits must be a positive multiple of 64");
    }
}

inline json config_to_json(const ExperimentConfig &c) {
    return json{{"experiment", c.experiment},
                {"n", c.n_list},
                {"ell", c.ell},
                {"m_budget", c.m_budget},
                {"strategies", c.strategies},
                {"allow_leaky", c.allow_leaky},
                {"label_mode", label_mode_name(c.label_mode)},
                {"f_source", c.f_source},
                {"f_trials", c.f_trials},
                {"protocol_trials", c.protocol_trials},
                {"train_examples", c.train_examples},
                {"criteria",
                 json{{"epsilon", c.criteria.epsilon},
                      {"delta", c.criteria.delta},
                      {"p_succ", c.criteria.p_succ}}},
                {"seed", c.seed},
                {"out", c.out_dir},
                {"threads", c.threads},
                {"exact", c.exact},
                {"empirical_trials", c.empirical_trials},
                {"x_mode", c.x_mode},
                {"include_zero_x", c.include_zero_x},
                {"transcripts", c.transcripts},
                {"prf", json{{"key_bits", c.prf.key_bits}}},
                {"hm", json{{"protocols", c.hm_protocols}, {"trials", c.hm_trials}}},
                {"distinguish", json{{"trials", c.distinguish_trials}}}};
}

namespace config_detail {

inline void deep_merge(json &base, const json &overlay) {
    for (const auto &item : overlay.items()) {
        if (item.value().is_object() && base.contains(item.key()) &&
            base.at(item.key()).is_object()) {
            deep_merge(base.at(item.key()), item.value());
        } else {
            base[item.key()] = item.value();
        }
    }
}

} // namespace config_detail

// File config (optional) with flag overrides merged on top; flags win.
inline ExperimentConfig load_config(const std::string &path, const json &overrides) {
    json merged = json::object();
    if (!path.empty()) {
        merged = parse_json_strict(read_file(path));
        if (!merged.is_object()) {
            throw ConfigError("config: top level must be an object");
        }
    }
    config_detail::deep_merge(merged, overrides);
    ExperimentConfig c = config_from_json(merged);
    validate_config(c);
    return c;
}

} // namespace qlsep
