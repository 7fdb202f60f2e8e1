#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlsep/bitvec.hpp"
#include "qlsep/concepts.hpp"
#include "qlsep/distinguisher.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/evaluation.hpp"
#include "qlsep/fq_learner.hpp"
#include "qlsep/mf_learner.hpp"

namespace qlsep {

using json = nlohmann::json;

// --- hex <-> bits ---------------------------------------------------------
// Bits pack little-endian into bytes (bit k lives in byte k/8 at position
// k%8); bytes print as two lowercase hex digits each.

inline std::string bits_to_hex(const BitVec &v) {
    static const char *digits = "0123456789abcdef";
    const std::size_t nbytes = (v.size() + 7) / 8;
    std::string out;
    out.reserve(2 * nbytes);
    for (std::size_t i = 0; i < nbytes; ++i) {
        const std::size_t word = i / 8;
        const unsigned byte =
            word < v.words().size()
                ? static_cast<unsigned>((v.words()[word] >> (8 * (i % 8))) & 0xffu)
                : 0u;
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

inline BitVec hex_to_bits(const std::string &hex, std::size_t len) {
    if (hex.size() != 2 * ((len + 7) / 8)) {
        throw DimensionError("hex_to_bits: hex length does not match bit count");
    }
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') {
            return static_cast<unsigned>(c - '0');
        }
        if (c >= 'a' && c <= 'f') {
            return static_cast<unsigned>(c - 'a' + 10);
        }
        if (c >= 'A' && c <= 'F') {
            return static_cast<unsigned>(c - 'A' + 10);
        }
        throw CorruptDataError("hex_to_bits: invalid hex digit");
    };
    BitVec v(len);
    auto &words = v.mutable_words();
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
        const std::uint64_t byte = (nibble(hex[i]) << 4) | nibble(hex[i + 1]);
        const std::size_t byte_index = i / 2;
        words[byte_index / 8] |= byte << (8 * (byte_index % 8));
    }
    const std::vector<std::uint64_t> raw = words;
    v.mask_tail();
    if (v.words() != raw) {
        throw CorruptDataError("hex_to_bits: nonzero padding bits beyond the stated length");
    }
    return v;
}

inline std::string u64_to_hex(std::uint64_t v, int nbits) {
    return bits_to_hex(BitVec::from_u64(v, static_cast<std::size_t>(nbits)));
}

inline std::uint64_t hex_to_u64(const std::string &hex, int nbits) {
    return hex_to_bits(hex, static_cast<std::size_t>(nbits)).to_u64();
}

// Deterministic, locale-independent float formatting: the shortest string
// that round-trips to the same double, so CSV values survive re-reading.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// --- learner output -------------------------------------------------------

inline json learner_output_to_json(const LearnerOutput &out) {
    json cnots = json::array();
    for (const auto &[c, t] : out.circuit.cnots) {
        cnots.push_back(json::array({c, t}));
    }
    return json{{"n", out.circuit.n},
                {"x", u64_to_hex(out.circuit.x, out.circuit.n)},
                {"pivot", out.circuit.pivot},
                {"cnots", cnots},
                {"decode", kDecodeRuleVersion},
                {"label_mode", label_mode_name(out.label_mode)},
                {"examples_used", out.examples_used}};
}

inline LearnerOutput learner_output_from_json(const json &j) {
    LearnerOutput out;
    out.circuit.n = j.at("n").get<int>();
    out.circuit.x = hex_to_u64(j.at("x").get<std::string>(), out.circuit.n);
    out.circuit.pivot = j.at("pivot").get<int>();
    for (const auto &pair : j.at("cnots")) {
        out.circuit.cnots.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    }
    if (j.at("decode").get<std::string>() != kDecodeRuleVersion) {
        throw CorruptDataError("learner_output_from_json: unknown decode rule version");
    }
    if (j.contains("label_mode")) {
        out.label_mode = j.at("label_mode").get<std::string>() == "parity" ? LabelMode::Parity
                                                                           : LabelMode::FullX;
    }
    if (j.contains("examples_used")) {
        out.examples_used = j.at("examples_used").get<std::size_t>();
    }
    return out;
}

// --- classical representations --------------------------------------------

inline json classical_rep_to_json(const ClassicalRep &rep) {
    return json{{"strategy", rep.strategy_id}, {"m", rep.m},
                {"bits", bits_to_hex(rep.bits)}, {"layout", rep.layout},
                {"n", rep.n},                    {"ell", rep.ell}};
}

inline ClassicalRep classical_rep_from_json(const json &j) {
    ClassicalRep rep;
    rep.strategy_id = j.at("strategy").get<std::string>();
    rep.layout = j.at("layout").get<std::string>();
    rep.n = j.at("n").get<int>();
    rep.ell = j.at("ell").get<int>();
    rep.m = j.at("m").get<std::int64_t>();
    rep.bits = hex_to_bits(j.at("bits").get<std::string>(), static_cast<std::size_t>(rep.m));
    return rep;
}

// --- training datasets (JSON lines) ----------------------------------------

inline json training_example_to_json(const TrainingExample &ex) {
    json jf;
    if (ex.f.is_prf_backed()) {
        jf = json{{"prf_key", bits_to_hex(ex.f.prf_key())},
                  {"key_bits", ex.f.prf_spec().key_bits},
                  {"version", ex.f.prf_spec().version}};
    } else {
        jf = bits_to_hex(ex.f.table());
    }
    const int n = ex.f.n();
    return json{{"f", jf},
                {"ell", ex.ell},
                {"label",
                 json{{"mode", label_mode_name(ex.label.mode)},
                      {"bits", bits_to_hex(ex.label.to_bits(n))}}},
                {"n", n}};
}

inline TrainingExample training_example_from_json(const json &j) {
    TrainingExample ex;
    const int n = j.at("n").get<int>();
    const auto &jf = j.at("f");
    if (jf.is_object()) {
        PrfSpec spec;
        spec.key_bits = jf.at("key_bits").get<int>();
        spec.version = jf.at("version").get<std::string>();
        ex.f = BoolFunc::prf_backed(
            n, spec,
            hex_to_bits(jf.at("prf_key").get<std::string>(),
                        static_cast<std::size_t>(spec.key_bits)));
    } else {
        ex.f = BoolFunc::from_table(n, hex_to_bits(jf.get<std::string>(), std::size_t{1} << n));
    }
    ex.ell = j.at("ell").get<int>();
    const auto &jl = j.at("label");
    const LabelMode mode =
        jl.at("mode").get<std::string>() == "parity" ? LabelMode::Parity : LabelMode::FullX;
    const std::size_t label_bits = mode == LabelMode::FullX
                                       ? 2 * static_cast<std::size_t>(n) + 1
                                       : static_cast<std::size_t>(n) + 1;
    ex.label = Label::from_bits(mode, hex_to_bits(jl.at("bits").get<std::string>(), label_bits), n);
    return ex;
}

inline std::string dataset_to_jsonl(const std::vector<TrainingExample> &data) {
    std::string out;
    for (const auto &ex : data) {
        out += training_example_to_json(ex).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<TrainingExample> dataset_from_jsonl(const std::string &text) {
    std::vector<TrainingExample> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        out.push_back(training_example_from_json(json::parse(line)));
    }
    return out;
}

// --- reports ----------------------------------------------------------------

inline json interval_to_json(const Interval &iv) {
    return json{{"lo", iv.lo}, {"hi", iv.hi}};
}

inline json eval_report_to_json(const EvalReport &r) {
    return json{{"n", r.n},
                {"x", u64_to_hex(r.x, r.n)},
                {"protocol", r.protocol},
                {"strategy", r.strategy},
                {"ell", r.ell},
                {"m", r.m},
                {"f_source", r.f_source},
                {"exact", r.exact},
                {"criteria",
                 json{{"epsilon", r.criteria.epsilon},
                      {"delta", r.criteria.delta},
                      {"p_succ", r.criteria.p_succ}}},
                {"tv", r.tv},
                {"delta_hat", r.delta_hat},
                {"delta_hat_mean", r.delta_hat_mean},
                {"p_hat", r.p_hat},
                {"delta_ci", interval_to_json(r.delta_ci)},
                {"p_ci", interval_to_json(r.p_ci)},
                {"verdict", r.verdict}};
}

inline json distinguisher_report_to_json(const DistinguisherReport &r) {
    return json{{"spec_version", r.spec_version},
                {"n", r.n},
                {"strategy", r.strategy},
                {"ell", r.ell},
                {"trials", r.trials},
                {"p_prf", r.p_prf},
                {"p_rand", r.p_rand},
                {"gap", r.gap},
                {"ci", json{{"prf", interval_to_json(r.ci_prf)},
                            {"rand", interval_to_json(r.ci_rand)},
                            {"gap", interval_to_json(r.gap_ci)}}},
                {"train_errors",
                 json{{"prf", r.train_errors_prf}, {"rand", r.train_errors_rand}}}};
}

// --- separation CSV ---------------------------------------------------------

inline std::string separation_csv_header() {
    return "n,protocol,strategy,ell,m,f_source,trial,tv_exact_or_emp,indicator,seed\n";
}

inline std::string separation_row_to_csv(const SeparationRow &row) {
    std::ostringstream out;
    out << row.n << ',' << row.protocol << ',' << row.strategy << ',' << row.ell << ',' << row.m
        << ',' << row.f_source << ',' << row.trial << ',' << fmt_double(row.tv) << ','
        << row.indicator << ',' << row.seed << '\n';
    return out.str();
}

inline std::string separation_rows_to_csv(const std::vector<SeparationRow> &rows) {
    std::string out = separation_csv_header();
    for (const auto &row : rows) {
        out += separation_row_to_csv(row);
    }
    return out;
}

inline std::vector<SeparationRow> separation_rows_from_csv(const std::string &text) {
    std::vector<SeparationRow> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (first) {
            first = false;
            continue;  // header
        }
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 10) {
            throw CorruptDataError("separation_rows_from_csv: bad column count");
        }
        SeparationRow row;
        row.n = std::stoi(fields[0]);
        row.protocol = fields[1];
        row.strategy = fields[2];
        row.ell = std::stoi(fields[3]);
        row.m = std::stoll(fields[4]);
        row.f_source = fields[5];
        row.trial = std::stoi(fields[6]);
        row.tv = std::stod(fields[7]);
        row.indicator = std::stoi(fields[8]);
        row.seed = std::stoull(fields[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json separation_summary_to_json(const SeparationSummary &s) {
    return json{{"n", s.n},
                {"protocol", s.protocol},
                {"strategy", s.strategy},
                {"ell", s.ell},
                {"m", s.m},
                {"tv_median", s.tv_median},
                {"tv_q25", s.tv_q25},
                {"tv_q75", s.tv_q75},
                {"delta_hat", s.delta_hat},
                {"p_hat", s.p_hat},
                {"rows", s.rows}};
}

// --- files -------------------------------------------------------------------

inline void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("write_file: cannot open " + path);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("read_file: cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qlsep
