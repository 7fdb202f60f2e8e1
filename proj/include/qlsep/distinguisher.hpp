#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/mf_learner.hpp"
#include "qlsep/parallel.hpp"
#include "qlsep/prf.hpp"
#include "qlsep/stats.hpp"

namespace qlsep {

struct DistinguisherConfig {
    int n = 8;
    Strategy strategy;
    int train_examples = 3;
    // T_x^M is generated from pseudorandom phase states; the oracle f under
    // test may be either PRF-backed or a uniform truth table.
    PrfSpec train_prf;
    bool include_zero_x = false;

    FSource train_source() const { return FSource::prf_keys(train_prf); }
};

// The six-step distinguisher A^f: sample x, generate T_x^M from fresh
// PRF-backed examples, train the measure-first learner, measure the
// oracle-backed phase state, generate one sample, and accept iff the sample
// lands in R_f(x). The oracle is a classical point-query interface; quantum
// access enters only through the phase-state preparation.
inline int distinguisher_run(const BoolFunc &f, const DistinguisherConfig &cfg, Rng &rng,
                             bool *train_error = nullptr) {
    const int n = f.n();
    const std::uint64_t x =
        cfg.include_zero_x ? rng.next_bits(n) : rng.next_nonzero_bits(n);

    MfGenerator gen;
    try {
        const FSource source = cfg.train_source();
        std::vector<std::pair<ClassicalRep, Label>> data;
        data.reserve(static_cast<std::size_t>(cfg.train_examples));
        for (int i = 0; i < cfg.train_examples; ++i) {
            BoolFunc fi = source.draw(n, rng);
            ClassicalRep rep = measure(cfg.strategy, fi, cfg.strategy.ell, rng);
            Label label;
            label.mode = LabelMode::FullX;
            label.full = concept_sample(fi, x, rng);
            data.emplace_back(std::move(rep), label);
        }
        gen = measure_first_learn(cfg.strategy, data);
    } catch (const Error &) {
        // A failed training run cannot certify membership; count it as 0.
        if (train_error != nullptr) {
            *train_error = true;
        }
        return 0;
    }

    const ClassicalRep rep = measure(cfg.strategy, f, cfg.strategy.ell, rng);
    const ConceptSample s = mf_generate(gen, rep, rng);
    return in_relation(f, x, s.y, s.b) ? 1 : 0;
}

struct DistinguisherReport {
    std::string spec_version;
    int n = 0;
    std::string strategy;
    int ell = 0;
    int trials = 0;
    double p_prf = 0.0;
    double p_rand = 0.0;
    double gap = 0.0;
    Interval ci_prf;
    Interval ci_rand;
    Interval gap_ci;
    int train_errors_prf = 0;
    int train_errors_rand = 0;
};

// Estimates Pr[A^{f^(k)} = 1] over fresh PRF keys and Pr[A^f = 1] over
// fresh uniform truth tables. A reproducible nonzero gap would expose the
// PRF construction, not the learner.
inline DistinguisherReport estimate_advantage(const PrfSpec &spec, const DistinguisherConfig &cfg,
                                              int trials, Rng &rng, int threads = 1) {
    if (trials < 1) {
        throw ConfigError("estimate_advantage: trials must be >= 1");
    }
    DistinguisherReport report;
    report.spec_version = spec.version;
    report.n = cfg.n;
    report.strategy = cfg.strategy.id();
    report.ell = cfg.strategy.ell;
    report.trials = trials;

    std::vector<int> prf_hits(static_cast<std::size_t>(trials), 0);
    std::vector<int> rand_hits(static_cast<std::size_t>(trials), 0);
    std::vector<int> prf_errs(static_cast<std::size_t>(trials), 0);
    std::vector<int> rand_errs(static_cast<std::size_t>(trials), 0);

    Rng prf_rng = rng.child(1);
    Rng rand_rng = rng.child(2);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        {
            Rng trial_rng = prf_rng.child(t);
            const BoolFunc f = BoolFunc::prf_backed(cfg.n, spec, sample_key(spec, trial_rng));
            bool err = false;
            prf_hits[t] = distinguisher_run(f, cfg, trial_rng, &err);
            prf_errs[t] = err ? 1 : 0;
        }
        {
            Rng trial_rng = rand_rng.child(t);
            const BoolFunc f = BoolFunc::random_table(cfg.n, trial_rng);
            bool err = false;
            rand_hits[t] = distinguisher_run(f, cfg, trial_rng, &err);
            rand_errs[t] = err ? 1 : 0;
        }
    });

    std::size_t s_prf = 0;
    std::size_t s_rand = 0;
    for (int t = 0; t < trials; ++t) {
        s_prf += static_cast<std::size_t>(prf_hits[static_cast<std::size_t>(t)]);
        s_rand += static_cast<std::size_t>(rand_hits[static_cast<std::size_t>(t)]);
        report.train_errors_prf += prf_errs[static_cast<std::size_t>(t)];
        report.train_errors_rand += rand_errs[static_cast<std::size_t>(t)];
    }
    const auto nt = static_cast<std::size_t>(trials);
    report.p_prf = static_cast<double>(s_prf) / static_cast<double>(nt);
    report.p_rand = static_cast<double>(s_rand) / static_cast<double>(nt);
    report.gap = report.p_prf - report.p_rand;
    report.ci_prf = wilson_interval(s_prf, nt);
    report.ci_rand = wilson_interval(s_rand, nt);
    report.gap_ci = proportion_diff_interval(s_prf, nt, s_rand, nt);
    return report;
}

} // namespace qlsep
