#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/fq_learner.hpp"
#include "qlsep/mf_learner.hpp"
#include "qlsep/parallel.hpp"
#include "qlsep/rng.hpp"
#include "qlsep/stats.hpp"

namespace qlsep {

// Learnability criteria (epsilon, delta, p_succ). The success inequality is
// the literal one from the definitions: a trial's f counts as good when
// TV(pi_tilde_x(f), pi_x(f)) <= 1 - epsilon, so a perfect generator passes
// every epsilon < 1.
struct EvalCriteria {
    double epsilon = 0.95;
    double delta = 0.9;
    double p_succ = 0.9;

    void validate() const {
        if (epsilon < 0.0 || epsilon > 1.0 || delta < 0.0 || delta > 1.0 || p_succ < 0.0 ||
            p_succ > 1.0) {
            throw ConfigError("EvalCriteria: epsilon, delta, p_succ must lie in [0,1]");
        }
    }

    bool tv_good(double tv) const { return tv <= 1.0 - epsilon; }
};

struct FqProtocolSpec {
    LabelMode label_mode = LabelMode::FullX;
    int examples = 1;
    int ell = 1;
};

struct MfProtocolSpec {
    Strategy strategy;
    LabelMode label_mode = LabelMode::FullX;
    int examples = 3;
};

using ProtocolSpec = std::variant<FqProtocolSpec, MfProtocolSpec>;

inline std::string protocol_name(const ProtocolSpec &p) {
    return std::holds_alternative<FqProtocolSpec>(p) ? "fq" : "mf";
}

inline std::string protocol_strategy_id(const ProtocolSpec &p) {
    if (const auto *mf = std::get_if<MfProtocolSpec>(&p)) {
        return mf->strategy.id();
    }
    return "-";
}

inline int protocol_ell(const ProtocolSpec &p) {
    if (const auto *mf = std::get_if<MfProtocolSpec>(&p)) {
        return mf->strategy.ell;
    }
    return std::get<FqProtocolSpec>(p).ell;
}

inline std::int64_t protocol_rep_bits(const ProtocolSpec &p, int n) {
    if (const auto *mf = std::get_if<MfProtocolSpec>(&p)) {
        return mf->strategy.rep_bits(n);
    }
    return 0;
}

struct TrainedFq {
    LearnerOutput output;
};

struct TrainedMf {
    MfGenerator gen;
    Strategy strategy;
};

using TrainedGenerator = std::variant<TrainedFq, TrainedMf>;

// One training run of either protocol on fresh data for concept x.
inline TrainedGenerator train_protocol(const ProtocolSpec &spec, std::uint64_t x,
                                       const FSource &f_source, int n, Rng &rng) {
    if (const auto *fq = std::get_if<FqProtocolSpec>(&spec)) {
        auto data = generate_training_data(x, fq->examples, fq->ell, fq->label_mode, f_source, n,
                                           rng);
        return TrainedFq{fully_quantum_learn(data)};
    }
    const auto &mf = std::get<MfProtocolSpec>(spec);
    std::vector<std::pair<ClassicalRep, Label>> data;
    data.reserve(static_cast<std::size_t>(mf.examples));
    for (int i = 0; i < mf.examples; ++i) {
        BoolFunc f = f_source.draw(n, rng);
        ClassicalRep rep = measure(mf.strategy, f, mf.strategy.ell, rng);
        Label label;
        label.mode = mf.label_mode;
        if (mf.label_mode == LabelMode::FullX) {
            label.full = concept_sample(f, x, rng);
        } else {
            label.parity_i = rng.next_bits(n);
            label.parity_bit = dot_u64(label.parity_i, x);
        }
        data.emplace_back(std::move(rep), label);
    }
    return TrainedMf{measure_first_learn(mf.strategy, data), mf.strategy};
}

// A trained generator bound to one concrete input: the fq circuit holds the
// post-circuit statevector for f; the mf generator holds one measured
// classical representation of f. Binding is where the measure-first
// pipeline's information loss happens.
class BoundGenerator {
  public:
    static BoundGenerator bind(const TrainedGenerator &gen, const BoolFunc &f, Rng &rng,
                               int cap = kMaxSimQubits) {
        BoundGenerator b;
        if (const auto *fq = std::get_if<TrainedFq>(&gen)) {
            b.circuit_ = fq->output.circuit;
            b.state_ = prepare_phase_state(f, cap);
            apply_matching_circuit(*b.state_, b.circuit_);
            b.is_fq_ = true;
            return b;
        }
        const auto &mf = std::get<TrainedMf>(gen);
        b.mf_gen_ = mf.gen;
        b.rep_ = measure(mf.strategy, f, mf.strategy.ell, rng, cap);
        b.is_fq_ = false;
        return b;
    }

    ConceptSample sample(Rng &rng) const {
        if (is_fq_) {
            const std::uint64_t w = sample_outcome(*state_, rng);
            auto [y0, bb] = decode_outcome(circuit_, w);
            ConceptSample s;
            s.n = circuit_.n;
            s.x = circuit_.x;
            s.y = rng.coin() ? (y0 ^ circuit_.x) : y0;
            s.b = bb;
            return s;
        }
        return mf_generate(*mf_gen_, *rep_, rng);
    }

    ConceptDistribution exact_distribution() const {
        if (is_fq_) {
            ConceptDistribution d;
            d.n = circuit_.n;
            d.x = circuit_.x;
            d.p.assign(std::size_t{1} << (circuit_.n + 1), 0.0);
            const auto born = outcome_distribution(*state_);
            for (std::uint64_t w = 0; w < born.size(); ++w) {
                if (born[w] == 0.0) {
                    continue;
                }
                auto [y0, bb] = decode_outcome(circuit_, w);
                d.at(y0, bb) += 0.5 * born[w];
                d.at(y0 ^ circuit_.x, bb) += 0.5 * born[w];
            }
            return d;
        }
        return mf_exact_distribution(*mf_gen_, *rep_);
    }

    bool has_exact_mode() const {
        return (is_fq_ ? circuit_.n : mf_gen_->n) <= kMaxExactQubits;
    }

    const ClassicalRep &rep() const { return *rep_; }

  private:
    bool is_fq_ = true;
    MatchingCircuit circuit_;
    std::optional<StateVector> state_;
    std::optional<MfGenerator> mf_gen_;
    std::optional<ClassicalRep> rep_;
};

struct EmpiricalDistribution {
    ConceptDistribution dist;
    // TV between the frequency vector and the exact distribution is bounded
    // by sqrt(|outcome space| / trials) with high probability; logged next
    // to every empirical result.
    double stat_bound = 0.0;
};

inline EmpiricalDistribution empirical_distribution(const BoundGenerator &gen, int n, int trials,
                                                    Rng &rng) {
    if (trials < 1) {
        throw ConfigError("empirical_distribution: trials must be >= 1");
    }
    EmpiricalDistribution out;
    out.dist.n = n;
    out.dist.p.assign(std::size_t{1} << (n + 1), 0.0);
    const double w = 1.0 / static_cast<double>(trials);
    bool first = true;
    for (int t = 0; t < trials; ++t) {
        const ConceptSample s = gen.sample(rng);
        if (first) {
            out.dist.x = s.x;
            first = false;
        }
        out.dist.at(s.y, s.b) += w;
    }
    out.stat_bound =
        std::sqrt(static_cast<double>(std::uint64_t{1} << (2 * n + 1)) / static_cast<double>(trials));
    return out;
}

// TV between the bound generator and pi_x(f), exact when possible.
inline double generator_tv(const BoundGenerator &gen, const BoolFunc &f, std::uint64_t x,
                           bool exact, int empirical_trials, Rng &rng) {
    const ConceptDistribution truth = concept_distribution(f, x);
    if (exact) {
        return tv_distance(gen.exact_distribution(), truth);
    }
    return tv_distance(empirical_distribution(gen, f.n(), empirical_trials, rng).dist, truth);
}

struct EvalReport {
    int n = 0;
    std::uint64_t x = 0;
    std::string protocol;
    std::string strategy = "-";
    int ell = 0;
    std::int64_t m = 0;
    std::string f_source;
    bool exact = true;
    EvalCriteria criteria;
    std::vector<std::vector<double>> tv;  // [protocol_trial][f_trial]
    std::vector<double> delta_hat;        // per protocol trial
    double delta_hat_mean = 0.0;
    double p_hat = 0.0;
    Interval delta_ci;  // Wilson over all pooled f trials
    Interval p_ci;      // Wilson over protocol trials
    bool verdict = false;
};

// The Def. 4/6 criterion as an executable verdict. Each protocol trial
// trains once; delta_hat is the fraction of fresh f with TV <= 1 - epsilon;
// p_hat is the fraction of trials with delta_hat >= delta.
inline EvalReport evaluate_learnability(const ProtocolSpec &spec, std::uint64_t x,
                                        const FSource &f_source, const EvalCriteria &criteria,
                                        int f_trials, int protocol_trials, int n, Rng &rng,
                                        bool exact = true, int empirical_trials = 100000,
                                        int threads = 1) {
    criteria.validate();
    if (f_trials < 1 || protocol_trials < 1) {
        throw ConfigError("evaluate_learnability: trial counts must be >= 1");
    }
    EvalReport report;
    report.n = n;
    report.x = x;
    report.protocol = protocol_name(spec);
    report.strategy = protocol_strategy_id(spec);
    report.ell = protocol_ell(spec);
    report.m = protocol_rep_bits(spec, n);
    report.f_source = f_source.name();
    report.exact = exact;
    report.criteria = criteria;
    report.tv.assign(static_cast<std::size_t>(protocol_trials), {});

    parallel_for(static_cast<std::size_t>(protocol_trials), threads, [&](std::size_t t) {
        Rng trial_rng = rng.child(t);
        Rng train_rng = trial_rng.child(0);
        const TrainedGenerator trained = train_protocol(spec, x, f_source, n, train_rng);
        std::vector<double> tvs(static_cast<std::size_t>(f_trials));
        for (int j = 0; j < f_trials; ++j) {
            Rng f_rng = trial_rng.child(static_cast<std::uint64_t>(j) + 1);
            const BoolFunc f = f_source.draw(n, f_rng);
            const BoundGenerator bound = BoundGenerator::bind(trained, f, f_rng);
            tvs[static_cast<std::size_t>(j)] =
                generator_tv(bound, f, x, exact, empirical_trials, f_rng);
        }
        report.tv[t] = std::move(tvs);
    });

    std::size_t good_total = 0;
    std::size_t trials_meeting_delta = 0;
    for (const auto &trial_tvs : report.tv) {
        std::size_t good = 0;
        for (double tv : trial_tvs) {
            if (criteria.tv_good(tv)) {
                ++good;
            }
        }
        good_total += good;
        const double dh = static_cast<double>(good) / static_cast<double>(f_trials);
        report.delta_hat.push_back(dh);
        if (dh >= criteria.delta) {
            ++trials_meeting_delta;
        }
    }
    report.delta_hat_mean = mean(report.delta_hat);
    report.p_hat =
        static_cast<double>(trials_meeting_delta) / static_cast<double>(protocol_trials);
    report.delta_ci = wilson_interval(good_total,
                                      static_cast<std::size_t>(f_trials) *
                                          static_cast<std::size_t>(protocol_trials));
    report.p_ci = wilson_interval(trials_meeting_delta, static_cast<std::size_t>(protocol_trials));
    report.verdict = report.p_hat >= criteria.p_succ;
    return report;
}

// One per-(n, arm, trial) record of the separation experiment; maps 1:1 to
// a CSV row.
struct SeparationRow {
    int n = 0;
    std::string protocol;
    std::string strategy = "-";
    int ell = 0;
    std::int64_t m = 0;
    std::string f_source;
    int trial = 0;
    double tv = 0.0;
    int indicator = 0;
    std::uint64_t seed = 0;
};

struct SeparationSummary {
    int n = 0;
    std::string protocol;
    std::string strategy = "-";
    int ell = 0;
    std::int64_t m = 0;
    double tv_median = 0.0;
    double tv_q25 = 0.0;
    double tv_q75 = 0.0;
    double delta_hat = 0.0;
    double p_hat = 0.0;
    std::size_t rows = 0;
};

struct SeparationPlan {
    std::vector<int> n_list;
    // Arms: "fq" plus one entry per measure-first strategy id.
    std::vector<std::string> arms{"fq", "pauli-shadows"};
    int f_trials = 50;
    int protocol_trials = 5;
    int ell_override = 0;  // 0 -> the honest default ell = 10 n^2
    int train_examples = 3;
    LabelMode label_mode = LabelMode::FullX;
    FSource f_source = FSource::uniform();
    EvalCriteria criteria;
    bool allow_leaky = false;
    bool exact = true;
    int empirical_trials = 100000;
    bool exhaustive_x = false;  // sweep all nonzero x instead of sampling one per trial
    std::uint64_t seed = 1;
    int threads = 1;
};

inline int default_ell(int n) { return 10 * n * n; }

inline ProtocolSpec make_arm_spec(const std::string &arm, int n, const SeparationPlan &plan) {
    const int ell = plan.ell_override > 0 ? plan.ell_override : default_ell(n);
    if (arm == "fq") {
        FqProtocolSpec fq;
        fq.label_mode = plan.label_mode;
        fq.examples = plan.label_mode == LabelMode::FullX ? 1 : n + 10;
        fq.ell = ell;
        return fq;
    }
    MfProtocolSpec mf;
    mf.label_mode = plan.label_mode;
    mf.examples = plan.label_mode == LabelMode::FullX ? plan.train_examples : n + 10;
    if (arm == "pauli-shadows") {
        mf.strategy = Strategy::pauli_shadows(ell, derive_seed(plan.seed, 0x5ad0));
    } else if (arm == "fourier") {
        mf.strategy = Strategy::fourier(ell, derive_seed(plan.seed, 0xf0f0));
    } else if (arm == "leaky-full-table") {
        if (!plan.allow_leaky) {
            throw BudgetError("separation: leaky-full-table arm requires the budget override");
        }
        mf.strategy = Strategy::leaky(ell, true);
    } else {
        throw ConfigError("separation: unknown arm '" + arm + "'");
    }
    return mf;
}

struct SeparationResult {
    std::vector<SeparationRow> rows;
    std::vector<SeparationSummary> summaries;
};

// Head-to-head demonstration: per (n, arm), protocol_trials independent
// train runs, each evaluated on f_trials fresh functions against a fresh
// target x != 0 per train run (or every nonzero x when exhaustive_x).
inline SeparationResult separation_experiment(const SeparationPlan &plan) {
    plan.criteria.validate();
    if (plan.n_list.empty()) {
        throw ConfigError("separation: empty n list");
    }
    SeparationResult result;
    for (int n : plan.n_list) {
        if (plan.exhaustive_x && n > kMaxExactQubits) {
            throw ConfigError("separation: exhaustive x sweep supports n <= 12");
        }
        for (const auto &arm : plan.arms) {
            const ProtocolSpec spec = make_arm_spec(arm, n, plan);
            // Lane depends only on (n, arm), not on list positions, so any
            // slicing of the plan reproduces identical rows.
            const Rng arm_rng =
                Rng(derive_seed(plan.seed, mix64(static_cast<std::uint64_t>(n)) ^ fnv1a64(arm)));
            const std::size_t x_count =
                plan.exhaustive_x ? ((std::size_t{1} << n) - 1) : 1;
            const std::size_t runs = static_cast<std::size_t>(plan.protocol_trials) * x_count;

            std::vector<std::vector<SeparationRow>> per_run(runs);
            parallel_for(runs, plan.threads, [&](std::size_t run) {
                Rng run_rng = arm_rng.child(run);
                const std::uint64_t x = plan.exhaustive_x
                                            ? (run % x_count) + 1
                                            : run_rng.next_nonzero_bits(n);
                Rng train_rng = run_rng.child(0);
                const TrainedGenerator trained =
                    train_protocol(spec, x, plan.f_source, n, train_rng);
                auto &rows = per_run[run];
                rows.reserve(static_cast<std::size_t>(plan.f_trials));
                for (int j = 0; j < plan.f_trials; ++j) {
                    Rng f_rng = run_rng.child(static_cast<std::uint64_t>(j) + 1);
                    const BoolFunc f = plan.f_source.draw(n, f_rng);
                    const BoundGenerator bound = BoundGenerator::bind(trained, f, f_rng);
                    SeparationRow row;
                    row.n = n;
                    row.protocol = protocol_name(spec);
                    row.strategy = protocol_strategy_id(spec);
                    row.ell = protocol_ell(spec);
                    row.m = protocol_rep_bits(spec, n);
                    row.f_source = plan.f_source.name();
                    row.trial = static_cast<int>(run) * plan.f_trials + j;
                    row.tv = generator_tv(bound, f, x, plan.exact, plan.empirical_trials, f_rng);
                    row.indicator = plan.criteria.tv_good(row.tv) ? 1 : 0;
                    row.seed = f_rng.seed();
                    rows.push_back(std::move(row));
                }
            });

            SeparationSummary summary;
            summary.n = n;
            summary.protocol = protocol_name(spec);
            summary.strategy = protocol_strategy_id(spec);
            summary.ell = protocol_ell(spec);
            summary.m = protocol_rep_bits(spec, n);
            std::vector<double> tvs;
            std::size_t meets_delta = 0;
            std::size_t good_total = 0;
            for (const auto &rows : per_run) {
                std::size_t good = 0;
                for (const auto &row : rows) {
                    tvs.push_back(row.tv);
                    good += static_cast<std::size_t>(row.indicator);
                    result.rows.push_back(row);
                }
                good_total += good;
                if (static_cast<double>(good) / static_cast<double>(plan.f_trials) >=
                    plan.criteria.delta) {
                    ++meets_delta;
                }
            }
            summary.tv_median = median(tvs);
            summary.tv_q25 = quantile(tvs, 0.25);
            summary.tv_q75 = quantile(tvs, 0.75);
            summary.delta_hat = static_cast<double>(good_total) / static_cast<double>(tvs.size());
            summary.p_hat = static_cast<double>(meets_delta) / static_cast<double>(runs);
            summary.rows = tvs.size();
            result.summaries.push_back(std::move(summary));
        }
    }
    return result;
}

} // namespace qlsep
