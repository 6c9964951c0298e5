#ifndef MATEBENCH_INFERENCE_HPP
#define MATEBENCH_INFERENCE_HPP

// The four inference modes. Normal and cheating are single-shot, pass@k
// samples independently, and modulo runs the critic loop: query, check
// legality, check accuracy, re-prompt with feedback until a move passes or
// the budget runs out. Every mode produces an AttemptTranscript.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matebench/chess.hpp"
#include "matebench/engine.hpp"
#include "matebench/model.hpp"
#include "matebench/response.hpp"
#include "matebench/transcript.hpp"
#include "matebench/verify.hpp"

namespace matebench {

// ---------------------------------------------------------------------------
// Prompt construction

struct PromptTemplate {
    std::string base =
        "You are a chess engine. Given the following board position in FEN notation, "
        "provide the single best move in UCI format.\n\nFEN: <fen>\n\nBest move:";
    // Prepended in cheating mode; <eval> becomes e.g. "Mate in 2".
    std::string cheating_prefix = "The current evaluation of this position is: <eval> for you.\n\n";
};

namespace detail {

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
    return s;
}

}  // namespace detail

inline std::string build_prompt(const Position& p, InferenceMode mode,
                                const std::optional<EngineEval>& eval_hint = std::nullopt,
                                const PromptTemplate& tpl = {}) {
    std::string body = detail::replace_all(tpl.base, "<fen>", p.fen());
    if (mode != InferenceMode::Cheating) return body;
    if (!eval_hint) throw std::invalid_argument("cheating prompt requires an evaluation hint");
    return detail::replace_all(tpl.cheating_prefix, "<eval>", eval_phrase(*eval_hint, false)) +
           body;
}

// ---------------------------------------------------------------------------
// Configuration

struct InferenceConfig {
    InferenceMode mode = InferenceMode::Normal;
    int k = 10;  // query budget for pass@k and modulo
    std::optional<double> temperature;  // unset: 0.7 for pass@k/modulo, 0 otherwise
    int max_tokens = 64;
    std::vector<std::string> stop = {"\n"};
    GradingPolicy policy;
    PromptTemplate prompt;

    void validate() const {
        if (k < 1) throw std::invalid_argument("query budget must be at least 1");
    }

    double effective_temperature(InferenceMode m) const {
        if (temperature) return *temperature;
        return m == InferenceMode::PassAtK || m == InferenceMode::Modulo ? 0.7 : 0.0;
    }

    GenerationParams generation_params(InferenceMode m) const {
        GenerationParams g;
        g.temperature = effective_temperature(m);
        g.max_tokens = max_tokens;
        g.stop = stop;
        return g;
    }
};

// ---------------------------------------------------------------------------
// Runners

namespace detail {

inline AttemptTranscript attempt_shell(const Position& p, InferenceMode mode,
                                       const std::string& model_name) {
    AttemptTranscript t;
    t.model = model_name;
    t.fen = p.fen();
    t.mode = mode;
    return t;
}

// One model call appended to the transcript. A transport failure (after the
// gateway's own retries) records the error and ends the attempt; nothing is
// appended because no response exists.
inline std::optional<RawResponse> issue_query(Model& model, const std::string& prompt,
                                              const GenerationParams& params,
                                              AttemptTranscript& t) {
    RawResponse r;
    try {
        r = model.complete(prompt, params);
    } catch (const std::exception& e) {
        t.error = e.what();
        return std::nullopt;
    }
    QueryRecord q;
    q.prompt = prompt;
    q.response = r.text;
    q.token_usage = r.token_usage;
    q.retries = r.retries;
    t.queries.push_back(std::move(q));
    t.queries_used += 1;
    t.total_tokens += count_tokens(r);
    return r;
}

inline bool any_parsed(const AttemptTranscript& t) {
    for (const QueryRecord& q : t.queries)
        if (q.parsed_uci) return true;
    return false;
}

// Final outcome when no query was accepted: a parse failure only if every
// query failed to parse (including the zero-query case).
inline FinalOutcome unaccepted_final(const AttemptTranscript& t) {
    return any_parsed(t) ? FinalOutcome::Incorrect : FinalOutcome::ParseFailure;
}

inline void single_shot(Model& model, const std::string& prompt, const Position& p,
                        const Move& ground_truth, Evaluator& oracle, const InferenceConfig& cfg,
                        AttemptTranscript& t) {
    std::optional<RawResponse> r = issue_query(model, prompt, cfg.generation_params(t.mode), t);
    if (!r) {
        t.final = FinalOutcome::ParseFailure;
        return;
    }
    QueryRecord& q = t.queries.back();
    ParseOutcome outcome = extract_move(r->text, p);
    if (!outcome.parsed()) {
        q.parse_error = outcome.reason();
        t.final = FinalOutcome::ParseFailure;
        return;
    }
    Move m = outcome.move();
    q.parsed_uci = render_uci(m);
    t.graded_uci = q.parsed_uci;
    bool correct;
    try {
        correct = grade(p, m, ground_truth, oracle, cfg.policy);
    } catch (const std::exception& e) {
        t.error = e.what();
        t.final = FinalOutcome::Incorrect;
        return;
    }
    q.verdict = correct ? "correct" : "incorrect";
    t.final = correct ? FinalOutcome::Correct : FinalOutcome::Incorrect;
}

}  // namespace detail

inline AttemptTranscript run_normal(Model& model, const Position& p, const Move& ground_truth,
                                    Evaluator& oracle, const InferenceConfig& cfg) {
    cfg.validate();
    AttemptTranscript t = detail::attempt_shell(p, InferenceMode::Normal, model.name());
    std::string prompt = build_prompt(p, InferenceMode::Normal, std::nullopt, cfg.prompt);
    detail::single_shot(model, prompt, p, ground_truth, oracle, cfg, t);
    return t;
}

inline AttemptTranscript run_cheating(Model& model, const Position& p, const Move& ground_truth,
                                      const EngineEval& eval_hint, Evaluator& oracle,
                                      const InferenceConfig& cfg) {
    cfg.validate();
    AttemptTranscript t = detail::attempt_shell(p, InferenceMode::Cheating, model.name());
    std::string prompt = build_prompt(p, InferenceMode::Cheating, eval_hint, cfg.prompt);
    detail::single_shot(model, prompt, p, ground_truth, oracle, cfg, t);
    return t;
}

// Independent samples with the normal prompt, stopping at the first query
// that grades correct.
inline AttemptTranscript run_pass_at_k(Model& model, const Position& p, const Move& ground_truth,
                                       Evaluator& oracle, const InferenceConfig& cfg) {
    cfg.validate();
    AttemptTranscript t = detail::attempt_shell(p, InferenceMode::PassAtK, model.name());
    std::string prompt = build_prompt(p, InferenceMode::PassAtK, std::nullopt, cfg.prompt);
    GenerationParams params = cfg.generation_params(t.mode);

    while (t.queries_used < cfg.k) {
        std::optional<RawResponse> r = detail::issue_query(model, prompt, params, t);
        if (!r) break;
        QueryRecord& q = t.queries.back();
        ParseOutcome outcome = extract_move(r->text, p);
        if (!outcome.parsed()) {
            q.parse_error = outcome.reason();
            continue;
        }
        Move m = outcome.move();
        q.parsed_uci = render_uci(m);
        bool correct;
        try {
            correct = grade(p, m, ground_truth, oracle, cfg.policy);
        } catch (const std::exception& e) {
            t.error = e.what();
            break;
        }
        q.verdict = correct ? "correct" : "incorrect";
        if (correct) {
            t.graded_uci = q.parsed_uci;
            t.final = FinalOutcome::Correct;
            return t;
        }
    }
    t.final = detail::unaccepted_final(t);
    return t;
}

// The critic loop. Feedback is appended to the context only when the model's
// output differs from the previous query's output (keyed on the parsed move,
// or on the sanitized text when nothing parsed); identical repeats re-send
// the unchanged context. Three consecutive parse failures reset the context
// to the base prompt with all feedback removed. Resets cost no queries; only
// model calls count toward the budget.
inline AttemptTranscript run_modulo(Model& model, const Position& p, const Move& ground_truth,
                                    Evaluator& oracle, const InferenceConfig& cfg) {
    (void)ground_truth;  // correctness is the critics' acceptance; see final note below
    cfg.validate();
    AttemptTranscript t = detail::attempt_shell(p, InferenceMode::Modulo, model.name());
    const std::string base = build_prompt(p, InferenceMode::Modulo, std::nullopt, cfg.prompt);
    GenerationParams params = cfg.generation_params(t.mode);

    std::string context = base;
    std::optional<std::string> prev_key;
    int consecutive_parse_failures = 0;
    std::vector<Move> rejected;
    std::optional<Move> accepted;

    while (t.queries_used < cfg.k && !accepted) {
        std::optional<RawResponse> r = detail::issue_query(model, context, params, t);
        if (!r) break;
        QueryRecord& q = t.queries.back();

        std::string key;
        std::string feedback;
        ParseOutcome outcome = extract_move(r->text, p);
        if (!outcome.parsed()) {
            q.parse_error = outcome.reason();
            q.verdict = "invalid_move";
            key = sanitize(r->text);
            feedback = invalid_move_feedback(p);
            consecutive_parse_failures += 1;
        } else {
            Move m = outcome.move();
            q.parsed_uci = render_uci(m);
            consecutive_parse_failures = 0;
            Verdict v;
            try {
                v = critic_accuracy(p, m, oracle, cfg.policy, rejected);
            } catch (const std::exception& e) {
                t.error = e.what();
                break;
            }
            key = *q.parsed_uci;
            if (v.kind == VerdictKind::Correct) {
                q.verdict = "correct";
                accepted = m;
            } else {
                q.verdict = "valid_but_inaccurate";
                feedback = *v.feedback;
                if (std::find(rejected.begin(), rejected.end(), m) == rejected.end())
                    rejected.push_back(m);
            }
        }
        if (accepted) break;

        if (consecutive_parse_failures == 3) {
            context = base;
            prev_key.reset();
            consecutive_parse_failures = 0;
            t.resets += 1;
        } else if (!prev_key || *prev_key != key) {
            context += "\n\nModel: " + r->text + "\n\nUser: " + feedback;
            q.feedback = feedback;
            prev_key = key;
        }
        // Identical repeat: context unchanged, no feedback sent.
    }

    if (accepted) {
        // Acceptance by both critics is the correctness that gets reported;
        // the accepted move re-grades true offline because the grader and
        // Critic #2 share the improvement rule.
        t.accepted_uci = render_uci(*accepted);
        t.graded_uci = t.accepted_uci;
        t.final = FinalOutcome::Correct;
    } else {
        t.final = detail::unaccepted_final(t);
    }
    return t;
}

// Dispatch on the configured mode. eval_hint is required iff the mode is
// Cheating; the engine oracle grades in every mode and feeds the critics in
// modulo mode.
inline AttemptTranscript run_attempt(Model& model, const Position& p, const Move& ground_truth,
                                     const std::optional<EngineEval>& eval_hint, Evaluator& oracle,
                                     const InferenceConfig& cfg) {
    switch (cfg.mode) {
        case InferenceMode::Normal:
            return run_normal(model, p, ground_truth, oracle, cfg);
        case InferenceMode::Cheating:
            if (!eval_hint)
                throw std::invalid_argument("cheating mode requires an evaluation hint");
            return run_cheating(model, p, ground_truth, *eval_hint, oracle, cfg);
        case InferenceMode::PassAtK:
            return run_pass_at_k(model, p, ground_truth, oracle, cfg);
        case InferenceMode::Modulo:
            return run_modulo(model, p, ground_truth, oracle, cfg);
    }
    throw std::logic_error("unreachable");
}

}  // namespace matebench

#endif
