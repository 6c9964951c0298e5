#ifndef MATEBENCH_VERIFY_HPP
#define MATEBENCH_VERIFY_HPP

// The two hard critics gating model output, and the offline grader with the
// alternative-solution rule: on a mate-in-N position a non-listed move is
// correct when the successor evaluates to mate-in-(N-1) for the mover.
// Feedback strings are an external contract; change them only with the
// golden tests.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "matebench/chess.hpp"
#include "matebench/engine.hpp"
#include "matebench/response.hpp"

namespace matebench {

struct GradingPolicy {
    enum class CpRule { GroundTruthOnly, ImproveByThreshold };

    EngineLimits oracle_limits = EngineLimits::at_depth(20);
    bool mate_rule_enabled = true;
    CpRule cp_rule = CpRule::GroundTruthOnly;
    int cp_threshold = 0;  // centipawns, used by ImproveByThreshold
};

enum class VerdictKind { InvalidMove, ValidButInaccurate, Correct };

struct Verdict {
    VerdictKind kind = VerdictKind::InvalidMove;
    std::optional<Move> move;                 // parsed move, when any
    std::optional<std::string> feedback;      // set for both rejection kinds
    std::optional<EngineEval> resulting_eval; // mover-perspective successor eval
};

inline std::string join_moves(const std::vector<Move>& moves) {
    std::string out;
    for (const Move& m : moves) {
        if (!out.empty()) out += ", ";
        out += m.uci();
    }
    return out;
}

// Re-expresses a successor evaluation (side-to-move = opponent) from the
// original mover's perspective. Terminal kinds are facts about the successor
// position and stay as they are: TerminalMate there means the opponent is
// mated, i.e. the mover delivered mate.
inline EngineEval normalize_to_mover(const EngineEval& after) {
    switch (after.kind) {
        case EvalKind::Centipawns: return EngineEval::cp(-after.value);
        case EvalKind::MateIn: return EngineEval::mate(-after.value);
        default: return after;
    }
}

// Feedback wording for an evaluation. In a mate context a centipawn score
// means the forced mate is gone.
inline std::string eval_phrase(const EngineEval& e, bool mate_context) {
    switch (e.kind) {
        case EvalKind::Centipawns:
            return mate_context ? "no forced mate" : std::to_string(e.value) + " centipawns";
        case EvalKind::MateIn: return "Mate in " + std::to_string(e.value);
        case EvalKind::TerminalMate: return "checkmate";
        case EvalKind::TerminalStalemate: return "stalemate";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Critic #1: validity

inline std::string invalid_move_feedback(const Position& p) {
    return "The move you provided is invalid. Please provide one of the following legal "
           "moves in the position:\n\n" +
           join_moves(p.legal_moves());
}

struct ValidityResult {
    std::optional<Move> move;             // set iff a legal move was parsed
    std::optional<std::string> feedback;  // set iff rejected

    bool parsed() const { return move.has_value(); }
};

// Parses raw model text against p. Either a move comes back or a feedback
// message listing every legal move does.
inline ValidityResult critic_validity(const Position& p, const std::string& response_text) {
    ParseOutcome outcome = extract_move(response_text, p);
    if (outcome.parsed()) return {outcome.move(), std::nullopt};
    return {std::nullopt, invalid_move_feedback(p)};
}

// ---------------------------------------------------------------------------
// Improvement rule

// before: the mover's eval of p. after: the successor eval already
// re-normalized to the mover. Mate scores demand exact progress; centipawn
// scores follow the configured rule.
inline bool improves(const EngineEval& before, const EngineEval& after,
                     const GradingPolicy& policy) {
    if (before.kind == EvalKind::MateIn && before.value > 0) {
        if (before.value == 1) return after.kind == EvalKind::TerminalMate;
        return after.kind == EvalKind::MateIn && after.value == before.value - 1;
    }
    if (before.kind == EvalKind::Centipawns) {
        if (policy.cp_rule == GradingPolicy::CpRule::GroundTruthOnly) return false;
        auto score = [](const EngineEval& e) -> long {
            switch (e.kind) {
                case EvalKind::Centipawns: return e.value;
                case EvalKind::MateIn:
                    return e.value > 0 ? 1000000L - e.value : -1000000L - e.value;
                case EvalKind::TerminalMate: return 1000000L;
                case EvalKind::TerminalStalemate: return 0;
            }
            return 0;
        };
        return score(after) >= static_cast<long>(before.value) - policy.cp_threshold;
    }
    // Losing mate scores and terminal positions: nothing to improve toward.
    return false;
}

// ---------------------------------------------------------------------------
// Critic #2: accuracy

inline std::string inaccurate_feedback(const Move& m, const EngineEval& before,
                                       const EngineEval& after,
                                       const std::vector<Move>& alternatives) {
    return "The move you provided (" + m.uci() +
           ") is valid but does not improve the evaluation of the position. The current "
           "position is " +
           eval_phrase(before, false) + " for you and the move you provided gives a position "
           "with the evaluation of " +
           eval_phrase(after, before.kind == EvalKind::MateIn) +
           ". Please try one of the following alternative legal moves instead:\n\n" +
           join_moves(alternatives);
}

// m must be legal in p. Correct when m is the engine's best move or when the
// successor improves the evaluation; otherwise ValidButInaccurate with an
// alternative list excluding m and every previously rejected move.
inline Verdict critic_accuracy(const Position& p, const Move& m, Evaluator& session,
                               const GradingPolicy& policy,
                               const std::vector<Move>& previously_rejected = {}) {
    Evaluation before = session.evaluate(p, policy.oracle_limits);

    Verdict v;
    v.move = m;
    if (before.best && *before.best == m) {
        v.kind = VerdictKind::Correct;
        return v;
    }

    EngineEval after =
        normalize_to_mover(session.evaluate(p.apply_move(m), policy.oracle_limits).eval);
    v.resulting_eval = after;
    if (improves(before.eval, after, policy)) {
        v.kind = VerdictKind::Correct;
        return v;
    }

    std::vector<Move> alternatives;
    for (const Move& lm : p.legal_moves()) {
        if (lm == m) continue;
        if (std::find(previously_rejected.begin(), previously_rejected.end(), lm) !=
            previously_rejected.end())
            continue;
        alternatives.push_back(lm);
    }
    v.kind = VerdictKind::ValidButInaccurate;
    v.feedback = inaccurate_feedback(m, before.eval, after, alternatives);
    return v;
}

// ---------------------------------------------------------------------------
// Offline grader

// True when m matches the recorded solution, or (mate rule) the position is
// mate-in-N and m preserves the forced mate, or (centipawn positions) the
// configured cp rule accepts the successor. The ground-truth match needs no
// engine at all.
inline bool grade(const Position& p, const Move& m, const Move& ground_truth,
                  Evaluator& session, const GradingPolicy& policy) {
    if (m == ground_truth) return true;
    if (!policy.mate_rule_enabled && policy.cp_rule == GradingPolicy::CpRule::GroundTruthOnly)
        return false;  // no rule could accept a non-matching move

    Evaluation before = session.evaluate(p, policy.oracle_limits);
    if (before.eval.kind == EvalKind::MateIn) {
        if (!policy.mate_rule_enabled) return false;
    } else if (before.eval.kind == EvalKind::Centipawns) {
        if (policy.cp_rule == GradingPolicy::CpRule::GroundTruthOnly) return false;
    } else {
        return false;  // terminal: no move can be graded
    }

    EngineEval after =
        normalize_to_mover(session.evaluate(p.apply_move(m), policy.oracle_limits).eval);
    return improves(before.eval, after, policy);
}

}  // namespace matebench

#endif  // MATEBENCH_VERIFY_HPP
