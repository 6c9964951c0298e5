#ifndef MATEBENCH_ENGINE_HPP
#define MATEBENCH_ENGINE_HPP

// UCI engine client: handshake, option setting, evaluation, best-move and
// self-play. One session owns one engine process and one in-flight request.

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matebench/chess.hpp"
#include "matebench/subprocess.hpp"

namespace matebench {

struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

struct EngineLimits {
    std::optional<int> depth;
    std::optional<double> movetime_s;

    void validate() const {
        if (!depth && !movetime_s) throw EngineError("limits need depth or movetime");
        if (depth && *depth < 1) throw EngineError("depth must be >= 1");
        if (movetime_s && *movetime_s <= 0) throw EngineError("movetime must be positive");
    }

    static EngineLimits at_depth(int d) { return {d, std::nullopt}; }
    static EngineLimits at_movetime(double seconds) { return {std::nullopt, seconds}; }
};

struct EngineConfig {
    std::string command;  // shell command line, e.g. "stockfish" or "node .../stockfish.js"
    std::optional<int> skill_level;  // UCI "Skill Level", 0..20
    std::map<std::string, std::string> options;
};

// Scores are always from the perspective of the side to move in the position
// they were produced for. MateIn(k > 0): the mover mates in k of its own
// moves. MateIn(k < 0): the mover gets mated in -k opponent moves. Terminal
// kinds are facts about the position itself, not search results.
enum class EvalKind { Centipawns, MateIn, TerminalMate, TerminalStalemate };

struct EngineEval {
    EvalKind kind = EvalKind::Centipawns;
    int value = 0;  // centipawns or signed mate distance; unused for Terminal*

    static EngineEval cp(int v) { return {EvalKind::Centipawns, v}; }
    static EngineEval mate(int k) { return {EvalKind::MateIn, k}; }
    static EngineEval terminal_mate() { return {EvalKind::TerminalMate, 0}; }
    static EngineEval terminal_stalemate() { return {EvalKind::TerminalStalemate, 0}; }

    bool operator==(const EngineEval&) const = default;

    std::string text() const {
        switch (kind) {
            case EvalKind::Centipawns: return "cp " + std::to_string(value);
            case EvalKind::MateIn: return "mate " + std::to_string(value);
            case EvalKind::TerminalMate: return "checkmate";
            case EvalKind::TerminalStalemate: return "stalemate";
        }
        return "?";
    }
};

struct Evaluation {
    EngineEval eval;
    std::optional<Move> best;
};

// Anything that can score a position; the engine session is the production
// implementation, tests substitute exhaustive oracles.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual Evaluation evaluate(const Position& p, const EngineLimits& lim) = 0;
};

class EngineSession : public Evaluator {
public:
    explicit EngineSession(EngineConfig cfg,
                           std::chrono::milliseconds handshake_timeout = std::chrono::seconds(60))
        : cfg_(std::move(cfg)), proc_(cfg_.command) {
        proc_.write_line("uci");
        const auto deadline = std::chrono::steady_clock::now() + handshake_timeout;
        for (;;) {
            auto line = read_until(deadline);
            if (line.rfind("id name ", 0) == 0) name_ = line.substr(8);
            if (line == "uciok") break;
        }
        if (cfg_.skill_level) {
            if (*cfg_.skill_level < 0 || *cfg_.skill_level > 20)
                throw EngineError("skill level out of range");
            set_option("Skill Level", std::to_string(*cfg_.skill_level));
        }
        for (const auto& [name, value] : cfg_.options) set_option(name, value);
        proc_.write_line("isready");
        for (;;) {
            if (read_until(deadline) == "readyok") break;
        }
    }

    const std::string& name() const { return name_; }
    const EngineConfig& config() const { return cfg_; }

    // Terminal positions are resolved without consulting the engine; search
    // output on them is undefined across engines.
    Evaluation evaluate(const Position& p, const EngineLimits& lim) override {
        lim.validate();
        if (p.is_checkmate()) return {EngineEval::terminal_mate(), std::nullopt};
        if (p.is_stalemate()) return {EngineEval::terminal_stalemate(), std::nullopt};

        proc_.write_line("position fen " + p.fen());
        proc_.write_line(go_command(lim));

        const auto deadline = std::chrono::steady_clock::now() + search_budget(lim);
        std::optional<EngineEval> score;
        for (;;) {
            std::string line = read_until(deadline);
            if (line.rfind("info ", 0) == 0) {
                if (auto s = parse_score(line)) score = s;
                continue;
            }
            if (line.rfind("bestmove", 0) == 0) {
                std::istringstream ss(line);
                std::string tag, mv;
                ss >> tag >> mv;
                if (mv.empty() || mv == "(none)")
                    throw EngineError("engine returned no move for " + p.fen());
                MoveTextResult parsed = parse_move_text(mv, p);
                if (!parsed.ok())
                    throw EngineError("engine move " + mv + " is not legal in " + p.fen());
                if (!score) throw EngineError("bestmove without a score line");
                return {*score, parsed.move};
            }
        }
    }

    Move best_move(const Position& p, const EngineLimits& lim) {
        Evaluation ev = evaluate(p, lim);
        if (!ev.best) throw EngineError("no best move: position is terminal");
        return *ev.best;
    }

    // Engine-side perft, used to cross-check the internal generator.
    uint64_t perft(const Position& p, int depth) {
        proc_.write_line("position fen " + p.fen());
        proc_.write_line("go perft " + std::to_string(depth));
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::minutes(5);
        for (;;) {
            std::string line = read_until(deadline);
            auto at = line.find("Nodes searched:");
            if (at != std::string::npos)
                return std::stoull(line.substr(at + std::strlen("Nodes searched:")));
        }
    }

private:
    EngineConfig cfg_;
    Subprocess proc_;
    std::string name_;

    void set_option(const std::string& name, const std::string& value) {
        proc_.write_line("setoption name " + name + " value " + value);
    }

    static std::string go_command(const EngineLimits& lim) {
        std::string cmd = "go";
        if (lim.depth) cmd += " depth " + std::to_string(*lim.depth);
        if (lim.movetime_s)
            cmd += " movetime " + std::to_string(static_cast<long long>(
                                      std::llround(*lim.movetime_s * 1000.0)));
        return cmd;
    }

    // Wall budget for one search: the movetime plus slack, or a generous
    // depth allowance (WASM builds are slow).
    static std::chrono::milliseconds search_budget(const EngineLimits& lim) {
        auto slack = std::chrono::seconds(120);
        if (lim.movetime_s)
            return slack + std::chrono::milliseconds(
                               static_cast<long long>(std::llround(*lim.movetime_s * 1000.0)));
        return slack + std::chrono::seconds(4) * *lim.depth;
    }

    static std::optional<EngineEval> parse_score(const std::string& line) {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            if (tok != "score") continue;
            std::string kind;
            long long v = 0;
            if (ss >> kind >> v) {
                if (kind == "cp") return EngineEval::cp(static_cast<int>(v));
                if (kind == "mate") return EngineEval::mate(static_cast<int>(v));
            }
            return std::nullopt;
        }
        return std::nullopt;
    }

    std::string read_until(std::chrono::steady_clock::time_point deadline) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) throw EngineError("engine timed out");
        auto line = proc_.read_line(remaining);
        if (!line) throw EngineError("engine timed out or closed its pipe");
        return *line;
    }
};

// ---------------------------------------------------------------------------
// Self-play

struct GameRecord {
    std::vector<Move> moves;
    std::string result;       // "1-0", "0-1", "1/2-1/2", "aborted"
    std::string termination;  // "checkmate", "stalemate", "fifty_move", "threefold", "max_plies", "error: ..."
    std::string final_fen;
};

// Both engines start from the initial position; no opening book. Draws are
// adjudicated by the 50-move rule and threefold repetition of the position
// key; hitting max_plies aborts the game.
inline GameRecord play_selfplay_game(const EngineConfig& white, const EngineConfig& black,
                                     const EngineLimits& lim, int max_plies = 512) {
    GameRecord game;
    Position p = Position::initial();
    if (max_plies <= 0) {
        game.result = "aborted";
        game.termination = "max_plies";
        game.final_fen = p.fen();
        return game;
    }

    try {
        EngineSession wsess(white), bsess(black);
        std::map<std::string, int> seen{{p.key(), 1}};
        for (int ply = 0; ply < max_plies; ++ply) {
            if (p.is_checkmate()) {
                game.result = p.side_to_move() == Color::White ? "0-1" : "1-0";
                game.termination = "checkmate";
                game.final_fen = p.fen();
                return game;
            }
            if (p.is_stalemate()) {
                game.result = "1/2-1/2";
                game.termination = "stalemate";
                game.final_fen = p.fen();
                return game;
            }
            if (p.halfmove_clock() >= 100) {
                game.result = "1/2-1/2";
                game.termination = "fifty_move";
                game.final_fen = p.fen();
                return game;
            }
            EngineSession& mover = p.side_to_move() == Color::White ? wsess : bsess;
            Move m = mover.best_move(p, lim);
            game.moves.push_back(m);
            p = p.apply_move(m);
            if (++seen[p.key()] >= 3) {
                game.result = "1/2-1/2";
                game.termination = "threefold";
                game.final_fen = p.fen();
                return game;
            }
        }
        game.result = "aborted";
        game.termination = "max_plies";
    } catch (const std::exception& e) {
        game.result = "aborted";
        game.termination = std::string("error: ") + e.what();
    }
    game.final_fen = p.fen();
    return game;
}

}  // namespace matebench

#endif  // MATEBENCH_ENGINE_HPP
