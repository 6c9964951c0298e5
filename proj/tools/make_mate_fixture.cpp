// Generates an engine-verified mate puzzle fixture in the Lichess CSV schema.
//
// Random playouts from the initial position are screened with a shallow
// search; candidates are confirmed at full depth and their mate ladders
// extracted move by move, requiring the exact class (mate in k, then k-1,
// ...) at every solver turn. The resulting rows replay cleanly and end in
// checkmate, which the tool re-checks through the CSV reader before writing.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "matebench/chess.hpp"
#include "matebench/dataset.hpp"
#include "matebench/engine.hpp"
#include "matebench/rng.hpp"

using namespace matebench;

namespace {

std::string resolve_engine() {
    if (const char* env = std::getenv("MATEBENCH_ENGINE"); env && *env) return env;
    if (std::system("command -v stockfish >/dev/null 2>&1") == 0) return "stockfish";
    return "node third_party/node_modules/stockfish/bin/stockfish-18-lite-single.js";
}

// Walks the forced line from a position the confirm search scored as mate in
// k, demanding the exact ladder at each solver turn. Returns the UCI line
// (2k-1 plies) or nothing if the ladder breaks.
std::optional<std::vector<std::string>> extract_ladder(EngineSession& sess, Position start, int k,
                                                       const EngineLimits& confirm) {
    std::vector<std::string> line;
    Position cur = std::move(start);
    for (int j = k; j >= 1; --j) {
        Evaluation ev = sess.evaluate(cur, confirm);
        if (ev.eval.kind != EvalKind::MateIn || ev.eval.value != j || !ev.best)
            return std::nullopt;
        line.push_back(render_uci(*ev.best));
        cur = cur.apply_move(*ev.best);
        if (j == 1) return cur.is_checkmate() ? std::optional(line) : std::nullopt;
        if (cur.is_checkmate() || cur.is_stalemate()) return std::nullopt;

        Evaluation reply = sess.evaluate(cur, confirm);
        if (reply.eval.kind != EvalKind::MateIn || reply.eval.value != -(j - 1) || !reply.best)
            return std::nullopt;
        line.push_back(render_uci(*reply.best));
        cur = cur.apply_move(*reply.best);
        if (cur.is_checkmate() || cur.is_stalemate()) return std::nullopt;
    }
    return std::nullopt;
}

std::string csv_row(const std::string& id, const std::string& fen,
                    const std::vector<std::string>& moves, int k) {
    std::string joined;
    for (const std::string& m : moves) {
        if (!joined.empty()) joined += ' ';
        joined += m;
    }
    std::ostringstream row;
    row << id << ',' << fen << ',' << joined << ',' << 1200 + 300 * k << ",75,90,100,"
        << "mate mateIn" << k << ",local,";
    return row.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate an engine-verified mate-in-1/2/3 puzzle fixture"};
    std::string engine = resolve_engine();
    std::string out_path = "tests/data/mate_fixture.csv";
    int per_class = 25;
    int filter_depth = 8;
    int confirm_depth = 18;
    int max_games = 500;
    uint64_t seed = 7;
    app.add_option("--engine", engine, "engine command line");
    app.add_option("--out", out_path, "output CSV path");
    app.add_option("--per-class", per_class, "puzzles per mate depth")->check(CLI::PositiveNumber);
    app.add_option("--filter-depth", filter_depth, "screening search depth");
    app.add_option("--confirm-depth", confirm_depth, "confirmation search depth");
    app.add_option("--max-games", max_games, "playout budget");
    app.add_option("--seed", seed, "playout seed");
    CLI11_PARSE(app, argc, argv);

    EngineConfig cfg;
    cfg.command = engine;
    EngineSession sess(cfg);
    std::cerr << "engine: " << sess.name() << "\n";
    const EngineLimits filter = EngineLimits::at_depth(filter_depth);
    const EngineLimits confirm = EngineLimits::at_depth(confirm_depth);

    Rng rng(seed);
    std::unordered_set<std::string> seen;
    std::vector<std::string> rows;
    int need[4] = {0, per_class, per_class, per_class};
    int made[4] = {0, 0, 0, 0};

    for (int game = 0; game < max_games && need[1] + need[2] + need[3] > 0; ++game) {
        Position p = Position::initial();
        bool taken[4] = {};  // one puzzle per class per game keeps positions varied
        for (int ply = 0; ply < 240; ++ply) {
            std::vector<Move> legal = p.legal_moves();
            if (legal.empty() || p.halfmove_clock() >= 100) break;
            Move m = legal[rng.index(legal.size())];
            Position next = p.apply_move(m);
            if (next.is_checkmate() || next.is_stalemate()) break;

            if (ply >= 5 && !seen.count(next.key())) {
                Evaluation gate = sess.evaluate(next, filter);
                if (gate.eval.kind == EvalKind::MateIn && gate.eval.value >= 1 &&
                    gate.eval.value <= 3) {
                    Evaluation sure = sess.evaluate(next, confirm);
                    int k = sure.eval.kind == EvalKind::MateIn ? sure.eval.value : 0;
                    if (k >= 1 && k <= 3 && need[k] > 0 && !taken[k]) {
                        if (auto line = extract_ladder(sess, next, k, confirm)) {
                            seen.insert(next.key());
                            taken[k] = true;
                            made[k] += 1;
                            need[k] -= 1;
                            std::vector<std::string> moves = {render_uci(m)};
                            moves.insert(moves.end(), line->begin(), line->end());
                            std::string id =
                                "m" + std::to_string(k) + "p" +
                                (made[k] < 10 ? "0" : "") + std::to_string(made[k]);
                            rows.push_back(csv_row(id, p.fen(), moves, k));
                            std::cerr << "game " << game << " ply " << ply << ": " << id << "\n";
                        }
                    }
                }
            }
            p = std::move(next);
        }
    }

    if (need[1] + need[2] + need[3] > 0) {
        std::cerr << "playout budget exhausted: made " << made[1] << "/" << made[2] << "/"
                  << made[3] << " of " << per_class << " per class\n";
        return 1;
    }

    std::string csv = std::string(kLichessHeader) + "\n";
    for (const std::string& r : rows) csv += r + "\n";

    // Re-check through the reader: every row must parse, expand, and mate.
    std::istringstream in(csv);
    PuzzleReader reader(in);
    std::vector<Puzzle> puzzles = reader.read_all();
    if (puzzles.size() != rows.size() || reader.stats().malformed != 0) {
        std::cerr << "self-check failed: " << reader.stats().malformed << " malformed rows\n";
        for (const std::string& e : reader.stats().sample_errors) std::cerr << "  " << e << "\n";
        return 1;
    }
    for (const Puzzle& z : puzzles) {
        std::vector<PositionTask> tasks = expand_puzzle(z);
        if (tasks.size() != static_cast<size_t>(*mate_in_n(z)) ||
            !tasks.back().position.apply_move(tasks.back().solution).is_checkmate()) {
            std::cerr << "self-check failed: " << z.id << " does not end in mate\n";
            return 1;
        }
    }

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    out << csv;
    std::cerr << "wrote " << puzzles.size() << " puzzles (" << made[1] << "/" << made[2] << "/"
              << made[3] << " per class) to " << out_path << "\n";
    return 0;
}
