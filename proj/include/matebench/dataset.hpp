#ifndef MATEBENCH_DATASET_HPP
#define MATEBENCH_DATASET_HPP

// Puzzle ingestion and corpus building: stream the Lichess puzzle CSV
// (optionally gzipped), expand puzzles into gradable positions, split
// validation sets per theme with position-level disjointness, sample eval
// sets, and build (position, best move) corpora from puzzles or engine
// self-play.

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "matebench/chess.hpp"
#include "matebench/engine.hpp"
#include "matebench/rng.hpp"

namespace matebench {

// ---------------------------------------------------------------------------
// Puzzle records

struct Puzzle {
    std::string id;
    std::string fen;  // position before the setup move
    std::vector<std::string> moves;  // UCI; moves[0] is the opponent's setup move
    int rating = 0;
    std::vector<std::string> themes;
    std::string source_url;
};

// The puzzle's mate depth when a mateIn-N theme is present and the move list
// has the matching 2N length.
inline std::optional<int> mate_in_n(const Puzzle& z) {
    for (const std::string& t : z.themes) {
        if (t.rfind("mateIn", 0) != 0 || t.size() == 6) continue;
        int n = 0;
        auto [ptr, ec] = std::from_chars(t.data() + 6, t.data() + t.size(), n);
        if (ec != std::errc() || ptr != t.data() + t.size() || n < 1) continue;
        if (z.moves.size() == static_cast<size_t>(2 * n)) return n;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline bool looks_like_uci(const std::string& m) {
    if (m.size() != 4 && m.size() != 5) return false;
    auto file_ok = [](char c) { return c >= 'a' && c <= 'h'; };
    auto rank_ok = [](char c) { return c >= '1' && c <= '8'; };
    if (!file_ok(m[0]) || !rank_ok(m[1]) || !file_ok(m[2]) || !rank_ok(m[3])) return false;
    if (m.size() == 5 && std::string("qrbn").find(m[4]) == std::string::npos) return false;
    return true;
}

}  // namespace detail

inline constexpr const char* kLichessHeader =
    "PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl,OpeningTags";

// Line reader over a plain or gzip file (zlib reads both transparently).
class LineSource {
public:
    explicit LineSource(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
        if (!file_) throw std::runtime_error("cannot open " + path);
    }
    ~LineSource() { gzclose(file_); }
    LineSource(const LineSource&) = delete;
    LineSource& operator=(const LineSource&) = delete;

    std::optional<std::string> next() {
        std::string line;
        char buf[1 << 16];
        while (gzgets(file_, buf, sizeof buf) != nullptr) {
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
        }
        if (line.empty()) return std::nullopt;
        return line;  // final line without newline
    }

private:
    gzFile file_;
};

// Streams Puzzle records, counting and skipping malformed rows. The header
// row is validated up front.
class PuzzleReader {
public:
    struct Stats {
        uint64_t rows = 0;       // data rows seen
        uint64_t malformed = 0;  // rows skipped
        std::vector<std::string> sample_errors;  // first few skip reasons
    };

    explicit PuzzleReader(std::function<std::optional<std::string>()> next_line)
        : next_line_(std::move(next_line)) {
        std::optional<std::string> header = next_line_();
        if (!header || *header != kLichessHeader)
            throw std::runtime_error("puzzle CSV header mismatch");
    }

    explicit PuzzleReader(std::istream& in)
        : PuzzleReader([&in]() -> std::optional<std::string> {
              std::string line;
              if (!std::getline(in, line)) return std::nullopt;
              if (!line.empty() && line.back() == '\r') line.pop_back();
              return line;
          }) {}

    static PuzzleReader from_file(const std::string& path) {
        auto source = std::make_shared<LineSource>(path);
        return PuzzleReader([source] { return source->next(); });
    }

    std::optional<Puzzle> next() {
        while (std::optional<std::string> line = next_line_()) {
            if (line->empty()) continue;
            stats_.rows += 1;
            Puzzle z;
            std::string err;
            if (parse_row(*line, z, err)) return z;
            stats_.malformed += 1;
            if (stats_.sample_errors.size() < 5)
                stats_.sample_errors.push_back("row " + std::to_string(stats_.rows) + ": " + err);
        }
        return std::nullopt;
    }

    std::vector<Puzzle> read_all() {
        std::vector<Puzzle> out;
        while (std::optional<Puzzle> z = next()) out.push_back(std::move(*z));
        return out;
    }

    const Stats& stats() const { return stats_; }

private:
    static bool parse_row(const std::string& line, Puzzle& z, std::string& err) {
        std::vector<std::string> f = detail::split(line, ',');
        if (f.size() != 10) {
            err = "expected 10 fields, got " + std::to_string(f.size());
            return false;
        }
        z.id = f[0];
        z.fen = f[1];
        z.moves = detail::split_spaces(f[2]);
        z.themes = detail::split_spaces(f[7]);
        z.source_url = f[8];
        if (z.id.empty()) {
            err = "empty puzzle id";
            return false;
        }
        auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), z.rating);
        if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
            err = "bad rating: " + f[3];
            return false;
        }
        if (z.moves.empty() || z.moves.size() % 2 != 0) {
            err = "move count must be positive and even";
            return false;
        }
        Position p;
        try {
            p = Position::from_fen(z.fen);
        } catch (const std::exception& e) {
            err = std::string("bad FEN: ") + e.what();
            return false;
        }
        for (const std::string& m : z.moves) {
            if (!detail::looks_like_uci(m)) {
                err = "move not in UCI format: " + m;
                return false;
            }
            MoveTextResult r = parse_move_text(m, p);
            if (!r.move) {
                err = "illegal move in line: " + m;
                return false;
            }
            p = p.apply_move(*r.move);
        }
        for (const std::string& t : z.themes) {
            if (t.rfind("mateIn", 0) != 0 || t.size() == 6) continue;
            int n = 0;
            auto [tp, tec] = std::from_chars(t.data() + 6, t.data() + t.size(), n);
            if (tec != std::errc() || tp != t.data() + t.size()) continue;
            if (z.moves.size() != static_cast<size_t>(2 * n)) {
                err = t + " puzzle must have " + std::to_string(2 * n) + " moves, has " +
                      std::to_string(z.moves.size());
                return false;
            }
        }
        return true;
    }

    std::function<std::optional<std::string>()> next_line_;
    Stats stats_;
};

// ---------------------------------------------------------------------------
// Puzzle expansion

struct PositionTask {
    std::string puzzle_id;
    int index = 0;  // 1-based solver move number
    Position position;
    Move solution;
    std::optional<EngineEval> eval_class;  // MateIn(k) when the theme pins it
};

// One task per solver move: apply the setup move, then emit (position,
// solution) pairs, applying the intervening opponent replies. A mateIn-N
// puzzle yields N tasks with eval classes MateIn(N) down to MateIn(1).
inline std::vector<PositionTask> expand_puzzle(const Puzzle& z) {
    if (z.moves.empty() || z.moves.size() % 2 != 0)
        throw std::invalid_argument("corrupt puzzle " + z.id + ": move count " +
                                    std::to_string(z.moves.size()));
    Position p = Position::from_fen(z.fen);
    auto parse = [&](const std::string& u) {
        MoveTextResult r = parse_move_text(u, p);
        if (!r.move)
            throw std::invalid_argument("corrupt puzzle " + z.id + ": illegal move " + u);
        return *r.move;
    };
    std::optional<int> n = mate_in_n(z);
    std::vector<PositionTask> tasks;
    p = p.apply_move(parse(z.moves[0]));
    for (size_t i = 1; i < z.moves.size(); i += 2) {
        PositionTask t;
        t.puzzle_id = z.id;
        t.index = static_cast<int>(i + 1) / 2;
        t.position = p;
        t.solution = parse(z.moves[i]);
        if (n) t.eval_class = EngineEval::mate(*n - t.index + 1);
        p = p.apply_move(t.solution);
        if (i + 1 < z.moves.size()) p = p.apply_move(parse(z.moves[i + 1]));
        tasks.push_back(std::move(t));
    }
    return tasks;
}

// ---------------------------------------------------------------------------
// Theme split

struct SplitManifest {
    int holdout = 1000;
    std::string dedup_key = "fen-fields-1-4";
    uint64_t seed = 0;
    std::vector<std::string> train_ids;
    std::vector<std::string> validation_ids;  // deduplicated across themes
    // Per-theme sampled ids (each list ≤ holdout); a puzzle sampled under
    // several themes appears in each of those lists but once in
    // validation_ids.
    std::map<std::string, std::vector<std::string>> validation_by_theme;
    uint64_t overlap_dropped = 0;  // train puzzles dropped for sharing a position key

    std::map<std::string, int> theme_counts() const {
        std::map<std::string, int> out;
        for (const auto& [theme, ids] : validation_by_theme)
            out[theme] = static_cast<int>(ids.size());
        return out;
    }
};

inline nlohmann::json to_json(const SplitManifest& m) {
    nlohmann::json j;
    j["holdout"] = m.holdout;
    j["dedup_key"] = m.dedup_key;
    j["seed"] = m.seed;
    j["train_ids"] = m.train_ids;
    j["validation_ids"] = m.validation_ids;
    j["validation_by_theme"] = m.validation_by_theme;
    j["overlap_dropped"] = m.overlap_dropped;
    return j;
}

inline SplitManifest manifest_from_json(const nlohmann::json& j) {
    SplitManifest m;
    m.holdout = j.at("holdout").get<int>();
    m.dedup_key = j.at("dedup_key").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    m.validation_ids = j.at("validation_ids").get<std::vector<std::string>>();
    m.validation_by_theme =
        j.at("validation_by_theme").get<std::map<std::string, std::vector<std::string>>>();
    m.overlap_dropped = j.at("overlap_dropped").get<uint64_t>();
    return m;
}

// Per-theme reservoir sample of up to `holdout` puzzles into validation,
// deduplicated across themes, then a training list guaranteed to share no
// position key (FEN fields 1-4 of any solver position) with validation.
// Deterministic for a fixed input order and seed.
inline SplitManifest theme_split(const std::vector<Puzzle>& puzzles, int holdout, uint64_t seed) {
    if (holdout < 1) throw std::invalid_argument("holdout must be at least 1");

    struct Reservoir {
        uint64_t seen = 0;
        std::vector<size_t> kept;
    };
    std::map<std::string, Reservoir> themes;  // ordered: deterministic iteration
    Rng rng(seed);
    for (size_t zi = 0; zi < puzzles.size(); ++zi) {
        for (const std::string& theme : puzzles[zi].themes) {
            Reservoir& r = themes[theme];
            r.seen += 1;
            if (r.kept.size() < static_cast<size_t>(holdout)) {
                r.kept.push_back(zi);
            } else {
                uint64_t j = rng.below(r.seen);
                if (j < static_cast<uint64_t>(holdout)) r.kept[j] = zi;
            }
        }
    }

    SplitManifest m;
    m.holdout = holdout;
    m.seed = seed;

    std::unordered_set<size_t> val_idx;
    std::vector<size_t> val_order;
    for (const auto& [theme, r] : themes) {
        std::vector<std::string> ids;
        ids.reserve(r.kept.size());
        for (size_t zi : r.kept) {
            ids.push_back(puzzles[zi].id);
            if (val_idx.insert(zi).second) val_order.push_back(zi);
        }
        m.validation_by_theme[theme] = std::move(ids);
    }
    m.validation_ids.reserve(val_order.size());
    std::unordered_set<std::string> val_keys;
    for (size_t zi : val_order) {
        m.validation_ids.push_back(puzzles[zi].id);
        for (const PositionTask& t : expand_puzzle(puzzles[zi]))
            val_keys.insert(t.position.key());
    }

    for (size_t zi = 0; zi < puzzles.size(); ++zi) {
        if (val_idx.count(zi)) continue;
        bool overlaps = false;
        for (const PositionTask& t : expand_puzzle(puzzles[zi])) {
            if (val_keys.count(t.position.key())) {
                overlaps = true;
                break;
            }
        }
        if (overlaps)
            m.overlap_dropped += 1;
        else
            m.train_ids.push_back(puzzles[zi].id);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Evaluation sampling

inline std::vector<std::string> sample_validation_ids(const SplitManifest& m,
                                                      const std::string& theme, size_t n,
                                                      uint64_t seed) {
    auto it = m.validation_by_theme.find(theme);
    if (it == m.validation_by_theme.end())
        throw std::invalid_argument("theme not in validation: " + theme);
    std::vector<std::string> pool = it->second;
    if (n > pool.size())
        throw std::invalid_argument("sample of " + std::to_string(n) + " exceeds " +
                                    std::to_string(pool.size()) + " validation puzzles for " +
                                    theme);
    Rng rng(seed);
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + static_cast<size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

inline std::vector<Puzzle> sample_eval_set(const SplitManifest& m, const std::string& theme,
                                           size_t n, uint64_t seed,
                                           const std::vector<Puzzle>& puzzles) {
    std::unordered_map<std::string, const Puzzle*> by_id;
    for (const Puzzle& z : puzzles) by_id.emplace(z.id, &z);
    std::vector<Puzzle> out;
    for (const std::string& id : sample_validation_ids(m, theme, n, seed)) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw std::invalid_argument("sampled id missing from store: " + id);
        out.push_back(*it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus files

struct CorpusRecord {
    std::string fen;
    std::string best_uci;
};

inline CorpusRecord record_of(const PositionTask& t) {
    return {t.position.fen(), render_uci(t.solution)};
}

struct CorpusStats {
    uint64_t records = 0;
    uint64_t unique_positions = 0;     // by position key, clocks ignored
    uint64_t conflicted_positions = 0;  // same position, different best moves
};

// One `<FEN>;<best move UCI>` line per record. Every record is validated
// (legal move in a parseable position); duplicates are kept and reported.
inline CorpusStats build_corpus(const std::vector<CorpusRecord>& records, std::ostream& sink) {
    CorpusStats stats;
    std::unordered_map<std::string, std::set<std::string>> moves_by_key;
    for (const CorpusRecord& r : records) {
        Position p = Position::from_fen(r.fen);
        MoveTextResult parsed = parse_move_text(r.best_uci, p);
        if (!parsed.move)
            throw std::invalid_argument("corpus record move " + r.best_uci +
                                        " is not legal in " + r.fen);
        sink << r.fen << ';' << r.best_uci << '\n';
        stats.records += 1;
        moves_by_key[p.key()].insert(r.best_uci);
    }
    stats.unique_positions = moves_by_key.size();
    for (const auto& [key, moves] : moves_by_key)
        if (moves.size() > 1) stats.conflicted_positions += 1;
    return stats;
}

inline CorpusRecord parse_corpus_line(const std::string& line) {
    size_t sep = line.rfind(';');
    if (sep == std::string::npos) throw std::invalid_argument("corpus line missing ';'");
    return {line.substr(0, sep), line.substr(sep + 1)};
}

// ---------------------------------------------------------------------------
// Engine self-play corpus

struct SelfplayConfig {
    EngineConfig base;  // full-strength side; also the labeling engine
    std::vector<int> levels = {0,  1,  2,  3,  4,  5,  6,  7,  8,  9, 10,
                               11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    int games_per_level = 50;
    EngineLimits move_limits = EngineLimits::at_movetime(0.1);
    EngineLimits label_limits = EngineLimits::at_depth(12);
    int max_plies = 512;
    uint64_t seed = 0;  // recorded with outputs; engine search is not reseeded
};

struct ScheduledGame {
    int level = 0;
    bool base_is_white = true;
};

// Colors alternate within each level, so even games_per_level gives an exact
// half-and-half color balance per level.
inline std::vector<ScheduledGame> selfplay_schedule(const SelfplayConfig& cfg) {
    std::vector<ScheduledGame> out;
    for (int level : cfg.levels)
        for (int g = 0; g < cfg.games_per_level; ++g) out.push_back({level, g % 2 == 0});
    return out;
}

struct SelfplayGame {
    int level = 0;
    bool base_is_white = true;
    GameRecord game;
};

struct SelfplayResult {
    std::vector<SelfplayGame> games;
    std::vector<CorpusRecord> records;  // one per unique position, base-engine label
    uint64_t positions_total = 0;       // occurrences across all games
    uint64_t positions_unique = 0;
    int failed_games = 0;  // engine failures; play continued

    double overlap() const {
        if (positions_total == 0) return 0.0;
        return 1.0 - static_cast<double>(positions_unique) / static_cast<double>(positions_total);
    }
};

// Plays the schedule, then labels every position that occurred with the base
// engine's best move at the labeling limits. Repeated positions are labeled
// once; the repetition rate is reported via the totals.
inline SelfplayResult generate_selfplay_corpus(const SelfplayConfig& cfg) {
    SelfplayResult out;
    for (const ScheduledGame& slot : selfplay_schedule(cfg)) {
        EngineConfig variant = cfg.base;
        variant.skill_level = slot.level;
        SelfplayGame sg;
        sg.level = slot.level;
        sg.base_is_white = slot.base_is_white;
        sg.game = play_selfplay_game(slot.base_is_white ? cfg.base : variant,
                                     slot.base_is_white ? variant : cfg.base, cfg.move_limits,
                                     cfg.max_plies);
        if (sg.game.termination.rfind("error", 0) == 0) out.failed_games += 1;
        out.games.push_back(std::move(sg));
    }

    std::optional<EngineSession> labeler;
    std::unordered_set<std::string> seen;
    for (const SelfplayGame& sg : out.games) {
        Position p = Position::initial();
        for (const Move& m : sg.game.moves) {
            out.positions_total += 1;
            if (seen.insert(p.key()).second) {
                out.positions_unique += 1;
                if (!labeler) labeler.emplace(cfg.base);
                out.records.push_back(
                    {p.fen(), render_uci(labeler->best_move(p, cfg.label_limits))});
            }
            p = p.apply_move(m);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// PGN rendering

inline std::string render_pgn(const SelfplayGame& sg, int round) {
    std::string white = sg.base_is_white ? "base" : "skill-" + std::to_string(sg.level);
    std::string black = sg.base_is_white ? "skill-" + std::to_string(sg.level) : "base";
    std::string result = sg.game.result == "aborted" ? "*" : sg.game.result;

    std::string out;
    out += "[Event \"engine self-play\"]\n";
    out += "[Site \"local\"]\n";
    out += "[Date \"????.??.??\"]\n";
    out += "[Round \"" + std::to_string(round) + "\"]\n";
    out += "[White \"" + white + "\"]\n";
    out += "[Black \"" + black + "\"]\n";
    out += "[Result \"" + result + "\"]\n";
    out += "[Termination \"" + sg.game.termination + "\"]\n\n";

    Position p = Position::initial();
    std::string line;
    int move_no = 1;
    for (size_t i = 0; i < sg.game.moves.size(); ++i) {
        std::string token;
        if (p.side_to_move() == Color::White)
            token = std::to_string(move_no) + ". ";
        else if (i == 0)
            token = std::to_string(move_no) + "... ";
        token += render_san(p, sg.game.moves[i]);
        p = p.apply_move(sg.game.moves[i]);
        if (p.side_to_move() == Color::White) move_no += 1;
        if (line.empty()) {
            line = token;
        } else if (line.size() + 1 + token.size() > 80) {
            out += line + "\n";
            line = token;
        } else {
            line += " " + token;
        }
    }
    if (line.empty())
        out += result + "\n";
    else
        out += line + " " + result + "\n";
    return out;
}

inline std::string render_pgn_archive(const std::vector<SelfplayGame>& games) {
    std::string out;
    for (size_t i = 0; i < games.size(); ++i) {
        if (i) out += "\n";
        out += render_pgn(games[i], static_cast<int>(i + 1));
    }
    return out;
}

}  // namespace matebench

#endif
