// Command-line front end: dataset splits, engine self-play corpora, model
// evaluation runs, single-position solving, and report rendering.
//
// Exit codes: 0 success, 1 attempt failed (solve found no accepted move),
// 2 configuration or input error, 3 endpoint error, 4 engine error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <zlib.h>

#include "matebench/chess.hpp"
#include "matebench/dataset.hpp"
#include "matebench/engine.hpp"
#include "matebench/inference.hpp"
#include "matebench/metrics.hpp"
#include "matebench/model.hpp"
#include "matebench/rng.hpp"
#include "matebench/transcript.hpp"
#include "matebench/verify.hpp"

namespace fs = std::filesystem;
using namespace matebench;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Engine resolution: explicit flag, then MATEBENCH_ENGINE, then a stockfish
// on PATH, then the node build fetch-engine.sh places under third_party/.
std::string resolve_engine(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MATEBENCH_ENGINE"); env && *env) return env;
    if (std::system("command -v stockfish >/dev/null 2>&1") == 0) return "stockfish";
    return "node third_party/node_modules/stockfish/bin/stockfish-18-lite-single.js";
}

std::string crc32_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    uLong crc = crc32(0L, Z_NULL, 0);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        crc = crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(in.gcount()));
    char out[16];
    std::snprintf(out, sizeof out, "%08lx", static_cast<unsigned long>(crc));
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json manifest_base(const std::string& command) {
    json m;
    m["tool"] = "matebench";
    m["version"] = kVersion;
    m["command"] = command;
    return m;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "0..20", "5", or "0,5,20".
std::vector<int> parse_levels(const std::string& s) {
    std::vector<int> out;
    if (auto dots = s.find(".."); dots != std::string::npos) {
        int lo = std::stoi(s.substr(0, dots));
        int hi = std::stoi(s.substr(dots + 2));
        if (lo > hi) throw std::runtime_error("bad level range: " + s);
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    for (const std::string& item : split_commas(s)) out.push_back(std::stoi(item));
    if (out.empty()) throw std::runtime_error("no levels in: " + s);
    return out;
}

HttpEndpointConfig load_endpoint(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open endpoint config " + path.string());
    json j = json::parse(in);
    HttpEndpointConfig cfg;
    cfg.base_url = j.value("base_url", cfg.base_url);
    cfg.path = j.value("path", cfg.path);
    cfg.model = j.value("model", cfg.model);
    cfg.auth_env = j.value("auth_env", cfg.auth_env);
    cfg.text_field = j.value("text_field", cfg.text_field);
    cfg.usage_field = j.value("usage_field", cfg.usage_field);
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.backoff_ms = j.value("backoff_ms", cfg.backoff_ms);
    if (cfg.base_url.empty())
        throw std::runtime_error("endpoint config " + path.string() + " lacks base_url");
    return cfg;
}

// Secrets stay in the environment; the manifest records only the variable
// name.
json endpoint_descriptor(const HttpEndpointConfig& cfg) {
    json j;
    j["base_url"] = cfg.base_url;
    j["path"] = cfg.path;
    j["model"] = cfg.model;
    j["auth_env"] = cfg.auth_env;
    j["text_field"] = cfg.text_field;
    j["usage_field"] = cfg.usage_field;
    j["timeout_s"] = cfg.timeout_s;
    j["max_retries"] = cfg.max_retries;
    j["backoff_ms"] = cfg.backoff_ms;
    return j;
}

json engine_descriptor(const EngineConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    if (cfg.skill_level) j["skill_level"] = *cfg.skill_level;
    j["options"] = cfg.options;
    return j;
}

json limits_descriptor(const EngineLimits& lim) {
    json j;
    if (lim.depth) j["depth"] = *lim.depth;
    if (lim.movetime_s) j["movetime_s"] = *lim.movetime_s;
    return j;
}

std::vector<Puzzle> read_puzzle_file(const std::string& path, PuzzleReader::Stats* stats) {
    PuzzleReader reader = PuzzleReader::from_file(path);
    std::vector<Puzzle> puzzles = reader.read_all();
    if (stats) *stats = reader.stats();
    if (reader.stats().malformed > 0) {
        std::cerr << "skipped " << reader.stats().malformed << " malformed rows\n";
        for (const std::string& e : reader.stats().sample_errors) std::cerr << "  " << e << "\n";
    }
    return puzzles;
}

std::vector<AttemptTranscript> load_transcripts(const fs::path& file) {
    std::vector<AttemptTranscript> out;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(transcript_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    return out;
}

void write_reports(const fs::path& dir, const MetricsReport& report) {
    write_text(dir / "report.md", render_report(report, ReportFormat::Markdown));
    write_text(dir / "report.csv", render_report(report, ReportFormat::Csv));
    write_text(dir / "report.json", render_report(report, ReportFormat::Json));
}

// ---------------------------------------------------------------------------
// split

int cmd_split(const std::string& puzzles_path, int holdout, uint64_t seed,
              const fs::path& out_dir) {
    fs::create_directories(out_dir);
    json manifest = manifest_base("split");
    manifest["puzzles"] = {{"path", puzzles_path}, {"crc32", crc32_hex(puzzles_path)}};
    manifest["holdout"] = holdout;
    manifest["seed"] = seed;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    PuzzleReader::Stats stats;
    std::vector<Puzzle> puzzles = read_puzzle_file(puzzles_path, &stats);
    if (puzzles.empty()) throw std::runtime_error("no usable puzzles in " + puzzles_path);

    SplitManifest split = theme_split(puzzles, holdout, seed);
    write_text(out_dir / "split.json", to_json(split).dump(2) + "\n");

    manifest["rows"] = stats.rows;
    manifest["malformed"] = stats.malformed;
    manifest["themes"] = split.validation_by_theme.size();
    manifest["validation"] = split.validation_ids.size();
    manifest["train"] = split.train_ids.size();
    manifest["overlap_dropped"] = split.overlap_dropped;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "puzzles: " << puzzles.size() << " (" << stats.malformed << " malformed rows skipped)\n"
              << "themes: " << split.validation_by_theme.size() << "\n"
              << "validation: " << split.validation_ids.size() << "\n"
              << "train: " << split.train_ids.size() << " (" << split.overlap_dropped
              << " dropped for position overlap)\n"
              << "wrote " << (out_dir / "split.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// selfplay

int cmd_selfplay(const SelfplayConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    json manifest = manifest_base("selfplay");
    manifest["engine"] = engine_descriptor(cfg.base);
    manifest["levels"] = cfg.levels;
    manifest["games_per_level"] = cfg.games_per_level;
    manifest["move_limits"] = limits_descriptor(cfg.move_limits);
    manifest["label_limits"] = limits_descriptor(cfg.label_limits);
    manifest["max_plies"] = cfg.max_plies;
    manifest["seed"] = cfg.seed;
    manifest["planned_games"] = selfplay_schedule(cfg).size();
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    SelfplayResult result = generate_selfplay_corpus(cfg);
    write_text(out_dir / "games.pgn", render_pgn_archive(result.games));

    std::ofstream corpus(out_dir / "corpus.txt");
    if (!corpus) throw std::runtime_error("cannot write corpus.txt");
    CorpusStats cstats = build_corpus(result.records, corpus);

    manifest["games"] = result.games.size();
    manifest["failed_games"] = result.failed_games;
    manifest["positions_total"] = result.positions_total;
    manifest["positions_unique"] = result.positions_unique;
    manifest["overlap"] = result.overlap();
    manifest["corpus_records"] = cstats.records;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "games: " << result.games.size() << " (" << result.failed_games << " failed)\n"
              << "positions: " << result.positions_total << " total, " << result.positions_unique
              << " unique (overlap " << result.overlap() << ")\n"
              << "wrote " << (out_dir / "games.pgn").string() << " and "
              << (out_dir / "corpus.txt").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct ModelFactory {
    std::optional<HttpEndpointConfig> endpoint;
    std::optional<EngineConfig> engine;  // engine-backed model
    EngineLimits engine_limits = EngineLimits::at_depth(20);
    std::vector<std::string> script;  // when non-empty, a fixed-response model

    std::string name() const {
        if (!script.empty()) return "scripted";
        if (endpoint) return HttpCompletionModel(*endpoint).name();
        return "engine-depth" + std::to_string(engine_limits.depth.value_or(0));
    }

    std::unique_ptr<Model> make() const {
        if (!script.empty()) return std::make_unique<ScriptedModel>(script);
        if (endpoint) return std::make_unique<HttpCompletionModel>(*endpoint);
        return std::make_unique<EngineAsModel>(*engine, engine_limits, name());
    }

    // Fails before any work (and before the manifest is written) when the
    // configured token variable is absent from the environment.
    void preflight() const {
        if (endpoint && !endpoint->auth_env.empty() && !std::getenv(endpoint->auth_env.c_str()))
            throw ModelError("environment variable " + endpoint->auth_env + " is not set");
    }
};

struct EvalItem {
    std::string puzzle_id;
    std::string theme;
    PositionTask task;
};

int cmd_eval(const std::string& puzzles_path, const std::string& split_path,
             const std::vector<std::string>& themes, size_t n, uint64_t seed,
             const ModelFactory& factory, const EngineConfig& oracle_cfg, InferenceConfig infer,
             int workers, const fs::path& out_dir) {
    infer.validate();
    factory.preflight();
    fs::create_directories(out_dir);

    PuzzleReader::Stats stats;
    std::vector<Puzzle> puzzles = read_puzzle_file(puzzles_path, &stats);
    if (puzzles.empty()) throw std::runtime_error("no usable puzzles in " + puzzles_path);

    // Sample n puzzles per theme, from the validation split when one is
    // given, otherwise from every puzzle carrying the theme.
    std::map<std::string, std::vector<Puzzle>> sampled;
    if (!split_path.empty()) {
        std::ifstream in(split_path);
        if (!in) throw std::runtime_error("cannot open " + split_path);
        SplitManifest split = manifest_from_json(json::parse(in));
        for (const std::string& theme : themes)
            sampled[theme] = sample_eval_set(split, theme, n, seed, puzzles);
    } else {
        for (const std::string& theme : themes) {
            std::vector<Puzzle> pool;
            for (const Puzzle& z : puzzles)
                if (std::find(z.themes.begin(), z.themes.end(), theme) != z.themes.end())
                    pool.push_back(z);
            if (n > pool.size())
                throw std::runtime_error("sample of " + std::to_string(n) + " exceeds " +
                                         std::to_string(pool.size()) + " puzzles for " + theme);
            Rng rng(seed);
            for (size_t i = 0; i < n; ++i)
                std::swap(pool[i], pool[i + static_cast<size_t>(rng.below(pool.size() - i))]);
            pool.resize(n);
            sampled[theme] = std::move(pool);
        }
    }

    json samples;
    samples["seed"] = seed;
    samples["n"] = n;
    for (const auto& [theme, zs] : sampled) {
        json ids = json::array();
        for (const Puzzle& z : zs) ids.push_back(z.id);
        samples["themes"][theme] = ids;
    }
    write_text(out_dir / "samples.json", samples.dump(2) + "\n");

    json manifest = manifest_base("eval");
    manifest["puzzles"] = {{"path", puzzles_path}, {"crc32", crc32_hex(puzzles_path)}};
    if (!split_path.empty())
        manifest["split"] = {{"path", split_path}, {"crc32", crc32_hex(split_path)}};
    manifest["themes"] = themes;
    manifest["n"] = n;
    manifest["seed"] = seed;
    manifest["mode"] = mode_name(infer.mode);
    manifest["k"] = infer.k;
    manifest["temperature"] = infer.effective_temperature(infer.mode);
    manifest["max_tokens"] = infer.max_tokens;
    manifest["stop"] = infer.stop;
    manifest["model"] = factory.name();
    if (factory.endpoint) manifest["endpoint"] = endpoint_descriptor(*factory.endpoint);
    if (factory.engine) {
        manifest["model_engine"] = engine_descriptor(*factory.engine);
        manifest["model_limits"] = limits_descriptor(factory.engine_limits);
    }
    manifest["oracle"] = engine_descriptor(oracle_cfg);
    manifest["oracle_limits"] = limits_descriptor(infer.policy.oracle_limits);
    manifest["workers"] = workers;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    // Resume: positions already in the transcript log are not re-run.
    const fs::path log_path = out_dir / "transcripts.jsonl";
    std::vector<AttemptTranscript> done;
    std::set<std::tuple<std::string, int, std::string, std::string>> done_keys;
    if (fs::exists(log_path)) {
        done = load_transcripts(log_path);
        for (const AttemptTranscript& t : done)
            done_keys.insert({t.puzzle_id, t.position_index, mode_name(t.mode), t.theme});
    }

    std::vector<EvalItem> items;
    for (const auto& [theme, zs] : sampled) {
        for (const Puzzle& z : zs) {
            for (PositionTask& t : expand_puzzle(z)) {
                if (done_keys.count({z.id, t.index - 1, mode_name(infer.mode), theme})) continue;
                items.push_back({z.id, theme, std::move(t)});
            }
        }
    }
    std::cout << "attempts: " << items.size() << " to run, " << done.size()
              << " already complete\n";

    std::ofstream log(log_path, std::ios::app);
    if (!log) throw std::runtime_error("cannot write " + log_path.string());
    std::mutex log_mu;
    std::atomic<size_t> next{0};
    std::atomic<size_t> finished{0};
    std::vector<AttemptTranscript> fresh(items.size());
    std::exception_ptr abort;
    std::mutex abort_mu;

    auto work = [&] {
        try {
            EngineSession oracle(oracle_cfg);
            std::unique_ptr<Model> model = factory.make();
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= items.size()) return;
                const EvalItem& item = items[i];
                std::optional<EngineEval> hint;
                if (infer.mode == InferenceMode::Cheating) {
                    hint = item.task.eval_class;
                    if (!hint)
                        hint = oracle.evaluate(item.task.position, infer.policy.oracle_limits).eval;
                }
                AttemptTranscript t = run_attempt(*model, item.task.position, item.task.solution,
                                                  hint, oracle, infer);
                t.puzzle_id = item.puzzle_id;
                t.position_index = item.task.index - 1;
                t.theme = item.theme;
                fresh[i] = t;
                {
                    std::lock_guard<std::mutex> lock(log_mu);
                    log << transcript_line(t) << std::flush;
                    size_t done_now = finished.fetch_add(1) + 1;
                    if (t.error) std::cerr << item.puzzle_id << ": " << *t.error << "\n";
                    std::cerr << "\r" << done_now << "/" << items.size() << std::flush;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(abort_mu);
            if (!abort) abort = std::current_exception();
            next.store(items.size());
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
    if (!items.empty()) std::cerr << "\n";
    if (abort) std::rethrow_exception(abort);

    std::vector<AttemptTranscript> all = std::move(done);
    for (AttemptTranscript& t : fresh) all.push_back(std::move(t));
    MetricsReport report = compute_report(all);
    write_reports(out_dir, report);
    std::cout << render_report(report, ReportFormat::Markdown);
    return 0;
}

// ---------------------------------------------------------------------------
// solve

const char* verdict_tag(const std::string& verdict) {
    if (verdict == "invalid_move") return "[INVALID MOVE: CANNOT PARSE VALID UCI/SAN MOVE STRING]";
    if (verdict == "valid_but_inaccurate")
        return "[VALID BUT INACCURATE MOVE: DOES NOT IMPROVE EVALUATION FROM THE ORIGINAL "
               "POSITION]";
    if (verdict == "correct") return "[MOVE CORRECT]";
    return "[MOVE INCORRECT]";
}

void print_box(const char* speaker, const std::string& text) {
    std::cout << "[" << speaker << "]\n" << text << "\n\n";
}

int cmd_solve(const std::string& fen, const ModelFactory& factory, const EngineConfig& oracle_cfg,
              InferenceConfig infer, const std::string& out_path) {
    infer.mode = InferenceMode::Modulo;
    infer.validate();
    factory.preflight();
    Position p = Position::from_fen(fen);
    std::vector<Move> legal = p.legal_moves();
    if (legal.empty()) throw std::runtime_error("position is terminal: " + fen);

    EngineSession oracle(oracle_cfg);
    std::unique_ptr<Model> model = factory.make();
    // The loop grades by critic acceptance; the reference move argument is
    // unused, any legal move satisfies the signature.
    AttemptTranscript t = run_modulo(*model, p, legal.front(), oracle, infer);

    const std::string base = build_prompt(p, InferenceMode::Modulo, std::nullopt, infer.prompt);
    print_box("user", base);
    for (size_t i = 0; i < t.queries.size(); ++i) {
        const QueryRecord& q = t.queries[i];
        if (i > 0 && q.prompt == base) print_box("user", base);
        print_box("model", q.response);
        print_box("verifier", verdict_tag(q.verdict.value_or("")));
        if (q.feedback) print_box("user", *q.feedback);
    }
    if (t.error) std::cerr << "attempt error: " << *t.error << "\n";

    if (!out_path.empty()) {
        fs::path dir(out_path);
        fs::create_directories(dir);
        json manifest = manifest_base("solve");
        manifest["fen"] = fen;
        manifest["model"] = factory.name();
        manifest["oracle"] = engine_descriptor(oracle_cfg);
        manifest["oracle_limits"] = limits_descriptor(infer.policy.oracle_limits);
        manifest["k"] = infer.k;
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
        std::ofstream log(dir / "transcripts.jsonl", std::ios::app);
        log << transcript_line(t);
    }

    if (t.accepted_uci) {
        std::cout << "accepted move: " << *t.accepted_uci << " (" << t.queries_used
                  << " queries, " << t.resets << " resets)\n";
        return 0;
    }
    std::cout << "no move accepted within " << infer.k << " queries (final: "
              << final_name(t.final) << ")\n";
    return 1;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::string& transcripts, const std::string& format) {
    fs::path path(transcripts);
    if (fs::is_directory(path)) path /= "transcripts.jsonl";
    std::vector<AttemptTranscript> ts = load_transcripts(path);
    if (ts.empty()) throw std::runtime_error("no transcripts in " + path.string());

    ReportFormat fmt;
    if (format == "markdown") fmt = ReportFormat::Markdown;
    else if (format == "csv") fmt = ReportFormat::Csv;
    else if (format == "json") fmt = ReportFormat::Json;
    else throw std::runtime_error("unknown format: " + format);

    std::cout << render_report(compute_report(ts), fmt);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mate puzzle harness: verifier-gated model evaluation on chess puzzles"};
    app.set_version_flag("--version", std::string("matebench ") + kVersion);
    app.require_subcommand(1);

    // split
    auto* split = app.add_subcommand("split", "split a puzzle CSV into validation/train by theme");
    std::string sp_puzzles;
    int sp_holdout = 1000;
    uint64_t sp_seed = 0;
    std::string sp_out = "split-out";
    split->add_option("--puzzles", sp_puzzles, "puzzle CSV (.csv or .csv.gz)")->required();
    split->add_option("--holdout", sp_holdout, "max validation puzzles per theme");
    split->add_option("--seed", sp_seed, "sampling seed");
    split->add_option("--out", sp_out, "output directory");

    // selfplay
    auto* selfplay = app.add_subcommand("selfplay", "generate a labeled corpus from engine games");
    std::string se_engine, se_levels = "0..20", se_out = "selfplay-out";
    int se_games = 50, se_label_depth = 12, se_max_plies = 512;
    std::optional<int> se_depth;
    std::optional<double> se_movetime;
    uint64_t se_seed = 0;
    selfplay->add_option("--engine", se_engine, "engine command line");
    selfplay->add_option("--levels", se_levels, "skill levels, e.g. 0..20 or 0,10,20");
    selfplay->add_option("--games-per-level", se_games, "games per level");
    selfplay->add_option("--depth", se_depth, "per-move search depth");
    selfplay->add_option("--movetime", se_movetime, "per-move search seconds");
    selfplay->add_option("--label-depth", se_label_depth, "labeling search depth");
    selfplay->add_option("--max-plies", se_max_plies, "abort games longer than this");
    selfplay->add_option("--seed", se_seed, "recorded run seed");
    selfplay->add_option("--out", se_out, "output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "run a model over sampled puzzles and report metrics");
    std::string ev_puzzles, ev_split, ev_endpoint, ev_engine, ev_mode = "normal";
    std::string ev_themes = "mateIn1,mateIn2,mateIn3", ev_out = "eval-out";
    size_t ev_n = 100;
    uint64_t ev_seed = 0;
    int ev_k = 10, ev_depth = 20, ev_model_depth = 20, ev_workers = 1;
    bool ev_engine_model = false;
    std::optional<double> ev_temperature;
    eval->add_option("--puzzles", ev_puzzles, "puzzle CSV (.csv or .csv.gz)")->required();
    eval->add_option("--split", ev_split, "split.json: sample from its validation pool");
    eval->add_option("--endpoint", ev_endpoint, "HTTP endpoint config (JSON file)");
    eval->add_flag("--engine-model", ev_engine_model, "use the engine itself as the model");
    eval->add_option("--model-depth", ev_model_depth, "engine-model search depth");
    eval->add_option("--mode", ev_mode, "normal|cheating|pass10|modulo");
    eval->add_option("--themes", ev_themes, "comma-separated theme list");
    eval->add_option("--n", ev_n, "puzzles per theme");
    eval->add_option("--seed", ev_seed, "sampling seed");
    eval->add_option("--engine", ev_engine, "oracle engine command line");
    eval->add_option("--depth", ev_depth, "oracle search depth");
    eval->add_option("--k", ev_k, "query budget for pass@k and the critic loop");
    eval->add_option("--temperature", ev_temperature, "sampling temperature override");
    eval->add_option("--workers", ev_workers, "parallel attempts");
    eval->add_option("--out", ev_out, "output directory");

    // solve
    auto* solve = app.add_subcommand("solve", "run the critic loop on one position");
    std::string so_fen, so_endpoint, so_engine, so_moves, so_out;
    int so_k = 10, so_depth = 20, so_model_depth = 0;
    solve->add_option("--fen", so_fen, "position to solve")->required();
    solve->add_option("--endpoint", so_endpoint, "HTTP endpoint config (JSON file)");
    solve->add_option("--moves", so_moves, "scripted responses, comma-separated");
    solve->add_option("--engine", so_engine, "oracle engine command line");
    solve->add_option("--depth", so_depth, "oracle search depth");
    solve->add_option("--model-depth", so_model_depth, "engine-model search depth (default: oracle depth)");
    solve->add_option("--k", so_k, "query budget");
    solve->add_option("--out", so_out, "optional output directory for the transcript");

    // report
    auto* report = app.add_subcommand("report", "recompute metrics from persisted transcripts");
    std::string re_transcripts, re_format = "markdown";
    report->add_option("--transcripts", re_transcripts, "transcripts.jsonl or its directory")
        ->required();
    report->add_option("--format", re_format, "markdown|csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (split->parsed()) return cmd_split(sp_puzzles, sp_holdout, sp_seed, sp_out);

        if (selfplay->parsed()) {
            SelfplayConfig cfg;
            cfg.base.command = resolve_engine(se_engine);
            cfg.levels = parse_levels(se_levels);
            cfg.games_per_level = se_games;
            if (se_depth || se_movetime)
                cfg.move_limits = EngineLimits{se_depth, se_movetime};
            else
                cfg.move_limits = EngineLimits{15, 10.0};
            cfg.label_limits = EngineLimits::at_depth(se_label_depth);
            cfg.max_plies = se_max_plies;
            cfg.seed = se_seed;
            return cmd_selfplay(cfg, se_out);
        }

        if (eval->parsed()) {
            if (ev_endpoint.empty() == !ev_engine_model)
                throw std::runtime_error("pick exactly one of --endpoint and --engine-model");
            ModelFactory factory;
            EngineConfig oracle_cfg;
            oracle_cfg.command = resolve_engine(ev_engine);
            if (!ev_endpoint.empty()) {
                factory.endpoint = load_endpoint(ev_endpoint);
            } else {
                factory.engine = oracle_cfg;
                factory.engine_limits = EngineLimits::at_depth(ev_model_depth);
            }
            InferenceConfig infer;
            if (ev_mode == "pass10") {
                infer.mode = InferenceMode::PassAtK;
            } else {
                infer.mode = mode_from_name(ev_mode);
            }
            infer.k = ev_k;
            infer.temperature = ev_temperature;
            infer.policy.oracle_limits = EngineLimits::at_depth(ev_depth);
            return cmd_eval(ev_puzzles, ev_split, split_commas(ev_themes), ev_n, ev_seed, factory,
                            oracle_cfg, infer, ev_workers, ev_out);
        }

        if (solve->parsed()) {
            ModelFactory factory;
            EngineConfig oracle_cfg;
            oracle_cfg.command = resolve_engine(so_engine);
            InferenceConfig infer;
            infer.k = so_k;
            infer.policy.oracle_limits = EngineLimits::at_depth(so_depth);
            if (!so_moves.empty() && !so_endpoint.empty())
                throw std::runtime_error("pick at most one of --endpoint and --moves");
            if (!so_moves.empty()) {
                factory.script = split_commas(so_moves);
            } else if (!so_endpoint.empty()) {
                factory.endpoint = load_endpoint(so_endpoint);
            } else {
                factory.engine = oracle_cfg;
                factory.engine_limits =
                    EngineLimits::at_depth(so_model_depth > 0 ? so_model_depth : so_depth);
            }
            return cmd_solve(so_fen, factory, oracle_cfg, infer, so_out);
        }

        if (report->parsed()) return cmd_report(re_transcripts, re_format);
    } catch (const ModelError& e) {
        std::cerr << "endpoint error: " << e.what() << "\n";
        return 3;
    } catch (const EngineError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
