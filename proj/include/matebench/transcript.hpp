#ifndef MATEBENCH_TRANSCRIPT_HPP
#define MATEBENCH_TRANSCRIPT_HPP

// Attempt transcripts: the durable record of one puzzle position attempted
// under one inference mode. Everything downstream (metrics, reports, resume)
// reads these; the JSON shape is versioned and kept deterministic.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace matebench {

enum class InferenceMode { Normal, Cheating, PassAtK, Modulo };

inline const char* mode_name(InferenceMode m) {
    switch (m) {
        case InferenceMode::Normal: return "normal";
        case InferenceMode::Cheating: return "cheating";
        case InferenceMode::PassAtK: return "pass_at_k";
        case InferenceMode::Modulo: return "modulo";
    }
    return "?";
}

inline InferenceMode mode_from_name(const std::string& s) {
    if (s == "normal") return InferenceMode::Normal;
    if (s == "cheating") return InferenceMode::Cheating;
    if (s == "pass_at_k") return InferenceMode::PassAtK;
    if (s == "modulo") return InferenceMode::Modulo;
    throw std::invalid_argument("unknown inference mode: " + s);
}

enum class FinalOutcome { Correct, Incorrect, ParseFailure };

inline const char* final_name(FinalOutcome f) {
    switch (f) {
        case FinalOutcome::Correct: return "correct";
        case FinalOutcome::Incorrect: return "incorrect";
        case FinalOutcome::ParseFailure: return "parse_failure";
    }
    return "?";
}

inline FinalOutcome final_from_name(const std::string& s) {
    if (s == "correct") return FinalOutcome::Correct;
    if (s == "incorrect") return FinalOutcome::Incorrect;
    if (s == "parse_failure") return FinalOutcome::ParseFailure;
    throw std::invalid_argument("unknown final outcome: " + s);
}

// One model call inside an attempt. parsed_uci is empty on a parse failure.
// Modulo queries carry critic verdicts; graded queries in the other modes
// carry "correct"/"incorrect".
struct QueryRecord {
    std::string prompt;
    std::string response;
    std::optional<int64_t> token_usage;
    std::optional<std::string> parsed_uci;
    std::optional<std::string> parse_error;
    std::optional<std::string> verdict;  // invalid_move | valid_but_inaccurate | correct | incorrect
    std::optional<std::string> feedback;  // critic message sent back, when any
    std::optional<int> retries;           // transport retries spent on this call
};

struct AttemptTranscript {
    static constexpr int kSchemaVersion = 1;

    std::string model;
    std::string puzzle_id;
    int position_index = 0;  // which task within the puzzle, 0-based
    std::string fen;
    std::string theme;  // stratum, e.g. "mateIn2"
    InferenceMode mode = InferenceMode::Normal;
    std::vector<QueryRecord> queries;
    int queries_used = 0;
    int resets = 0;
    FinalOutcome final = FinalOutcome::ParseFailure;
    std::optional<std::string> accepted_uci;  // modulo: move that passed both critics
    std::optional<std::string> graded_uci;    // move grading was applied to
    int64_t total_tokens = 0;
    std::optional<std::string> error;  // transport/engine abort, when any
};

inline nlohmann::json to_json(const QueryRecord& q) {
    nlohmann::json j;
    j["prompt"] = q.prompt;
    j["response"] = q.response;
    if (q.token_usage) j["token_usage"] = *q.token_usage;
    if (q.parsed_uci) j["parsed_uci"] = *q.parsed_uci;
    if (q.parse_error) j["parse_error"] = *q.parse_error;
    if (q.verdict) j["verdict"] = *q.verdict;
    if (q.feedback) j["feedback"] = *q.feedback;
    if (q.retries) j["retries"] = *q.retries;
    return j;
}

inline QueryRecord query_from_json(const nlohmann::json& j) {
    QueryRecord q;
    q.prompt = j.at("prompt").get<std::string>();
    q.response = j.at("response").get<std::string>();
    if (j.contains("token_usage")) q.token_usage = j["token_usage"].get<int64_t>();
    if (j.contains("parsed_uci")) q.parsed_uci = j["parsed_uci"].get<std::string>();
    if (j.contains("parse_error")) q.parse_error = j["parse_error"].get<std::string>();
    if (j.contains("verdict")) q.verdict = j["verdict"].get<std::string>();
    if (j.contains("feedback")) q.feedback = j["feedback"].get<std::string>();
    if (j.contains("retries")) q.retries = j["retries"].get<int>();
    return q;
}

inline nlohmann::json to_json(const AttemptTranscript& t) {
    nlohmann::json j;
    j["schema_version"] = AttemptTranscript::kSchemaVersion;
    j["model"] = t.model;
    j["puzzle_id"] = t.puzzle_id;
    j["position_index"] = t.position_index;
    j["fen"] = t.fen;
    j["theme"] = t.theme;
    j["mode"] = mode_name(t.mode);
    j["queries"] = nlohmann::json::array();
    for (const QueryRecord& q : t.queries) j["queries"].push_back(to_json(q));
    j["queries_used"] = t.queries_used;
    j["resets"] = t.resets;
    j["final"] = final_name(t.final);
    if (t.accepted_uci) j["accepted_uci"] = *t.accepted_uci;
    if (t.graded_uci) j["graded_uci"] = *t.graded_uci;
    j["total_tokens"] = t.total_tokens;
    if (t.error) j["error"] = *t.error;
    return j;
}

inline AttemptTranscript transcript_from_json(const nlohmann::json& j) {
    int v = j.value("schema_version", AttemptTranscript::kSchemaVersion);
    if (v != AttemptTranscript::kSchemaVersion)
        throw std::invalid_argument("unsupported transcript schema version " + std::to_string(v));
    AttemptTranscript t;
    t.model = j.at("model").get<std::string>();
    t.puzzle_id = j.at("puzzle_id").get<std::string>();
    t.position_index = j.at("position_index").get<int>();
    t.fen = j.at("fen").get<std::string>();
    t.theme = j.value("theme", std::string{});
    t.mode = mode_from_name(j.at("mode").get<std::string>());
    for (const auto& q : j.at("queries")) t.queries.push_back(query_from_json(q));
    t.queries_used = j.at("queries_used").get<int>();
    t.resets = j.at("resets").get<int>();
    t.final = final_from_name(j.at("final").get<std::string>());
    if (j.contains("accepted_uci")) t.accepted_uci = j["accepted_uci"].get<std::string>();
    if (j.contains("graded_uci")) t.graded_uci = j["graded_uci"].get<std::string>();
    t.total_tokens = j.at("total_tokens").get<int64_t>();
    if (j.contains("error")) t.error = j["error"].get<std::string>();
    return t;
}

// One transcript per line; nlohmann sorts object keys, so output is stable.
inline std::string transcript_line(const AttemptTranscript& t) {
    return to_json(t).dump() + "\n";
}

}  // namespace matebench

#endif  // MATEBENCH_TRANSCRIPT_HPP
