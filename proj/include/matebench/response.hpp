#ifndef MATEBENCH_RESPONSE_HPP
#define MATEBENCH_RESPONSE_HPP

// Turning raw model output into a candidate move. Models ramble, echo the
// chat scaffolding back, or wrap the move in prose; the extractor scans for
// the first token that resolves to a legal move. Failure is a value.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "matebench/chess.hpp"

namespace matebench {

struct RawResponse {
    std::string text;
    std::optional<int64_t> token_usage;  // provider-reported, when available
    std::optional<std::chrono::milliseconds> latency;
    std::optional<int> retries;  // transport retries spent on this call
};

struct ParseFailure {
    std::string reason;
};

struct ParseOutcome {
    std::variant<Move, ParseFailure> value;

    bool parsed() const { return std::holds_alternative<Move>(value); }
    const Move& move() const { return std::get<Move>(value); }
    const std::string& reason() const { return std::get<ParseFailure>(value).reason; }

    static ParseOutcome ok(Move m) { return {m}; }
    static ParseOutcome fail(std::string reason) { return {ParseFailure{std::move(reason)}}; }
};

// Removes hallucinated chat role tags. Applied to a fixpoint so nested
// fragments ("MoModel:del:") cannot survive one pass; everything else is
// preserved verbatim, including whitespace around removed tags.
inline std::string sanitize(std::string_view text) {
    std::string out(text);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::string_view tag : {"Model:", "User:"}) {
            size_t at;
            while ((at = out.find(tag)) != std::string::npos) {
                out.erase(at, tag.size());
                changed = true;
            }
        }
    }
    return out;
}

namespace detail {

inline bool token_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '=' || ch == '+' ||
           ch == '#' || ch == '-';
}

}  // namespace detail

// Sanitizes, splits into tokens at whitespace/punctuation, and returns the
// first token that names a legal move of p (coordinate text or SAN). A
// well-formed string for an illegal move does not count; with no matching
// token the outcome is a ParseFailure carrying a short reason.
inline ParseOutcome extract_move(std::string_view text, const Position& p) {
    const std::string clean = sanitize(text);
    size_t i = 0;
    bool saw_token = false;
    while (i < clean.size()) {
        while (i < clean.size() && !detail::token_char(clean[i])) ++i;
        size_t start = i;
        while (i < clean.size() && detail::token_char(clean[i])) ++i;
        if (i == start) continue;
        saw_token = true;
        std::string_view token(clean.data() + start, i - start);
        MoveTextResult r = parse_move_text(token, p);
        if (r.ok()) return ParseOutcome::ok(*r.move);
    }
    return ParseOutcome::fail(saw_token ? "no token parses to a legal move"
                                        : "empty response");
}

// Provider-reported usage when present, whitespace-delimited count otherwise.
inline int64_t count_tokens(const RawResponse& r) {
    if (r.token_usage) return *r.token_usage;
    int64_t n = 0;
    bool in_token = false;
    for (char ch : r.text) {
        bool ws = std::isspace(static_cast<unsigned char>(ch));
        if (!ws && !in_token) ++n;
        in_token = !ws;
    }
    return n;
}

}  // namespace matebench

#endif  // MATEBENCH_RESPONSE_HPP
