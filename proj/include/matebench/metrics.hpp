#ifndef MATEBENCH_METRICS_HPP
#define MATEBENCH_METRICS_HPP

// Aggregation over attempt transcripts: position accuracy, puzzle accuracy,
// sanity rate, Wilson score intervals and table rendering. Reports are
// derived from integer counts only, so a JSON report re-renders byte-equal.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matebench/transcript.hpp"

namespace matebench {

struct ConfidenceInterval {
    double point = 0;
    double low = 0;
    double high = 0;
    double confidence = 0.99;

    double half_width() const { return (high - low) / 2; }
};

namespace detail {

// Hard-coded normal quantiles; no runtime quantile dependency keeps outputs
// bit-stable across platforms.
inline double z_for(double confidence) {
    if (confidence == 0.99) return 2.5758293;
    if (confidence == 0.95) return 1.9599640;
    if (confidence == 0.90) return 1.6448536;
    throw std::invalid_argument("unsupported confidence level");
}

}  // namespace detail

inline ConfidenceInterval wilson_interval(int64_t successes, int64_t n,
                                          double confidence = 0.99) {
    if (n < 1 || successes < 0 || successes > n)
        throw std::invalid_argument("wilson_interval: bad counts");
    const double z = detail::z_for(confidence);
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double z2n = z * z / static_cast<double>(n);
    const double denom = 1.0 + z2n;
    const double center = p + z2n / 2.0;
    const double spread =
        z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2n / (4.0 * static_cast<double>(n)));
    ConfidenceInterval ci;
    ci.point = p;
    // Degenerate proportions clamp exactly; rounding noise in the radical
    // must not leak a nonzero bound.
    ci.low = successes == 0 ? 0.0 : std::max(0.0, (center - spread) / denom);
    ci.high = successes == n ? 1.0 : std::min(1.0, (center + spread) / denom);
    ci.confidence = confidence;
    return ci;
}

// Eq-style rates over a transcript set. All three throw on empty input.
inline double overall_accuracy(const std::vector<AttemptTranscript>& ts) {
    if (ts.empty()) throw std::invalid_argument("overall_accuracy: empty transcript set");
    int64_t correct = 0;
    for (const auto& t : ts) correct += t.final == FinalOutcome::Correct;
    return static_cast<double>(correct) / static_cast<double>(ts.size());
}

inline double puzzle_accuracy(const std::vector<AttemptTranscript>& ts) {
    if (ts.empty()) throw std::invalid_argument("puzzle_accuracy: empty transcript set");
    std::map<std::string, bool> solved;  // puzzle id -> all positions correct so far
    for (const auto& t : ts) {
        auto [it, fresh] = solved.emplace(t.puzzle_id, true);
        it->second = it->second && t.final == FinalOutcome::Correct;
    }
    int64_t ok = 0;
    for (const auto& [id, all] : solved) ok += all;
    return static_cast<double>(ok) / static_cast<double>(solved.size());
}

// A position counts as an invalid parse only when every query failed; the
// runner encodes that as final = ParseFailure.
inline double sanity(const std::vector<AttemptTranscript>& ts) {
    if (ts.empty()) throw std::invalid_argument("sanity: empty transcript set");
    int64_t invalid = 0;
    for (const auto& t : ts) invalid += t.final == FinalOutcome::ParseFailure;
    return 1.0 - static_cast<double>(invalid) / static_cast<double>(ts.size());
}

struct ReportRow {
    std::string model;
    std::string mode;
    std::string stratum;  // "all" or a theme
    int64_t puzzles_total = 0;
    int64_t puzzles_solved = 0;
    int64_t positions_total = 0;
    int64_t positions_correct = 0;
    int64_t invalid_parses = 0;
    int64_t token_sum = 0;

    double mean_tokens() const {
        return positions_total ? static_cast<double>(token_sum) / static_cast<double>(positions_total)
                               : 0.0;
    }
};

struct MetricsReport {
    double confidence = 0.99;
    std::vector<ReportRow> rows;
};

inline MetricsReport compute_report(const std::vector<AttemptTranscript>& ts,
                                    double confidence = 0.99) {
    struct Acc {
        ReportRow row;
        std::map<std::string, bool> puzzles;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Acc> groups;

    auto feed = [&](const std::string& stratum, const AttemptTranscript& t) {
        Acc& a = groups[{t.model, mode_name(t.mode), stratum}];
        a.row.positions_total += 1;
        a.row.positions_correct += t.final == FinalOutcome::Correct;
        a.row.invalid_parses += t.final == FinalOutcome::ParseFailure;
        a.row.token_sum += t.total_tokens;
        auto [it, fresh] = a.puzzles.emplace(t.puzzle_id, true);
        it->second = it->second && t.final == FinalOutcome::Correct;
    };
    for (const auto& t : ts) {
        feed("all", t);
        if (!t.theme.empty() && t.theme != "all") feed(t.theme, t);
    }

    MetricsReport report;
    report.confidence = confidence;
    for (auto& [key, acc] : groups) {
        auto& [model, mode, stratum] = key;
        acc.row.model = model;
        acc.row.mode = mode;
        acc.row.stratum = stratum;
        acc.row.puzzles_total = static_cast<int64_t>(acc.puzzles.size());
        for (const auto& [id, ok] : acc.puzzles) acc.row.puzzles_solved += ok;
        report.rows.push_back(acc.row);
    }
    return report;
}

enum class ReportFormat { Markdown, Csv, Json };

namespace detail {

inline std::string pct_pm(const ConfidenceInterval& ci) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f ± %.1f", ci.point * 100.0, ci.half_width() * 100.0);
    return buf;
}

inline std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

}  // namespace detail

inline std::string render_report(const MetricsReport& report, ReportFormat format) {
    auto intervals = [&](const ReportRow& r) {
        struct {
            ConfidenceInterval puzzle, position, sane;
        } out;
        out.puzzle = wilson_interval(r.puzzles_solved, std::max<int64_t>(1, r.puzzles_total),
                                     report.confidence);
        out.position = wilson_interval(r.positions_correct,
                                       std::max<int64_t>(1, r.positions_total), report.confidence);
        out.sane = wilson_interval(r.positions_total - r.invalid_parses,
                                   std::max<int64_t>(1, r.positions_total), report.confidence);
        return out;
    };

    if (format == ReportFormat::Json) {
        nlohmann::json j;
        j["confidence"] = report.confidence;
        j["rows"] = nlohmann::json::array();
        for (const ReportRow& r : report.rows) {
            nlohmann::json row;
            row["model"] = r.model;
            row["mode"] = r.mode;
            row["stratum"] = r.stratum;
            row["puzzles_total"] = r.puzzles_total;
            row["puzzles_solved"] = r.puzzles_solved;
            row["positions_total"] = r.positions_total;
            row["positions_correct"] = r.positions_correct;
            row["invalid_parses"] = r.invalid_parses;
            row["token_sum"] = r.token_sum;
            j["rows"].push_back(row);
        }
        return j.dump(2) + "\n";
    }

    if (format == ReportFormat::Csv) {
        std::string out =
            "model,mode,stratum,puzzles_total,puzzles_solved,positions_total,"
            "positions_correct,invalid_parses,puzzle_accuracy,puzzle_low,puzzle_high,"
            "position_accuracy,position_low,position_high,sanity,sanity_low,sanity_high,"
            "mean_tokens\n";
        for (const ReportRow& r : report.rows) {
            if (r.positions_total == 0) continue;
            auto ci = intervals(r);
            out += r.model + ',' + r.mode + ',' + r.stratum + ',';
            out += std::to_string(r.puzzles_total) + ',' + std::to_string(r.puzzles_solved) + ',';
            out += std::to_string(r.positions_total) + ',' + std::to_string(r.positions_correct) +
                   ',' + std::to_string(r.invalid_parses) + ',';
            for (const ConfidenceInterval& c : {ci.puzzle, ci.position, ci.sane})
                out += detail::fixed(c.point, 6) + ',' + detail::fixed(c.low, 6) + ',' +
                       detail::fixed(c.high, 6) + ',';
            out += detail::fixed(r.mean_tokens(), 1) + '\n';
        }
        return out;
    }

    // Markdown, one row per model x mode x stratum. Percentages carry the
    // interval half-width at the configured confidence.
    std::string out;
    out += "| Model | Mode | Stratum | Puzzles | Positions | Puzzle Accuracy | "
           "Position Accuracy | Sanity | Mean Tokens |\n";
    out += "|---|---|---|---|---|---|---|---|---|\n";
    std::vector<std::string> omitted;
    for (const ReportRow& r : report.rows) {
        if (r.positions_total == 0) {
            omitted.push_back(r.model + "/" + r.mode + "/" + r.stratum);
            continue;
        }
        auto ci = intervals(r);
        out += "| " + r.model + " | " + r.mode + " | " + r.stratum + " | " +
               std::to_string(r.puzzles_total) + " | " + std::to_string(r.positions_total) +
               " | " + detail::pct_pm(ci.puzzle) + " | " + detail::pct_pm(ci.position) + " | " +
               detail::pct_pm(ci.sane) + " | " + detail::fixed(r.mean_tokens(), 1) + " |\n";
    }
    if (!omitted.empty()) {
        out += "\n";
        for (const std::string& name : omitted)
            out += "_Omitted (no positions): " + name + "_\n";
    }
    return out;
}

inline MetricsReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MetricsReport report;
    report.confidence = j.at("confidence").get<double>();
    for (const auto& row : j.at("rows")) {
        ReportRow r;
        r.model = row.at("model").get<std::string>();
        r.mode = row.at("mode").get<std::string>();
        r.stratum = row.at("stratum").get<std::string>();
        r.puzzles_total = row.at("puzzles_total").get<int64_t>();
        r.puzzles_solved = row.at("puzzles_solved").get<int64_t>();
        r.positions_total = row.at("positions_total").get<int64_t>();
        r.positions_correct = row.at("positions_correct").get<int64_t>();
        r.invalid_parses = row.at("invalid_parses").get<int64_t>();
        r.token_sum = row.at("token_sum").get<int64_t>();
        report.rows.push_back(r);
    }
    return report;
}

}  // namespace matebench

#endif  // MATEBENCH_METRICS_HPP
