#include "matebench/metrics.hpp"

#include <gtest/gtest.h>

#include "matebench/rng.hpp"

using namespace matebench;

namespace {

AttemptTranscript make(const std::string& puzzle, int index, FinalOutcome final,
                       const std::string& theme = "mateIn1", int64_t tokens = 10) {
    AttemptTranscript t;
    t.model = "m";
    t.puzzle_id = puzzle;
    t.position_index = index;
    t.fen = "8/8/8/8/8/8/8/8 w - - 0 1";  // metrics never parses the FEN
    t.theme = theme;
    t.mode = InferenceMode::Normal;
    t.queries_used = 1;
    t.final = final;
    t.total_tokens = tokens;
    return t;
}

// 300 two-position puzzles, 476 correct positions, exactly 191 fully solved:
// 191 puzzles with 2/2, 94 with 1/2, 15 with 0/2.
std::vector<AttemptTranscript> benchmark_log() {
    std::vector<AttemptTranscript> ts;
    for (int puzzle = 0; puzzle < 300; ++puzzle) {
        int correct = puzzle < 191 ? 2 : puzzle < 285 ? 1 : 0;
        for (int pos = 0; pos < 2; ++pos)
            ts.push_back(make("p" + std::to_string(puzzle), pos,
                              pos < correct ? FinalOutcome::Correct : FinalOutcome::Incorrect));
    }
    return ts;
}

}  // namespace

TEST(Wilson, PublishedHalfWidths) {
    ConfidenceInterval a = wilson_interval(191, 300, 0.99);
    EXPECT_NEAR(a.point, 191.0 / 300.0, 1e-12);
    EXPECT_NEAR(a.half_width(), 0.0708, 0.0005);

    ConfidenceInterval b = wilson_interval(476, 600, 0.99);
    EXPECT_NEAR(b.point, 476.0 / 600.0, 1e-12);
    EXPECT_NEAR(b.half_width(), 0.0425, 0.0005);

    EXPECT_EQ(detail::pct_pm(a), "63.7 ± 7.1");
    EXPECT_EQ(detail::pct_pm(b), "79.3 ± 4.2");
}

TEST(Wilson, DegenerateAndClamped) {
    for (int64_t n : {1, 10, 300, 100000}) {
        ConfidenceInterval zero = wilson_interval(0, n, 0.99);
        EXPECT_EQ(zero.low, 0.0);
        EXPECT_GE(zero.high, 0.0);
        ConfidenceInterval full = wilson_interval(n, n, 0.99);
        EXPECT_EQ(full.high, 1.0);
    }
}

TEST(Wilson, ContainsPointAndStaysInUnitInterval) {
    Rng rng(99);
    for (int trial = 0; trial < 5000; ++trial) {
        int64_t n = 1 + static_cast<int64_t>(rng.below(2000));
        int64_t s = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n) + 1));
        for (double conf : {0.90, 0.95, 0.99}) {
            ConfidenceInterval ci = wilson_interval(s, n, conf);
            EXPECT_LE(0.0, ci.low);
            EXPECT_LE(ci.low, ci.point + 1e-12);
            EXPECT_LE(ci.point, ci.high + 1e-12);
            EXPECT_LE(ci.high, 1.0);
        }
    }
    EXPECT_THROW(wilson_interval(5, 4), std::invalid_argument);
    EXPECT_THROW(wilson_interval(-1, 4), std::invalid_argument);
    EXPECT_THROW(wilson_interval(0, 0), std::invalid_argument);
    EXPECT_THROW(wilson_interval(1, 2, 0.42), std::invalid_argument);
}

TEST(Rates, BenchmarkLogMatchesHandCounts) {
    auto ts = benchmark_log();
    EXPECT_NEAR(overall_accuracy(ts), 476.0 / 600.0, 1e-12);
    EXPECT_NEAR(puzzle_accuracy(ts), 191.0 / 300.0, 1e-12);
    EXPECT_NEAR(sanity(ts), 1.0, 1e-12);
}

TEST(Rates, SanityCountsOnlyAllFailPositions) {
    // 600 positions, 484 with every query failed.
    std::vector<AttemptTranscript> ts;
    for (int i = 0; i < 600; ++i)
        ts.push_back(make("p" + std::to_string(i), 0,
                          i < 484 ? FinalOutcome::ParseFailure : FinalOutcome::Incorrect));
    EXPECT_NEAR(sanity(ts), 1.0 - 484.0 / 600.0, 1e-12);

    ConfidenceInterval ci = wilson_interval(600 - 484, 600, 0.99);
    EXPECT_EQ(detail::pct_pm(ci).substr(0, 4), "19.3");

    // A position where one of several queries parsed is not an invalid parse.
    std::vector<AttemptTranscript> mixed{make("q", 0, FinalOutcome::Incorrect)};
    mixed[0].queries_used = 10;
    EXPECT_NEAR(sanity(mixed), 1.0, 1e-12);
}

TEST(Rates, PuzzleRequiresAllPositions) {
    std::vector<AttemptTranscript> ts{make("a", 0, FinalOutcome::Correct),
                                      make("a", 1, FinalOutcome::Correct),
                                      make("a", 2, FinalOutcome::Incorrect)};
    EXPECT_NEAR(puzzle_accuracy(ts), 0.0, 1e-12);
    EXPECT_NEAR(overall_accuracy(ts), 2.0 / 3.0, 1e-12);
}

TEST(Rates, PuzzleAccuracyCanExceedOverall) {
    // One mate-in-1 solved, one mate-in-3 fully missed.
    std::vector<AttemptTranscript> ts{make("one", 0, FinalOutcome::Correct, "mateIn1"),
                                      make("three", 0, FinalOutcome::Incorrect, "mateIn3"),
                                      make("three", 1, FinalOutcome::Incorrect, "mateIn3"),
                                      make("three", 2, FinalOutcome::Incorrect, "mateIn3")};
    EXPECT_NEAR(puzzle_accuracy(ts), 0.5, 1e-12);
    EXPECT_NEAR(overall_accuracy(ts), 0.25, 1e-12);
}

TEST(Rates, EmptyInputThrows) {
    std::vector<AttemptTranscript> none;
    EXPECT_THROW(overall_accuracy(none), std::invalid_argument);
    EXPECT_THROW(puzzle_accuracy(none), std::invalid_argument);
    EXPECT_THROW(sanity(none), std::invalid_argument);
}

TEST(Rates, Monotonicity) {
    Rng rng(4242);
    std::vector<AttemptTranscript> ts{make("p0", 0, FinalOutcome::Incorrect)};
    double acc = overall_accuracy(ts), sane = sanity(ts);
    for (int i = 1; i < 500; ++i) {
        FinalOutcome f = static_cast<FinalOutcome>(rng.below(3));
        ts.push_back(make("p" + std::to_string(i), 0, f));
        double acc2 = overall_accuracy(ts), sane2 = sanity(ts);
        if (f == FinalOutcome::Correct) EXPECT_GE(acc2 + 1e-12, acc);
        if (f == FinalOutcome::ParseFailure) EXPECT_LE(sane2 - 1e-12, sane);
        acc = acc2;
        sane = sane2;
    }
}

TEST(Report, GroupsByThemeWithWeightedIdentity) {
    std::vector<AttemptTranscript> ts;
    for (int i = 0; i < 40; ++i)
        ts.push_back(make("a" + std::to_string(i), 0,
                          i % 4 ? FinalOutcome::Correct : FinalOutcome::Incorrect, "mateIn1"));
    for (int i = 0; i < 60; ++i)
        ts.push_back(make("b" + std::to_string(i), 0,
                          i % 3 ? FinalOutcome::Correct : FinalOutcome::Incorrect, "mateIn2"));
    MetricsReport report = compute_report(ts);

    int64_t all_correct = 0, theme_correct = 0;
    for (const ReportRow& r : report.rows) {
        if (r.stratum == "all")
            all_correct = r.positions_correct;
        else
            theme_correct += r.positions_correct;
    }
    EXPECT_EQ(all_correct, theme_correct);
    ASSERT_EQ(report.rows.size(), 3u);
    EXPECT_EQ(report.rows[0].stratum, "all");  // map order: "all" < "mateIn1" < "mateIn2"
    EXPECT_EQ(report.rows[1].positions_total, 40);
    EXPECT_EQ(report.rows[2].positions_total, 60);
}

TEST(Report, TokenMeansSumAttemptCost) {
    std::vector<AttemptTranscript> ts{make("a", 0, FinalOutcome::Correct, "t", 178),
                                      make("b", 0, FinalOutcome::Correct, "t", 10)};
    MetricsReport report = compute_report(ts);
    EXPECT_NEAR(report.rows[0].mean_tokens(), 94.0, 1e-12);
}

TEST(Report, MarkdownShape) {
    auto ts = benchmark_log();
    std::string md = render_report(compute_report(ts), ReportFormat::Markdown);
    EXPECT_NE(md.find("| Model | Mode | Stratum | Puzzles | Positions | Puzzle Accuracy "
                      "| Position Accuracy | Sanity | Mean Tokens |"),
              std::string::npos);
    EXPECT_NE(md.find("63.7 ± 7.1"), std::string::npos) << md;
    EXPECT_NE(md.find("79.3 ± 4.2"), std::string::npos) << md;
    EXPECT_NE(md.find("100.0 ± 0.5"), std::string::npos) << md;  // sanity, 600/600
}

TEST(Report, OmittedStratumNote) {
    MetricsReport report;
    ReportRow empty;
    empty.model = "m";
    empty.mode = "normal";
    empty.stratum = "mateIn9";
    report.rows.push_back(empty);
    std::string md = render_report(report, ReportFormat::Markdown);
    EXPECT_NE(md.find("_Omitted (no positions): m/normal/mateIn9_"), std::string::npos) << md;
}

TEST(Report, CsvShape) {
    auto ts = benchmark_log();
    std::string csv = render_report(compute_report(ts), ReportFormat::Csv);
    EXPECT_EQ(csv.substr(0, 5), "model");
    EXPECT_NE(csv.find("m,normal,all,300,191,600,476,0,"), std::string::npos) << csv;
}

TEST(Report, JsonRoundTripRerendersByteIdentical) {
    auto ts = benchmark_log();
    MetricsReport report = compute_report(ts);
    std::string md = render_report(report, ReportFormat::Markdown);
    std::string json = render_report(report, ReportFormat::Json);
    MetricsReport back = report_from_json(json);
    EXPECT_EQ(render_report(back, ReportFormat::Markdown), md);
    EXPECT_EQ(render_report(back, ReportFormat::Json), json);
    EXPECT_EQ(render_report(back, ReportFormat::Csv), render_report(report, ReportFormat::Csv));
}

TEST(Transcript, JsonLineRoundTrip) {
    AttemptTranscript t = make("pz", 2, FinalOutcome::Correct, "mateIn3", 42);
    t.mode = InferenceMode::Modulo;
    t.queries = {{"prompt text", "d8d1", 5, "d8d1", std::nullopt, "correct", std::nullopt},
                 {"p2", "zz", std::nullopt, std::nullopt, "no token parses to a legal move",
                  "invalid_move", "The move you provided is invalid."}};
    t.queries_used = 2;
    t.resets = 1;
    t.accepted_uci = "d8d1";
    t.graded_uci = "d8d1";

    std::string line = transcript_line(t);
    AttemptTranscript back = transcript_from_json(nlohmann::json::parse(line));
    EXPECT_EQ(transcript_line(back), line);
    EXPECT_EQ(back.queries.size(), 2u);
    EXPECT_EQ(back.queries[1].feedback.value(), "The move you provided is invalid.");
    EXPECT_EQ(back.mode, InferenceMode::Modulo);
    EXPECT_EQ(back.resets, 1);
}
