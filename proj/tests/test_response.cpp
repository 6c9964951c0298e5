#include "matebench/response.hpp"

#include <gtest/gtest.h>

#include "matebench/rng.hpp"

using namespace matebench;

namespace {

const char* kMidgameFen = "2q1nk1r/2r1pp1p/1p1p2p1/1R6/5B2/2Q1P3/5PPP/2R3K1 w - - 0 22";
const char* kRookMateFen = "3r4/6Rp/pk6/1p3B2/5N2/P3pbP1/1P5P/4K3 b - - 3 36";

}  // namespace

TEST(Sanitize, RemovesRoleTags) {
    EXPECT_EQ(sanitize("Model:\nRxc7"), "\nRxc7");
    EXPECT_EQ(sanitize("d8d1"), "d8d1");
    EXPECT_EQ(sanitize("User: try again Model: e2e4"), " try again  e2e4");
}

TEST(Sanitize, FixpointOnNestedTags) {
    EXPECT_EQ(sanitize("MoModel:del: d8d1"), " d8d1");
    EXPECT_EQ(sanitize("UUser:ser: x"), " x");
    // Idempotency over assorted inputs.
    for (const char* s : {"Model:Model:Model:", "a Model: b User: c", "", "User:User:"}) {
        std::string once = sanitize(s);
        EXPECT_EQ(sanitize(once), once) << s;
    }
}

TEST(ExtractMove, DirectCoordinateText) {
    Position p = Position::from_fen(kRookMateFen);
    ParseOutcome r = extract_move("d8d1", p);
    ASSERT_TRUE(r.parsed());
    EXPECT_EQ(r.move().uci(), "d8d1");
}

TEST(ExtractMove, WellFormedButIllegalIsFailure) {
    Position p = Position::from_fen(kMidgameFen);
    // Looks like SAN, but no rook can capture on c7 here.
    ParseOutcome r = extract_move("Rxc7", p);
    EXPECT_FALSE(r.parsed());
}

TEST(ExtractMove, ScansPastProse) {
    Position p = Position::from_fen(kRookMateFen);
    ParseOutcome r = extract_move("I will play f3e2 here", p);
    ASSERT_TRUE(r.parsed());
    EXPECT_EQ(r.move().uci(), "f3e2");

    ParseOutcome s = extract_move("Best move: (Rd1#) wins on the spot.", p);
    ASSERT_TRUE(s.parsed());
    EXPECT_EQ(s.move().uci(), "d8d1");
}

TEST(ExtractMove, SanitizesBeforeScanning) {
    Position p = Position::from_fen(kRookMateFen);
    ParseOutcome r = extract_move("Model:\nd8d1", p);
    ASSERT_TRUE(r.parsed());
    EXPECT_EQ(r.move().uci(), "d8d1");
}

TEST(ExtractMove, FirstLegalTokenWins) {
    Position p = Position::from_fen(kRookMateFen);
    // a6a4 is illegal (single pawn pushes only), f3e2 is legal.
    ParseOutcome r = extract_move("a6a4 then f3e2 or d8d1", p);
    ASSERT_TRUE(r.parsed());
    EXPECT_EQ(r.move().uci(), "f3e2");
}

TEST(ExtractMove, EmptyAndGarbage) {
    Position p = Position::from_fen(kRookMateFen);
    EXPECT_FALSE(extract_move("", p).parsed());
    EXPECT_FALSE(extract_move("   \n\t ", p).parsed());
    EXPECT_FALSE(extract_move("no move to be found here", p).parsed());
    EXPECT_FALSE(extract_move("q9z3 !!», ???", p).parsed());
}

TEST(ExtractMove, NeverReturnsIllegalMove) {
    Rng rng(7771);
    const char* fens[] = {kMidgameFen, kRookMateFen,
                          "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"};
    const char* words[] = {"e4",   "d8d1", "Rxc7", "O-O",  "play", "Model:",
                           "Qh8",  "f3e2", "a1a1", "9999", "Kb7",  "c3c7",
                           "then", "User:", "b5b6", "??",   "e8=Q", "h2h4"};
    for (int trial = 0; trial < 2000; ++trial) {
        Position p = Position::from_fen(fens[rng.index(3)]);
        std::string text;
        for (size_t k = rng.index(6); k-- > 0;) {
            text += words[rng.index(std::size(words))];
            text += rng.index(4) == 0 ? "\n" : " ";
        }
        ParseOutcome r = extract_move(text, p);
        if (r.parsed()) EXPECT_TRUE(p.is_legal(r.move())) << text;
    }
}

TEST(CountTokens, ReportedUsageWins) {
    RawResponse r{"whatever text", 178, std::nullopt};
    EXPECT_EQ(count_tokens(r), 178);
}

TEST(CountTokens, WhitespaceFallback) {
    EXPECT_EQ(count_tokens({"", std::nullopt, std::nullopt}), 0);
    EXPECT_EQ(count_tokens({"Best move: d8d1", std::nullopt, std::nullopt}), 3);
    EXPECT_EQ(count_tokens({"  a \n b\tc  ", std::nullopt, std::nullopt}), 3);
}
