#include "matebench/chess.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "matebench/rng.hpp"

using namespace matebench;

namespace {

std::string join_uci(const std::vector<Move>& moves) {
    std::string out;
    for (const Move& m : moves) {
        if (!out.empty()) out += ", ";
        out += m.uci();
    }
    return out;
}

// Midgame position with queen, rook pair, bishop and pawn moves; the expected
// string doubles as a regression anchor for the enumeration order.
const char* kMidgameFen = "2q1nk1r/2r1pp1p/1p1p2p1/1R6/5B2/2Q1P3/5PPP/2R3K1 w - - 0 22";
const char* kMidgameMoves =
    "b5b6, b5h5, b5g5, b5f5, b5e5, b5d5, b5c5, b5a5, b5b4, b5b3, b5b2, b5b1, "
    "f4h6, f4d6, f4g5, f4e5, f4g3, c3h8, c3g7, c3c7, c3f6, c3c6, c3e5, c3c5, "
    "c3a5, c3d4, c3c4, c3b4, c3d3, c3b3, c3a3, c3d2, c3c2, c3b2, c3e1, c3a1, "
    "g1h1, g1f1, c1c2, c1f1, c1e1, c1d1, c1b1, c1a1, e3e4, h2h3, g2g3, f2f3, "
    "h2h4, g2g4";

// Black to move, rook mate available on d1.
const char* kRookMateFen = "3r4/6Rp/pk6/1p3B2/5N2/P3pbP1/1P5P/4K3 b - - 3 36";
const char* kRookMateMoves =
    "d8h8, d8g8, d8f8, d8e8, d8c8, d8b8, d8a8, d8d7, d8d6, d8d5, d8d4, d8d3, "
    "d8d2, d8d1, b6c6, b6c5, b6a5, f3a8, f3b7, f3c6, f3h5, f3d5, f3g4, f3e4, "
    "f3g2, f3e2, f3h1, f3d1, h7h6, a6a5, b5b4, e3e2, h7h5";

}  // namespace

TEST(Fen, InitialRoundTrip) {
    Position p = Position::initial();
    EXPECT_EQ(p.fen(), "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    EXPECT_EQ(p.side_to_move(), Color::White);
    EXPECT_EQ(p.castling_rights(), CASTLE_WK | CASTLE_WQ | CASTLE_BK | CASTLE_BQ);
    EXPECT_FALSE(p.en_passant());
}

TEST(Fen, RoundTripFixtures) {
    for (const char* fen : {
             kMidgameFen,
             kRookMateFen,
             "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
             "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
         }) {
        EXPECT_EQ(Position::from_fen(fen).fen(), fen) << fen;
    }
    // En passant round trip with a real double push.
    const char* ep = "rnbqkbnr/ppp1pppp/8/3p4/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1";
    EXPECT_EQ(Position::from_fen(ep).fen(), ep);
}

TEST(Fen, RejectsMalformed) {
    // Wrong field count.
    EXPECT_THROW(Position::from_fen("8/8/8/8/8/8/8/8 w - -"), FenError);
    // Rank too short / too long.
    EXPECT_THROW(Position::from_fen("7/8/8/8/8/8/8/8 w - - 0 1"), FenError);
    EXPECT_THROW(Position::from_fen("9/8/8/8/8/8/8/8 w - - 0 1"), FenError);
    // King count.
    EXPECT_THROW(Position::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"), FenError);
    EXPECT_THROW(Position::from_fen("kk6/8/8/8/8/8/8/K7 w - - 0 1"), FenError);
    // Pawn on a back rank.
    EXPECT_THROW(Position::from_fen("P3k3/8/8/8/8/8/8/4K3 w - - 0 1"), FenError);
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/8/3pK3 w - - 0 1"), FenError);
    // Side not to move is in check.
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/4R3/4K3 w - - 0 1"), FenError);
    // The same position is fine with the checked side to move.
    EXPECT_NO_THROW(Position::from_fen("4k3/8/8/8/8/8/4R3/4K3 b - - 0 1"));
    // Bad side-to-move token.
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/8/4K3 x - - 0 1"), FenError);
    // Bad clock fields.
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/8/4K3 w - - x 1"), FenError);
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 0"), FenError);
}

TEST(Fen, RejectsInconsistentEnPassant) {
    // Square on the wrong rank.
    EXPECT_THROW(Position::from_fen("4k3/8/8/8/8/8/8/4K3 w - e4 0 1"), FenError);
    // No pawn behind the square.
    EXPECT_THROW(
        Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq e3 0 1"),
        FenError);
    // Wrong side to move for the claimed push.
    EXPECT_THROW(
        Position::from_fen("rnbqkbnr/ppp1pppp/8/3p4/8/8/PPPPPPPP/RNBQKBNR b KQkq d6 0 2"),
        FenError);
    // The consistent variant parses.
    EXPECT_NO_THROW(
        Position::from_fen("rnbqkbnr/ppp1pppp/8/3p4/8/8/PPPPPPPP/RNBQKBNR w KQkq d6 0 2"));
}

TEST(Fen, StripsStaleCastlingRights) {
    // Kings and rooks displaced; the rights cannot survive.
    Position p = Position::from_fen("4k3/8/8/8/8/8/8/4K2R w KQkq - 0 1");
    EXPECT_EQ(p.castling_rights(), CASTLE_WK);
    EXPECT_EQ(p.fen(), "4k3/8/8/8/8/8/8/4K2R w K - 0 1");
}

TEST(MoveGen, MidgameEnumerationOrder) {
    Position p = Position::from_fen(kMidgameFen);
    EXPECT_EQ(join_uci(p.legal_moves()), kMidgameMoves);
    EXPECT_EQ(p.legal_moves().size(), 50u);
}

TEST(MoveGen, RookMateEnumerationOrder) {
    Position p = Position::from_fen(kRookMateFen);
    EXPECT_EQ(join_uci(p.legal_moves()), kRookMateMoves);
    EXPECT_EQ(p.legal_moves().size(), 33u);
}

TEST(MoveGen, CastlingOrderAndLegality) {
    Position p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
    auto moves = p.legal_moves();
    // Kingside listed before queenside, right after the king's step moves.
    std::string s = join_uci(moves);
    EXPECT_NE(s.find("e1g1, e1c1"), std::string::npos) << s;
    // Castling through an attacked square is rejected; the other wing remains.
    Position q = Position::from_fen("r3k2r/8/8/8/8/8/7q/R3K2R w KQkq - 0 1");
    std::string sq = join_uci(q.legal_moves());
    EXPECT_EQ(sq.find("e1g1"), std::string::npos) << sq;
    EXPECT_NE(sq.find("e1c1"), std::string::npos) << sq;
}

TEST(MoveGen, PromotionOrder) {
    Position p = Position::from_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1");
    auto moves = p.legal_moves();
    std::string s = join_uci(moves);
    EXPECT_NE(s.find("a7a8q, a7a8r, a7a8b, a7a8n"), std::string::npos) << s;
}

TEST(MoveGen, EnPassantPinned) {
    // Capturing en passant would expose the king along the fifth rank.
    Position p = Position::from_fen("8/8/8/KPp4r/8/8/8/4k3 w - c6 0 2");
    for (const Move& m : p.legal_moves()) EXPECT_NE(m.uci(), "b5c6");
}

TEST(Apply, CastlingMovesRook) {
    Position p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
    Position after = p.apply_move(Move(*Square::parse("e1"), *Square::parse("g1")));
    EXPECT_EQ(after.fen(), "r3k2r/8/8/8/8/8/8/R4RK1 b kq - 1 1");
}

TEST(Apply, EnPassantRemovesCapturedPawn) {
    Position p = Position::from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2");
    Position after = p.apply_move(Move(*Square::parse("e5"), *Square::parse("d6")));
    EXPECT_EQ(after.fen(), "4k3/8/3P4/8/8/8/8/4K3 b - - 0 2");
}

TEST(Apply, ClocksAndEpSquare) {
    Position p = Position::initial();
    Position a = p.apply_move(Move(*Square::parse("e2"), *Square::parse("e4")));
    EXPECT_EQ(a.en_passant(), Square::parse("e3"));
    EXPECT_EQ(a.halfmove_clock(), 0);
    EXPECT_EQ(a.fullmove_number(), 1);
    Position b = a.apply_move(Move(*Square::parse("g8"), *Square::parse("f6")));
    EXPECT_FALSE(b.en_passant());
    EXPECT_EQ(b.halfmove_clock(), 1);
    EXPECT_EQ(b.fullmove_number(), 2);
}

TEST(Apply, RejectsIllegal) {
    Position p = Position::initial();
    EXPECT_THROW(p.apply_move(Move(*Square::parse("e2"), *Square::parse("e5"))), IllegalMoveError);
}

TEST(Terminal, MateAndStalemate) {
    Position mate = Position::from_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3");
    EXPECT_TRUE(mate.is_checkmate());
    EXPECT_FALSE(mate.is_stalemate());

    Position stale = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1");
    EXPECT_TRUE(stale.is_stalemate());
    EXPECT_FALSE(stale.is_checkmate());

    Position rook = Position::from_fen(kRookMateFen);
    Position after = rook.apply_move(Move(*Square::parse("d8"), *Square::parse("d1")));
    EXPECT_TRUE(after.is_checkmate());
}

TEST(Perft, InitialShallow) {
    Position p = Position::initial();
    EXPECT_EQ(p.perft(1), 20u);
    EXPECT_EQ(p.perft(2), 400u);
    EXPECT_EQ(p.perft(3), 8902u);
    EXPECT_EQ(p.perft(4), 197281u);
}

TEST(Perft, TrickyPositions) {
    // Castling, pins, en passant, promotions.
    Position kiwipete =
        Position::from_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
    EXPECT_EQ(kiwipete.perft(1), 48u);
    EXPECT_EQ(kiwipete.perft(2), 2039u);
    EXPECT_EQ(kiwipete.perft(3), 97862u);

    Position pinned = Position::from_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1");
    EXPECT_EQ(pinned.perft(1), 14u);
    EXPECT_EQ(pinned.perft(2), 191u);
    EXPECT_EQ(pinned.perft(3), 2812u);
    EXPECT_EQ(pinned.perft(4), 43238u);

    Position promo =
        Position::from_fen("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1");
    EXPECT_EQ(promo.perft(1), 6u);
    EXPECT_EQ(promo.perft(2), 264u);
    EXPECT_EQ(promo.perft(3), 9467u);

    Position busy =
        Position::from_fen("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8");
    EXPECT_EQ(busy.perft(1), 44u);
    EXPECT_EQ(busy.perft(2), 1486u);
    EXPECT_EQ(busy.perft(3), 62379u);

    Position symmetric = Position::from_fen(
        "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10");
    EXPECT_EQ(symmetric.perft(1), 46u);
    EXPECT_EQ(symmetric.perft(2), 2079u);
    EXPECT_EQ(symmetric.perft(3), 89890u);
}

TEST(MoveText, UciParsing) {
    Position p = Position::from_fen(kRookMateFen);
    auto r = parse_move_text("d8d1", p);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.move->uci(), "d8d1");

    auto bad = parse_move_text("d8d9", p);
    EXPECT_FALSE(bad.ok());
    EXPECT_EQ(bad.error, MoveTextError::NoParse);

    auto illegal = parse_move_text("a6a4", p);
    EXPECT_FALSE(illegal.ok());
    EXPECT_EQ(illegal.error, MoveTextError::Illegal);
}

TEST(MoveText, SanParsing) {
    Position p = Position::from_fen(kRookMateFen);
    auto r = parse_move_text("Rd1#", p);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.move->uci(), "d8d1");

    // Capture marker is accepted even for quiet moves and vice versa.
    auto q = parse_move_text("Rd1", p);
    ASSERT_TRUE(q.ok());
    EXPECT_EQ(q.move->uci(), "d8d1");

    Position mid = Position::from_fen(kMidgameFen);
    auto rxc7 = parse_move_text("Rxc7", mid);
    EXPECT_FALSE(rxc7.ok());
    EXPECT_EQ(rxc7.error, MoveTextError::Illegal);

    auto qxc7 = parse_move_text("Qxc7", mid);
    ASSERT_TRUE(qxc7.ok());
    EXPECT_EQ(qxc7.move->uci(), "c3c7");
}

TEST(MoveText, Ambiguity) {
    Position p = Position::from_fen("4k3/8/8/8/8/8/K7/R6R w - - 0 1");
    auto amb = parse_move_text("Rd1", p);
    EXPECT_FALSE(amb.ok());
    EXPECT_EQ(amb.error, MoveTextError::Ambiguous);
    auto ok = parse_move_text("Rad1", p);
    ASSERT_TRUE(ok.ok());
    EXPECT_EQ(ok.move->uci(), "a1d1");
}

TEST(MoveText, CastlingAndPromotion) {
    Position p = Position::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
    EXPECT_EQ(parse_move_text("O-O", p).move->uci(), "e1g1");
    EXPECT_EQ(parse_move_text("0-0-0", p).move->uci(), "e1c1");

    Position promo = Position::from_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1");
    EXPECT_EQ(parse_move_text("a8=Q+", promo).move->uci(), "a7a8q");
    EXPECT_EQ(parse_move_text("a7a8n", promo).move->uci(), "a7a8n");
    // Promotion SAN without the piece letter does not match.
    EXPECT_FALSE(parse_move_text("a8", promo).ok());
}

TEST(MoveText, SanRendering) {
    Position rook = Position::from_fen(kRookMateFen);
    EXPECT_EQ(render_san(rook, Move(*Square::parse("d8"), *Square::parse("d1"))), "Rd1#");

    Position mid = Position::from_fen(kMidgameFen);
    EXPECT_EQ(render_san(mid, Move(*Square::parse("c3"), *Square::parse("c7"))), "Qxc7");
    EXPECT_EQ(render_san(mid, Move(*Square::parse("c3"), *Square::parse("h8"))), "Qxh8#");

    Position rooks = Position::from_fen("4k3/8/8/8/8/8/K7/R6R w - - 0 1");
    EXPECT_EQ(render_san(rooks, Move(*Square::parse("a1"), *Square::parse("d1"))), "Rad1");
}

// Random playouts: every listed move must apply cleanly, never leave the own
// king attacked, and survive FEN / SAN / coordinate-text round trips.
TEST(Properties, RandomPlayouts) {
    Rng rng(20240917);
    for (int game = 0; game < 40; ++game) {
        Position p = Position::initial();
        for (int ply = 0; ply < 80; ++ply) {
            ASSERT_EQ(Position::from_fen(p.fen()).fen(), p.fen());
            auto moves = p.legal_moves();
            if (moves.empty()) break;
            for (const Move& m : moves) {
                Position next = p.apply_move(m);
                EXPECT_FALSE(next.attacked(next.king_square(p.side_to_move()),
                                           next.side_to_move()))
                    << p.fen() << " " << m.uci();
            }
            // Text round trip for a random subset; all of them is too slow.
            for (int k = 0; k < 3; ++k) {
                const Move& m = rng.pick(moves);
                auto via_uci = parse_move_text(m.uci(), p);
                ASSERT_TRUE(via_uci.ok());
                EXPECT_EQ(*via_uci.move, m);
                auto via_san = parse_move_text(render_san(p, m), p);
                ASSERT_TRUE(via_san.ok()) << p.fen() << " " << render_san(p, m);
                EXPECT_EQ(*via_san.move, m);
            }
            p = p.apply_move(rng.pick(moves));
            if (p.halfmove_clock() > 120) break;
        }
    }
}

TEST(Properties, KeyDropsClocks) {
    Position p = Position::from_fen(kMidgameFen);
    EXPECT_EQ(p.key(), "2q1nk1r/2r1pp1p/1p1p2p1/1R6/5B2/2Q1P3/5PPP/2R3K1 w - -");
}
