#ifndef MATEBENCH_CHESS_HPP
#define MATEBENCH_CHESS_HPP

// Chess rules kernel: board state, FEN round-trip, legal move generation,
// move application, terminal detection, SAN/UCI text and perft.
// No search, no evaluation; strength comes from an external engine.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace matebench {

enum class Color : uint8_t { White, Black };

inline Color other(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class PieceKind : uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };

struct Piece {
    Color color;
    PieceKind kind;
    bool operator==(const Piece&) const = default;
};

// Squares are indexed 0..63, a1 = 0, b1 = 1, ..., h8 = 63.
struct Square {
    int8_t index = -1;

    Square() = default;
    explicit constexpr Square(int idx) : index(static_cast<int8_t>(idx)) {}
    constexpr Square(int file, int rank) : index(static_cast<int8_t>(rank * 8 + file)) {}

    int file() const { return index & 7; }
    int rank() const { return index >> 3; }
    bool valid() const { return index >= 0 && index < 64; }

    std::string text() const {
        return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
    }

    static std::optional<Square> parse(std::string_view s) {
        if (s.size() != 2 || s[0] < 'a' || s[0] > 'h' || s[1] < '1' || s[1] > '8')
            return std::nullopt;
        return Square(s[0] - 'a', s[1] - '1');
    }

    bool operator==(const Square&) const = default;
    auto operator<=>(const Square&) const = default;
};

struct Move {
    Square from;
    Square to;
    std::optional<PieceKind> promotion;

    Move() = default;
    Move(Square f, Square t, std::optional<PieceKind> promo = std::nullopt)
        : from(f), to(t), promotion(promo) {}

    // Coordinate text, e.g. "d8d1", "a7a8q".
    std::string uci() const {
        std::string s = from.text() + to.text();
        if (promotion) {
            switch (*promotion) {
                case PieceKind::Knight: s += 'n'; break;
                case PieceKind::Bishop: s += 'b'; break;
                case PieceKind::Rook:   s += 'r'; break;
                case PieceKind::Queen:  s += 'q'; break;
                default: break;
            }
        }
        return s;
    }

    bool operator==(const Move&) const = default;
};

inline std::string render_uci(const Move& m) { return m.uci(); }

struct FenError : std::runtime_error {
    explicit FenError(const std::string& what) : std::runtime_error(what) {}
};

struct IllegalMoveError : std::runtime_error {
    explicit IllegalMoveError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Board cells: 0 empty, positive white, negative black.
enum : int8_t { EMPTY = 0, WP = 1, WN, WB, WR, WQ, WK };

inline int8_t cell_of(Piece p) {
    int8_t k = static_cast<int8_t>(static_cast<int>(p.kind) + 1);
    return p.color == Color::White ? k : static_cast<int8_t>(-k);
}

inline std::optional<Piece> piece_of(int8_t cell) {
    if (cell == EMPTY) return std::nullopt;
    Color c = cell > 0 ? Color::White : Color::Black;
    return Piece{c, static_cast<PieceKind>(std::abs(cell) - 1)};
}

inline char piece_char(int8_t cell) {
    static constexpr const char* white = ".PNBRQK";
    char ch = white[std::abs(cell)];
    return cell < 0 ? static_cast<char>(std::tolower(ch)) : ch;
}

constexpr int KNIGHT_DELTAS[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                     {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int KING_DELTAS[8][2] = {{0, 1},  {1, 1},  {1, 0},  {1, -1},
                                   {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
constexpr int BISHOP_DIRS[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
constexpr int ROOK_DIRS[4][2] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

}  // namespace detail

// Castling rights bit flags, FEN order KQkq.
enum CastlingRight : uint8_t {
    CASTLE_WK = 1,
    CASTLE_WQ = 2,
    CASTLE_BK = 4,
    CASTLE_BQ = 8,
};

class Position {
public:
    Position() = default;

    static Position initial() {
        return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    }

    static Position from_fen(std::string_view fen);

    std::string fen() const;

    std::optional<Piece> piece_at(Square sq) const { return detail::piece_of(board_[sq.index]); }
    Color side_to_move() const { return stm_; }
    uint8_t castling_rights() const { return castling_; }
    std::optional<Square> en_passant() const { return ep_; }
    int halfmove_clock() const { return halfmove_; }
    int fullmove_number() const { return fullmove_; }
    Square king_square(Color c) const { return c == Color::White ? wking_ : bking_; }

    bool in_check() const { return attacked(king_square(stm_), other(stm_)); }

    // True if any piece of `by` attacks `sq`.
    bool attacked(Square sq, Color by) const;

    // All legal moves, in a stable documented order (see generate()).
    std::vector<Move> legal_moves() const;

    bool is_legal(const Move& m) const;

    // Successor position; throws IllegalMoveError unless m is legal here.
    Position apply_move(const Move& m) const;

    bool is_checkmate() const { return in_check() && legal_moves().empty(); }
    bool is_stalemate() const { return !in_check() && legal_moves().empty(); }

    // Placement, side, castling and en passant; ignores the clocks.
    // Used as the dedup / repetition key.
    std::string key() const;

    uint64_t perft(int depth) const;

    bool operator==(const Position&) const = default;

private:
    std::array<int8_t, 64> board_{};
    Color stm_ = Color::White;
    uint8_t castling_ = 0;
    std::optional<Square> ep_;
    int halfmove_ = 0;
    int fullmove_ = 1;
    Square wking_{-1};
    Square bking_{-1};

    int8_t& cell(Square sq) { return board_[sq.index]; }
    int8_t cell(Square sq) const { return board_[sq.index]; }

    void generate(std::vector<Move>& out) const;
    void gen_piece_moves(std::vector<Move>& out) const;
    void gen_castling(std::vector<Move>& out) const;
    void gen_pawn_moves(std::vector<Move>& out) const;
    bool king_safe_after(const Move& m) const;
    Position apply_unchecked(const Move& m) const;

    friend struct PositionBuilder;
};

namespace detail {

inline bool aligned(Square a, Square b) {
    int df = b.file() - a.file(), dr = b.rank() - a.rank();
    return df == 0 || dr == 0 || df == dr || df == -dr;
}

}  // namespace detail

inline bool Position::attacked(Square sq, Color by) const {
    const int f = sq.file(), r = sq.rank();
    const int sgn = by == Color::White ? 1 : -1;

    // Pawn attacks come from one rank behind (relative to the attacker).
    const int pr = r - (by == Color::White ? 1 : -1);
    if (pr >= 0 && pr < 8) {
        for (int df : {-1, 1}) {
            int pf = f + df;
            if (pf >= 0 && pf < 8 && cell(Square(pf, pr)) == sgn * detail::WP) return true;
        }
    }
    for (auto& d : detail::KNIGHT_DELTAS) {
        int nf = f + d[0], nr = r + d[1];
        if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8 && cell(Square(nf, nr)) == sgn * detail::WN)
            return true;
    }
    for (auto& d : detail::KING_DELTAS) {
        int nf = f + d[0], nr = r + d[1];
        if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8 && cell(Square(nf, nr)) == sgn * detail::WK)
            return true;
    }
    for (auto& d : detail::BISHOP_DIRS) {
        int nf = f + d[0], nr = r + d[1];
        while (nf >= 0 && nf < 8 && nr >= 0 && nr < 8) {
            int8_t c = cell(Square(nf, nr));
            if (c != detail::EMPTY) {
                if (c == sgn * detail::WB || c == sgn * detail::WQ) return true;
                break;
            }
            nf += d[0];
            nr += d[1];
        }
    }
    for (auto& d : detail::ROOK_DIRS) {
        int nf = f + d[0], nr = r + d[1];
        while (nf >= 0 && nf < 8 && nr >= 0 && nr < 8) {
            int8_t c = cell(Square(nf, nr));
            if (c != detail::EMPTY) {
                if (c == sgn * detail::WR || c == sgn * detail::WQ) return true;
                break;
            }
            nf += d[0];
            nr += d[1];
        }
    }
    return false;
}

// Pseudo-legal generation in a fixed enumeration order; feedback messages
// print legal-move lists, so the order is part of the observable contract:
//   1. non-pawn piece moves, origin squares descending, targets descending
//   2. castling, kingside before queenside
//   3. pawn captures, origin squares descending, targets descending
//   4. single pawn pushes by target square descending
//   5. double pawn pushes by target square descending
//   6. en passant captures, origin squares descending
// Promotions expand to queen, rook, bishop, knight at each target.
inline void Position::gen_piece_moves(std::vector<Move>& out) const {
    const int sgn = stm_ == Color::White ? 1 : -1;
    for (int from = 63; from >= 0; --from) {
        int8_t c = board_[from];
        if (c == detail::EMPTY || (c > 0) != (sgn > 0)) continue;
        int8_t kind = static_cast<int8_t>(std::abs(c));
        if (kind == detail::WP) continue;
        Square fs(from);
        const int f = fs.file(), r = fs.rank();

        auto push_target = [&](int nf, int nr) {
            int8_t t = cell(Square(nf, nr));
            if (t == detail::EMPTY || (t > 0) != (sgn > 0)) out.emplace_back(fs, Square(nf, nr));
        };

        std::vector<Square> targets;
        targets.reserve(27);
        auto collect_step = [&](const int (*deltas)[2], int n) {
            for (int i = 0; i < n; ++i) {
                int nf = f + deltas[i][0], nr = r + deltas[i][1];
                if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8) targets.emplace_back(nf, nr);
            }
        };
        auto collect_slide = [&](const int (*dirs)[2], int n) {
            for (int i = 0; i < n; ++i) {
                int nf = f + dirs[i][0], nr = r + dirs[i][1];
                while (nf >= 0 && nf < 8 && nr >= 0 && nr < 8) {
                    targets.emplace_back(nf, nr);
                    if (cell(Square(nf, nr)) != detail::EMPTY) break;
                    nf += dirs[i][0];
                    nr += dirs[i][1];
                }
            }
        };

        switch (kind) {
            case detail::WN: collect_step(detail::KNIGHT_DELTAS, 8); break;
            case detail::WK: collect_step(detail::KING_DELTAS, 8); break;
            case detail::WB: collect_slide(detail::BISHOP_DIRS, 4); break;
            case detail::WR: collect_slide(detail::ROOK_DIRS, 4); break;
            case detail::WQ:
                collect_slide(detail::BISHOP_DIRS, 4);
                collect_slide(detail::ROOK_DIRS, 4);
                break;
            default: break;
        }
        std::sort(targets.begin(), targets.end(),
                  [](Square a, Square b) { return a.index > b.index; });
        for (Square t : targets) push_target(t.file(), t.rank());
    }
}

inline void Position::gen_castling(std::vector<Move>& out) const {
    const bool white = stm_ == Color::White;
    const int r = white ? 0 : 7;
    const Square ksq(4, r);
    const int8_t king = white ? detail::WK : static_cast<int8_t>(-detail::WK);
    const int8_t rook = white ? detail::WR : static_cast<int8_t>(-detail::WR);
    if (cell(ksq) != king || attacked(ksq, other(stm_))) return;

    auto clear = [&](int f0, int f1) {
        for (int f = f0; f <= f1; ++f)
            if (cell(Square(f, r)) != detail::EMPTY) return false;
        return true;
    };
    // Kingside first, matching the enumeration order.
    if ((castling_ & (white ? CASTLE_WK : CASTLE_BK)) && cell(Square(7, r)) == rook &&
        clear(5, 6) && !attacked(Square(5, r), other(stm_)) && !attacked(Square(6, r), other(stm_)))
        out.emplace_back(ksq, Square(6, r));
    if ((castling_ & (white ? CASTLE_WQ : CASTLE_BQ)) && cell(Square(0, r)) == rook &&
        clear(1, 3) && !attacked(Square(3, r), other(stm_)) && !attacked(Square(2, r), other(stm_)))
        out.emplace_back(ksq, Square(2, r));
}

inline void Position::gen_pawn_moves(std::vector<Move>& out) const {
    const bool white = stm_ == Color::White;
    const int sgn = white ? 1 : -1;
    const int8_t pawn = static_cast<int8_t>(sgn * detail::WP);
    const int promo_rank = white ? 7 : 0;

    auto emit = [&](Square from, Square to) {
        if (to.rank() == promo_rank) {
            out.emplace_back(from, to, PieceKind::Queen);
            out.emplace_back(from, to, PieceKind::Rook);
            out.emplace_back(from, to, PieceKind::Bishop);
            out.emplace_back(from, to, PieceKind::Knight);
        } else {
            out.emplace_back(from, to);
        }
    };

    // Captures.
    for (int from = 63; from >= 0; --from) {
        if (board_[from] != pawn) continue;
        Square fs(from);
        int nr = fs.rank() + sgn;
        if (nr < 0 || nr > 7) continue;
        for (int df : {1, -1}) {  // higher target square first
            int nf = fs.file() + df;
            if (nf < 0 || nf > 7) continue;
            int8_t t = cell(Square(nf, nr));
            if (t != detail::EMPTY && (t > 0) != white) emit(fs, Square(nf, nr));
        }
    }
    // Single pushes, by target square descending.
    for (int to = 63; to >= 0; --to) {
        if (board_[to] != detail::EMPTY) continue;
        int fr = Square(to).rank() - sgn;
        if (fr < 0 || fr > 7) continue;
        Square fs(Square(to).file(), fr);
        if (cell(fs) == pawn) emit(fs, Square(to));
    }
    // Double pushes, by target square descending.
    const int start_rank = white ? 1 : 6;
    for (int to = 63; to >= 0; --to) {
        Square ts(to);
        if (ts.rank() != (white ? 3 : 4) || board_[to] != detail::EMPTY) continue;
        Square mid(ts.file(), ts.rank() - sgn);
        Square fs(ts.file(), start_rank);
        if (cell(mid) == detail::EMPTY && cell(fs) == pawn) out.emplace_back(fs, ts);
    }
    // En passant.
    if (ep_) {
        int er = ep_->rank() - sgn;
        for (int df : {1, -1}) {
            int ef = ep_->file() + df;
            if (ef < 0 || ef > 7 || er < 0 || er > 7) continue;
            Square fs(ef, er);
            if (cell(fs) == pawn) out.emplace_back(fs, *ep_);
        }
    }
}

inline void Position::generate(std::vector<Move>& out) const {
    gen_piece_moves(out);
    gen_castling(out);
    gen_pawn_moves(out);
}

inline bool Position::king_safe_after(const Move& m) const {
    Position next = apply_unchecked(m);
    return !next.attacked(next.king_square(stm_), other(stm_));
}

inline std::vector<Move> Position::legal_moves() const {
    std::vector<Move> pseudo;
    pseudo.reserve(64);
    generate(pseudo);

    std::vector<Move> out;
    out.reserve(pseudo.size());
    const Square ksq = king_square(stm_);
    const bool check = attacked(ksq, other(stm_));
    for (const Move& m : pseudo) {
        bool is_ep = ep_ && m.to == *ep_ && std::abs(cell(m.from)) == detail::WP;
        // A move can only expose the king if the king moves, the position is
        // already in check, the move is en passant, or the origin square is on
        // a line with the king. Everything else passes without the full scan.
        if (!check && m.from != ksq && !is_ep && !detail::aligned(m.from, ksq)) {
            out.push_back(m);
        } else if (king_safe_after(m)) {
            out.push_back(m);
        }
    }
    return out;
}

inline bool Position::is_legal(const Move& m) const {
    for (const Move& lm : legal_moves())
        if (lm == m) return true;
    return false;
}

inline Position Position::apply_unchecked(const Move& m) const {
    Position p = *this;
    const int8_t moving = p.cell(m.from);
    const bool white = moving > 0;
    const int8_t kind = static_cast<int8_t>(std::abs(moving));
    const bool capture_on_target = p.cell(m.to) != detail::EMPTY;

    bool pawn_move = kind == detail::WP;
    bool is_ep = pawn_move && ep_ && m.to == *ep_ && !capture_on_target;

    p.cell(m.to) = moving;
    p.cell(m.from) = detail::EMPTY;

    if (is_ep) p.cell(Square(m.to.file(), m.from.rank())) = detail::EMPTY;

    if (m.promotion)
        p.cell(m.to) = detail::cell_of(Piece{white ? Color::White : Color::Black, *m.promotion});

    if (kind == detail::WK) {
        if (white)
            p.wking_ = m.to;
        else
            p.bking_ = m.to;
        p.castling_ &= white ? static_cast<uint8_t>(~(CASTLE_WK | CASTLE_WQ))
                             : static_cast<uint8_t>(~(CASTLE_BK | CASTLE_BQ));
        // Castling: king moves two files, bring the rook across.
        if (m.from.file() == 4 && std::abs(m.to.file() - m.from.file()) == 2) {
            int r = m.from.rank();
            if (m.to.file() == 6) {
                p.cell(Square(5, r)) = p.cell(Square(7, r));
                p.cell(Square(7, r)) = detail::EMPTY;
            } else {
                p.cell(Square(3, r)) = p.cell(Square(0, r));
                p.cell(Square(0, r)) = detail::EMPTY;
            }
        }
    }

    auto clear_rook_right = [&p](Square sq) {
        if (sq == Square(7, 0)) p.castling_ &= static_cast<uint8_t>(~CASTLE_WK);
        if (sq == Square(0, 0)) p.castling_ &= static_cast<uint8_t>(~CASTLE_WQ);
        if (sq == Square(7, 7)) p.castling_ &= static_cast<uint8_t>(~CASTLE_BK);
        if (sq == Square(0, 7)) p.castling_ &= static_cast<uint8_t>(~CASTLE_BQ);
    };
    if (kind == detail::WR) clear_rook_right(m.from);
    if (capture_on_target) clear_rook_right(m.to);

    p.ep_ = std::nullopt;
    if (pawn_move && std::abs(m.to.rank() - m.from.rank()) == 2)
        p.ep_ = Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2);

    if (pawn_move || capture_on_target || is_ep)
        p.halfmove_ = 0;
    else
        p.halfmove_ += 1;
    if (stm_ == Color::Black) p.fullmove_ += 1;
    p.stm_ = other(stm_);
    return p;
}

inline Position Position::apply_move(const Move& m) const {
    if (!is_legal(m)) throw IllegalMoveError("illegal move " + m.uci() + " in " + fen());
    return apply_unchecked(m);
}

inline uint64_t Position::perft(int depth) const {
    if (depth <= 0) return 1;
    std::vector<Move> moves = legal_moves();
    if (depth == 1) return moves.size();
    uint64_t total = 0;
    for (const Move& m : moves) total += apply_unchecked(m).perft(depth - 1);
    return total;
}

// ---------------------------------------------------------------------------
// FEN

inline Position Position::from_fen(std::string_view fen) {
    std::vector<std::string> fields;
    {
        std::string cur;
        for (char ch : fen) {
            if (ch == ' ') {
                if (!cur.empty()) fields.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) fields.push_back(cur);
    }
    if (fields.size() != 6) throw FenError("expected 6 FEN fields, got " + std::to_string(fields.size()));

    Position p;
    // Field 1: placement, rank 8 first.
    {
        int rank = 7, file = 0;
        for (char ch : fields[0]) {
            if (ch == '/') {
                if (file != 8) throw FenError("bad rank length in placement");
                rank -= 1;
                file = 0;
                if (rank < 0) throw FenError("too many ranks in placement");
                continue;
            }
            if (ch >= '1' && ch <= '8') {
                file += ch - '0';
                if (file > 8) throw FenError("rank overflow in placement");
                continue;
            }
            static const std::string letters = "PNBRQK";
            auto idx = letters.find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
            if (idx == std::string::npos || file >= 8) throw FenError("bad placement char");
            int8_t c = static_cast<int8_t>(idx + 1);
            if (std::islower(static_cast<unsigned char>(ch))) c = static_cast<int8_t>(-c);
            p.board_[rank * 8 + file] = c;
            file += 1;
        }
        if (rank != 0 || file != 8) throw FenError("placement does not cover 8 ranks");
    }
    // Kings and pawns sanity.
    {
        int wk = 0, bk = 0;
        for (int i = 0; i < 64; ++i) {
            if (p.board_[i] == detail::WK) {
                wk += 1;
                p.wking_ = Square(i);
            }
            if (p.board_[i] == -detail::WK) {
                bk += 1;
                p.bking_ = Square(i);
            }
            if (std::abs(p.board_[i]) == detail::WP) {
                int r = i >> 3;
                if (r == 0 || r == 7) throw FenError("pawn on back rank");
            }
        }
        if (wk != 1 || bk != 1) throw FenError("each side needs exactly one king");
    }
    // Field 2: side to move.
    if (fields[1] == "w")
        p.stm_ = Color::White;
    else if (fields[1] == "b")
        p.stm_ = Color::Black;
    else
        throw FenError("bad side-to-move field");
    // Field 3: castling.
    if (fields[2] != "-") {
        for (char ch : fields[2]) {
            switch (ch) {
                case 'K': p.castling_ |= CASTLE_WK; break;
                case 'Q': p.castling_ |= CASTLE_WQ; break;
                case 'k': p.castling_ |= CASTLE_BK; break;
                case 'q': p.castling_ |= CASTLE_BQ; break;
                default: throw FenError("bad castling field");
            }
        }
    }
    // Strip rights whose king or rook already moved away; puzzle databases
    // occasionally carry stale flags.
    if (p.cell(Square(4, 0)) != detail::WK) p.castling_ &= ~(CASTLE_WK | CASTLE_WQ);
    if (p.cell(Square(7, 0)) != detail::WR) p.castling_ &= ~CASTLE_WK;
    if (p.cell(Square(0, 0)) != detail::WR) p.castling_ &= ~CASTLE_WQ;
    if (p.cell(Square(4, 7)) != -detail::WK) p.castling_ &= ~(CASTLE_BK | CASTLE_BQ);
    if (p.cell(Square(7, 7)) != -detail::WR) p.castling_ &= ~CASTLE_BK;
    if (p.cell(Square(0, 7)) != -detail::WR) p.castling_ &= ~CASTLE_BQ;
    // Field 4: en passant.
    if (fields[3] != "-") {
        auto sq = Square::parse(fields[3]);
        if (!sq) throw FenError("bad en passant square");
        int r = sq->rank();
        if (r != 2 && r != 5) throw FenError("en passant square must be on rank 3 or 6");
        bool white_pushed = r == 2;
        if (white_pushed != (p.stm_ == Color::Black))
            throw FenError("en passant square inconsistent with side to move");
        int8_t pusher = white_pushed ? detail::WP : static_cast<int8_t>(-detail::WP);
        Square pawn_sq(sq->file(), white_pushed ? 3 : 4);
        Square origin(sq->file(), white_pushed ? 1 : 6);
        if (p.cell(pawn_sq) != pusher || p.cell(*sq) != detail::EMPTY ||
            p.cell(origin) != detail::EMPTY)
            throw FenError("en passant square inconsistent with a double push");
        p.ep_ = sq;
    }
    // Fields 5-6: clocks.
    auto parse_count = [](const std::string& s, const char* what) {
        if (s.empty() || s.size() > 6) throw FenError(std::string("bad ") + what);
        long v = 0;
        for (char ch : s) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) throw FenError(std::string("bad ") + what);
            v = v * 10 + (ch - '0');
        }
        return static_cast<int>(v);
    };
    p.halfmove_ = parse_count(fields[4], "halfmove clock");
    p.fullmove_ = parse_count(fields[5], "fullmove number");
    if (p.fullmove_ < 1) throw FenError("fullmove number must be >= 1");

    if (p.attacked(p.king_square(other(p.stm_)), p.stm_))
        throw FenError("side not to move is in check");
    return p;
}

inline std::string Position::fen() const {
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int run = 0;
        for (int file = 0; file < 8; ++file) {
            int8_t c = board_[rank * 8 + file];
            if (c == detail::EMPTY) {
                run += 1;
            } else {
                if (run) out += static_cast<char>('0' + run);
                run = 0;
                out += detail::piece_char(c);
            }
        }
        if (run) out += static_cast<char>('0' + run);
        if (rank) out += '/';
    }
    out += stm_ == Color::White ? " w " : " b ";
    if (castling_ == 0) {
        out += '-';
    } else {
        if (castling_ & CASTLE_WK) out += 'K';
        if (castling_ & CASTLE_WQ) out += 'Q';
        if (castling_ & CASTLE_BK) out += 'k';
        if (castling_ & CASTLE_BQ) out += 'q';
    }
    out += ' ';
    out += ep_ ? ep_->text() : "-";
    out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
    return out;
}

inline std::string Position::key() const {
    std::string f = fen();
    // Drop the final two clock fields.
    for (int i = 0; i < 2; ++i) {
        auto pos = f.rfind(' ');
        f.resize(pos);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Move text

enum class MoveTextError { None, NoParse, Illegal, Ambiguous };

struct MoveTextResult {
    std::optional<Move> move;
    MoveTextError error = MoveTextError::None;

    bool ok() const { return move.has_value(); }
};

namespace detail {

inline std::optional<PieceKind> promo_kind(char ch) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
        case 'N': return PieceKind::Knight;
        case 'B': return PieceKind::Bishop;
        case 'R': return PieceKind::Rook;
        case 'Q': return PieceKind::Queen;
        default: return std::nullopt;
    }
}

inline std::optional<Move> parse_uci_token(std::string_view t) {
    if (t.size() != 4 && t.size() != 5) return std::nullopt;
    auto from = Square::parse(t.substr(0, 2));
    auto to = Square::parse(t.substr(2, 2));
    if (!from || !to) return std::nullopt;
    std::optional<PieceKind> promo;
    if (t.size() == 5) {
        promo = promo_kind(t[4]);
        if (!promo) return std::nullopt;
    }
    return Move(*from, *to, promo);
}

}  // namespace detail

// Interprets `token` first as UCI, then as SAN, against the legal moves of p.
// Trailing check/mate/annotation marks (+, #, !, ?) are ignored.
inline MoveTextResult parse_move_text(std::string_view token, const Position& p) {
    while (!token.empty()) {
        char back = token.back();
        if (back == '+' || back == '#' || back == '!' || back == '?')
            token.remove_suffix(1);
        else
            break;
    }
    if (token.empty()) return {std::nullopt, MoveTextError::NoParse};

    const std::vector<Move> legal = p.legal_moves();

    if (auto m = detail::parse_uci_token(token)) {
        for (const Move& lm : legal)
            if (lm == *m) return {lm, MoveTextError::None};
        return {std::nullopt, MoveTextError::Illegal};
    }

    // SAN. Castling first.
    if (token == "O-O" || token == "0-0" || token == "O-O-O" || token == "0-0-0") {
        bool kingside = token.size() == 3;
        for (const Move& lm : legal) {
            auto pc = p.piece_at(lm.from);
            if (pc && pc->kind == PieceKind::King &&
                std::abs(lm.to.file() - lm.from.file()) == 2 &&
                (lm.to.file() == 6) == kingside)
                return {lm, MoveTextError::None};
        }
        return {std::nullopt, MoveTextError::Illegal};
    }

    PieceKind kind = PieceKind::Pawn;
    std::optional<int> from_file, from_rank;
    std::optional<PieceKind> promo;
    std::string_view rest = token;

    if (!rest.empty() && std::strchr("KQRBN", rest.front())) {
        switch (rest.front()) {
            case 'K': kind = PieceKind::King; break;
            case 'Q': kind = PieceKind::Queen; break;
            case 'R': kind = PieceKind::Rook; break;
            case 'B': kind = PieceKind::Bishop; break;
            case 'N': kind = PieceKind::Knight; break;
        }
        rest.remove_prefix(1);
    }
    if (kind == PieceKind::Pawn) {
        // Optional promotion suffix: "e8=Q" or "e8Q".
        if (rest.size() >= 2) {
            size_t tail = rest.size() - 1;
            if (auto pk = detail::promo_kind(rest[tail]);
                pk && std::isupper(static_cast<unsigned char>(rest[tail]))) {
                promo = pk;
                rest.remove_suffix(1);
                if (!rest.empty() && rest.back() == '=') rest.remove_suffix(1);
            }
        }
    }
    // Disambiguation and capture marker before the target square.
    std::string body(rest);
    if (body.size() < 2) return {std::nullopt, MoveTextError::NoParse};
    std::string target = body.substr(body.size() - 2);
    auto to = Square::parse(target);
    if (!to) return {std::nullopt, MoveTextError::NoParse};
    body.resize(body.size() - 2);
    if (!body.empty() && body.back() == 'x') body.pop_back();
    for (char ch : body) {
        if (ch >= 'a' && ch <= 'h' && !from_file)
            from_file = ch - 'a';
        else if (ch >= '1' && ch <= '8' && !from_rank)
            from_rank = ch - '1';
        else
            return {std::nullopt, MoveTextError::NoParse};
    }
    // A bare pawn push like "e4" implies the from-file.
    if (kind == PieceKind::Pawn && !from_file) from_file = to->file();

    std::vector<Move> matches;
    for (const Move& lm : legal) {
        auto pc = p.piece_at(lm.from);
        if (!pc || pc->kind != kind) continue;
        if (lm.to != *to) continue;
        if (from_file && lm.from.file() != *from_file) continue;
        if (from_rank && lm.from.rank() != *from_rank) continue;
        if (promo != lm.promotion) continue;
        matches.push_back(lm);
    }
    if (matches.empty()) return {std::nullopt, MoveTextError::Illegal};
    if (matches.size() > 1) return {std::nullopt, MoveTextError::Ambiguous};
    return {matches[0], MoveTextError::None};
}

// SAN with minimal disambiguation and +/# suffixes; m must be legal in p.
inline std::string render_san(const Position& p, const Move& m) {
    auto pc = p.piece_at(m.from);
    if (!pc) throw IllegalMoveError("cannot render SAN for illegal move " + m.uci());
    Position next = p.apply_move(m);

    std::string out;
    const bool capture =
        p.piece_at(m.to).has_value() ||
        (pc->kind == PieceKind::Pawn && p.en_passant() && m.to == *p.en_passant());

    if (pc->kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
        out = m.to.file() == 6 ? "O-O" : "O-O-O";
    } else if (pc->kind == PieceKind::Pawn) {
        if (capture) {
            out += static_cast<char>('a' + m.from.file());
            out += 'x';
        }
        out += m.to.text();
        if (m.promotion) {
            out += '=';
            out += "NBRQ"[static_cast<int>(*m.promotion) - 1];
        }
    } else {
        out += " NBRQK"[static_cast<int>(pc->kind)];
        bool need_file = false, need_rank = false, ambiguous = false;
        for (const Move& lm : p.legal_moves()) {
            if (lm.from == m.from || lm.to != m.to) continue;
            auto other_pc = p.piece_at(lm.from);
            if (!other_pc || other_pc->kind != pc->kind) continue;
            ambiguous = true;
            if (lm.from.file() == m.from.file()) need_rank = true;
            if (lm.from.rank() == m.from.rank()) need_file = true;
        }
        if (ambiguous && !need_file && !need_rank) need_file = true;
        if (need_file) out += static_cast<char>('a' + m.from.file());
        if (need_rank) out += static_cast<char>('1' + m.from.rank());
        if (capture) out += 'x';
        out += m.to.text();
    }

    if (next.is_checkmate())
        out += '#';
    else if (next.in_check())
        out += '+';
    return out;
}

}  // namespace matebench

#endif  // MATEBENCH_CHESS_HPP
