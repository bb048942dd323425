#ifndef CANTORVAL_APPROX_HPP
#define CANTORVAL_APPROX_HPP

#include <string>
#include <vector>

#include "cantorval/attributes.hpp"
#include "cantorval/pattern.hpp"
#include "cantorval/rational.hpp"

namespace cantorval {

enum class PieceKind { Solid, Gap, Point, Unresolved };

struct Piece {
    PieceKind kind;
    Rat a, b;  // a == b for Point
    std::string pattern;  // Unresolved: pattern that refines [a,b]
    Address addr;
    bool left_certified = false;   // endpoint is a real component boundary
    bool right_certified = false;
    Rat width() const { return b - a; }
};

struct ApproxSet {
    std::vector<Piece> pieces;
    int depth = 0;
    Rat hull_lo, hull_hi;
    const Piece* find(const Address& addr) const;
};

// Substitutes every ref `depth` times; unexpanded refs become Unresolved pieces.
ApproxSet expand(const PatternSystem& sys, int depth);

// Pieces of expand(sys, depth) meeting the open window (lo, hi).  Pruned
// subtrees leave coordinate jumps, so the result is not a tiling.
std::vector<Piece> expand_window(const PatternSystem& sys, int depth, const Rat& lo,
                                 const Rat& hi);

// Subsum-set approximation: intervals [s, s + tail_bound] over all subsets of
// the first `depth` terms, merged.
ApproxSet achievement_set(const std::vector<Rat>& terms, const Rat& tail_bound, int depth);

// Converts full-span refs to solids, drops points absorbed by neighbors,
// merges touching solids, and sets certification flags (pass the analysis of
// the generating system, or null for pattern-free piece lists).
std::vector<Piece> normalize_pieces(std::vector<Piece> raw, const Analysis* an);

}  // namespace cantorval

#endif
