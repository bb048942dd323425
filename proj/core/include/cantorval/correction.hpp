#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <cantorval/approx.hpp>
#include <cantorval/pattern.hpp>
#include <cantorval/rational.hpp>

namespace cantorval {

// One relocatable block V_k of set content: everything in [min, window_hi(k)).
struct CorrectionChunk {
    Rat min, max;  // extent of the content inside the block
    Rat delta;     // leftward shift; 0 for the anchor chunk k = 0
};

// Recipe for emptying the window (b, b+eta) right of an inappropriate gap
// (a, b) into the gap itself, reflecting block order around b.
struct CorrectionPlan {
    Rat gap_lo, gap_hi;  // the gap (a, b)
    Rat epsilon;
    Rat eta;  // window height; the cut b+eta sits strictly inside a resolved gap
    std::vector<CorrectionChunk> chunks;  // descending toward b; chunks[0] is unmoved
    Rat residual;          // width of the unenumerated window (b, last cut)
    bool truncated = false;  // resolution ran out before the requested chunk count

    // upper cut of chunk k's window: b+eta for k = 0, else the previous cut
    Rat window_hi(std::size_t k) const {
        return k == 0 ? Rat(gap_hi + eta) : chunks[k - 1].min;
    }
};

// x
//  -> x - delta on [lo, hi)
struct ChunkPiece {
    Rat lo, hi;
    Rat delta;
};

// Piecewise translation, identity off the listed spans.  error_bound caps the
// displacement of tail points the finite piece list does not represent.
struct ChunkMap {
    std::vector<ChunkPiece> pieces;  // disjoint half-open spans, sorted by lo
    Rat error_bound = 0;

    Rat apply(const Rat& x) const;
    Rat max_shift() const;  // largest represented delta
};

// outer(inner(x)) as a single piecewise translation; error bounds add
ChunkMap compose(const ChunkMap& outer, const ChunkMap& inner);

struct PipelineResult {
    int stages = 0;
    ApproxSet approx;   // the set after all corrections, at working depth
    ChunkMap composed;  // stage maps composed, later stages outermost
    Rat tail_bound;     // sup-distance to the limit map: 2^(1-stages)
};

// Canonical plan for the inappropriate gap at gap_address of sys, where x is
// expand(sys, depth).  eta snaps to the midpoint of the widest resolved gap
// cutting the window (b, b + min{(b-a)/2, epsilon/2}); chunk cuts walk the free
// left endpoints of resolved intervals down toward b, at most `chunks` of them.
CorrectionPlan find_correction(const PatternSystem& sys, const ApproxSet& x,
                               const Address& gap_address, const Rat& epsilon, int chunks);

// Translates every chunk except the anchor left by its delta, replaces the
// unenumerated tail with an unresolved span flush left of b, and retiles the
// gaps.  The returned map moves exactly the non-anchor chunk windows.
std::pair<ApproxSet, ChunkMap> apply_correction(const ApproxSet& x, const CorrectionPlan& plan);

// Corrects the inappropriate gaps of sys in address order, the n-th with
// epsilon 2^-n, each stage working on the image of the previous one.
PipelineResult l_cantorvalize(const PatternSystem& sys, int stages, int depth);

// Resolved gap pieces with no solid flush at their right endpoint.  Gaps whose
// right neighbor is unresolved are not judged.
std::vector<Piece> gaps_without_right_interval(const ApproxSet& x);

}  // namespace cantorval
