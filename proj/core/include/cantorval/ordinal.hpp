#ifndef CANTORVAL_ORDINAL_HPP
#define CANTORVAL_ORDINAL_HPP

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "cantorval/approx.hpp"
#include "cantorval/pattern.hpp"
#include "cantorval/rational.hpp"

namespace cantorval {

// Ordinals below w^w in Cantor normal form: sum of w^e * c with strictly
// decreasing exponents. Vector comparison is ordinal comparison.
struct CNF {
    std::vector<std::pair<int, int>> terms;  // (exponent, coefficient)

    static CNF from_int(int n);
    bool zero() const { return terms.empty(); }
    // has a w^0 term; compact as an interval [0, alpha)
    bool successor() const { return !terms.empty() && terms.back().first == 0; }
    bool limit() const { return !zero() && !successor(); }
    int leading_exponent() const { return terms.empty() ? 0 : terms.front().first; }
    int trailing_exponent() const { return terms.empty() ? 0 : terms.back().first; }
    CNF predecessor() const;  // alpha - 1, successors only
    CNF plus(const CNF& tail) const;

    bool operator==(const CNF&) const = default;
    auto operator<=>(const CNF&) const = default;
};

CNF parse_ordinal(const std::string& text);
std::string format_ordinal(const CNF& a);

struct LayoutPoint {
    CNF ord;
    Rat pos;
    bool is_limit = false;
    int cost = 1;  // smallest embed depth that realizes the point
};

struct OrdinalLayout {
    CNF alpha;
    int depth = 0;
    std::vector<LayoutPoint> points;  // ascending
};

// Canonical order-embedding of [0, alpha) into [0,1]: finite runs of blocks on
// windows 1-2^-j (last window stretched to the right edge), each w^e block an
// infinite ladder of w^(e-1) blocks accumulating at its window's right edge.
// Ladders are truncated to their first `depth` rungs.
OrdinalLayout ordinal_embed(const CNF& alpha, int depth, int max_exponent = 3);

// Exact position of one ordinal under the same layout.
Rat layout_position(const CNF& alpha, const CNF& beta, int max_exponent = 3);

struct SubsetDesc {
    CNF alpha;                // ambient ordinal, must be a successor
    bool all = true;          // A = alpha
    std::vector<CNF> points;  // explicit A when !all
};

struct HairRecord {
    CNF point;
    int index = 0;       // enumeration order; nominal length is 2^-index
    Rat nominal_length;  // 2^-index, the schedule the construction follows
    Rat lo, hi;          // realized span
};

struct BasePoint {
    CNF ord;
    Rat layout_pos;    // position in the abstract [0,1] layout
    Rat realized_pos;  // left end of the feature in the built set
    bool in_a = false;
    int hair = -1;  // index into hairs when in_a
};

struct BrickSpan {
    Rat lo, hi;
};

struct LollipopPlan {
    std::vector<BasePoint> base;
    std::vector<HairRecord> hairs;
    std::vector<BrickSpan> bricks;
};

struct BuiltSet {
    PatternSystem system;
    ApproxSet set;
    LollipopPlan plan;
    SubsetDesc desc;
    int depth = 0;
};

// Realizes the subset description as a set whose components without free
// endpoints are exactly the hairs, one per point of A.
BuiltSet build_from_ordinal_subset(const SubsetDesc& desc, int depth);

struct SpaceNode {
    PieceKind kind = PieceKind::Solid;  // Solid arc, Point, or Unresolved cluster
    Rat lo, hi;
    bool isolated = false;  // alone among resolved components in some clopen span
    bool left_cluster = false;
    bool right_cluster = false;
};

struct ComponentSpace {
    std::vector<SpaceNode> nodes;  // ascending
    bool has_isolated_trivial = false;
};

ComponentSpace component_space(const PatternSystem& sys, int depth);
ComponentSpace component_space(const BuiltSet& built);

struct ZReport {
    bool empty = false;
    bool partial = false;  // finite-depth only, no symbolic invariant
    int rank = 0;
    int degree = 0;
    std::vector<HairRecord> witnesses;
};

ZReport z_subspace(const BuiltSet& built);
ZReport z_subspace(const ApproxSet& x);

// Survivors of r rounds of isolated-point removal on the realized base,
// counting a point as isolated once its approach ladder is gone.
std::vector<int> cb_survivor_counts(const BuiltSet& built, int rounds);

struct DistinguishEntry {
    int a = 0, b = 0;
    bool distinct = false;  // distinct invariants imply non-homeomorphic
};

struct DistinguishMatrix {
    std::vector<ZReport> reports;
    std::vector<DistinguishEntry> pairs;  // all a < b
};

DistinguishMatrix distinguish(const std::vector<SubsetDesc>& family, int depth);

}  // namespace cantorval

#endif
