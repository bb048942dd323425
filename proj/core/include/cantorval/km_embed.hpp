#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <cantorval/approx.hpp>
#include <cantorval/pattern.hpp>
#include <cantorval/rational.hpp>

namespace cantorval {

// finite union of atoms at one dyadic level; atoms are pairwise disjoint by
// construction, so this names a clopen subset of the viewed space
struct ClopenSet {
    int level = 0;
    std::set<int> atoms;

    bool operator==(const ClopenSet& o) const { return level == o.level && atoms == o.atoms; }
};

struct Partition {
    std::vector<ClopenSet> members;
};

struct Core {
    int component = 0;
    std::pair<int, int> endpoints;  // lower handle first
    Rat length;
};

struct ComponentOrder {
    std::vector<int> components;  // handles in the constructed order
    std::vector<bool> reversed;   // per-arc orientation choice

    bool operator==(const ComponentOrder& o) const {
        return components == o.components && reversed == o.reversed;
    }
};

struct BnVerdict {
    bool member = false;
    std::optional<int> witness;     // certified component behind the sandwich
    std::optional<Rat> needed_eps;  // least radius that would admit a certified witness
};

class MetricView;

// membership region of B*(Y, eps): the relative interior of Y together with
// open balls around the points of Y left outside that interior
class Region {
  public:
    bool contains(const ClopenSet& v) const;
    bool contains_component(int component) const;

  private:
    friend Region b_star(const MetricView& view, int component, const Rat& eps);
    friend Region b_star(const MetricView& view, const ClopenSet& y, const Rat& eps);

    const MetricView* view_ = nullptr;
    bool by_handles_ = false;
    ClopenSet handles_;
    Rat lo_ = 0, hi_ = 0;
    bool lo_strict_ = false, hi_strict_ = false;
};

// metric-only window onto an expanded set: opaque atom and component handles,
// diameters, distances and arc lengths, but no coordinates and no left/right.
// atoms at level k are the maximal spans separated by resolved gaps wider
// than 2^-k; levels past max_level() could hide gaps inside unresolved pieces
// and are refused
class MetricView {
  public:
    MetricView(const PatternSystem& sys, int depth);

    int max_level() const { return max_level_; }
    ClopenSet space(int level) const;
    ClopenSet refine(const ClopenSet& s, int level) const;

    Rat diameter(const ClopenSet& s) const;
    Rat distance(const ClopenSet& s, const ClopenSet& t) const;
    Rat max_distance(const ClopenSet& s, int endpoint) const;

    int component_count() const { return static_cast<int>(comps_.size()); }
    Rat component_length(int component) const;
    bool end_open(int component, int end) const;  // end 0 = lower handle
    Rat endpoint_distance(int e1, int e2) const;
    int component_atom(int component, int level) const;
    std::vector<int> components_in(const ClopenSet& s) const;

  private:
    friend class Region;
    friend Region b_star(const MetricView& view, int component, const Rat& eps);
    friend BnVerdict bn_member(const MetricView& view, const ClopenSet& v, int n);
    friend std::pair<ComponentOrder, ApproxSet> km_order(const MetricView& view, int levels);

    struct Atom {
        Rat lo, hi;
    };
    struct Comp {
        Rat lo, hi;
        bool lo_open = false, hi_open = false;  // open end = gap or hull beside it
    };

    const std::vector<Atom>& atoms(int level) const;
    const Comp& comp(int component) const;
    int atom_of_span(int level, const Rat& lo, const Rat& hi) const;
    bool has_unresolved(const ClopenSet& s) const;

    ApproxSet x_;
    std::vector<Comp> comps_;
    int max_level_ = 0;
    mutable std::vector<std::vector<Atom>> atom_cache_;
};

Region b_star(const MetricView& view, int component, const Rat& eps);
Region b_star(const MetricView& view, const ClopenSet& y, const Rat& eps);

// smallest-resolution atom around the component that stays inside u
ClopenSet clopen_separate(const MetricView& view, int component, const ClopenSet& u);

// does some component S of v satisfy S subset v subset B*(S, 1/n)?
BnVerdict bn_member(const MetricView& view, const ClopenSet& v, int n);

// split v into clopen members that each pass bn_member(., n): one atom per
// large component, every other atom smaller than 1/n across
Partition refine_partition(const MetricView& view, const ClopenSet& v, int n);

// partitions P_1..P_N, each refining the one before and lying inside the
// n-th sandwich family; throws with the maximal achievable N on exhaustion
std::vector<Partition> partition_tower(const MetricView& view, int levels);

// the unique arc [a, b] inside w with w subset B*([a, b], d(a, b) / 2), if any
std::optional<Core> find_core(const MetricView& view, const ClopenSet& w);

// order the components from metric data alone, then lay them back out on the
// line: tower members are ordered around their parents' cores, components by
// their leaf member, and the realization separates members by unit gaps
// before normalizing to [0, 1]
std::pair<ComponentOrder, ApproxSet> km_order(const MetricView& view, int levels);

}  // namespace cantorval
