#ifndef CANTORVAL_ATTRIBUTES_HPP
#define CANTORVAL_ATTRIBUTES_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cantorval/pattern.hpp"
#include "cantorval/rational.hpp"

namespace cantorval {

// Edge kind of a pattern's realization at its span minimum / maximum:
//   Solid    - an interval of the realization touches the endpoint
//   Isolated - the endpoint is an isolated point of the realization
//   Cluster  - gaps (and set points) accumulate at the endpoint
enum class EdgeKind { Solid, Isolated, Cluster };

// Nature of the structure immediately left/right of a position in a realization.
// End means the scan ran off the queried span (resolved through embedding
// contexts, or the ambient outside for the root).
enum class Nature { Solid, Gap, Cluster, End };

// What accumulates at a spine-cycle limit (gaps always do).
struct ClusterContent {
    std::string cycle;  // pattern at which the spine walk closed
    bool has_interval = false;
    bool has_trivial = false;
};

struct NatureAt {
    Nature kind;
    std::string cluster_of;  // pattern whose cluster content applies (Cluster only)
    auto operator<=>(const NatureAt&) const = default;
};

struct PatternAttributes {
    bool has_gap = false;    // a gap cell is reachable
    bool full_span = false;  // realization fills the span exactly (no reachable gap)
    bool has_interval = false;
    EdgeKind left_kind = EdgeKind::Solid;
    EdgeKind right_kind = EdgeKind::Solid;
    bool fl_cluster_left = false;  // free left endpoints of intervals accumulate at min
    bool perfect = true;           // standalone realization has no isolated points

    bool solid_left() const { return left_kind == EdgeKind::Solid; }
    bool solid_right() const { return right_kind == EdgeKind::Solid; }
    bool cluster_left() const { return left_kind == EdgeKind::Cluster; }
    bool cluster_right() const { return right_kind == EdgeKind::Cluster; }
};

// Spec-facing table row.
struct AttributeRow {
    bool solid_left = false;
    bool solid_right = false;
    bool cluster_left = false;
    bool cluster_right = false;
    bool fl_cluster_left = false;
    bool has_gap = false;
    bool has_interval = false;
    bool perfect = true;
};

using AttributeTable = std::map<std::string, AttributeRow>;

// Maximal stretch of solid/point/full-span-ref cells containing an interval.
struct Run {
    int first = 0;
    int last = 0;
    Rat lo, hi;  // body coordinates of the stretch
};

// Endpoint nature of the maximal component a run belongs to, on one side.
enum class SideOutcome { FreeGap, FreeAmbient, Cluster };

struct Side {
    SideOutcome kind;
    ClusterContent content;  // Cluster only
    bool free() const { return kind != SideOutcome::Cluster; }
    auto operator<=>(const Side& o) const {
        if (auto c = kind <=> o.kind; c != 0) return c;
        return content.cycle <=> o.content.cycle;
    }
    bool operator==(const Side& o) const { return (*this <=> o) == 0; }
};

class Analysis {
  public:
    explicit Analysis(const PatternSystem& sys);

    const PatternSystem& system() const { return sys_; }
    const PatternAttributes& attrs(const std::string& name) const { return attrs_.at(name); }
    AttributeTable table() const;

    // Use sites of a pattern: (user pattern, ref cell index).
    const std::vector<std::pair<std::string, int>>& uses(const std::string& name) const {
        return uses_.at(name);
    }

    // Structure immediately right of the start coordinate of cell `index`
    // (skipping point cells), resolved through embedding contexts.
    std::set<NatureAt> nature_right_of(const std::string& pattern, int index) const;
    // Structure immediately left of the start coordinate of cell `index`.
    std::set<NatureAt> nature_left_of(const std::string& pattern, int index) const;
    // Unresolved single-step scans (End = ran off the body).
    NatureAt scan_right(const std::string& pattern, int index) const;
    NatureAt scan_left(const std::string& pattern, int index) const;

    // Content accumulating at a cluster edge (valid when the edge kind is Cluster).
    const ClusterContent& left_content(const std::string& pattern) const;
    const ClusterContent& right_content(const std::string& pattern) const;

    const std::vector<Run>& runs(const std::string& pattern) const { return runs_.at(pattern); }
    // Component-endpoint natures over all realizable embeddings of the run.
    std::set<Side> run_left_sides(const std::string& pattern, int run_index) const;
    std::set<Side> run_right_sides(const std::string& pattern, int run_index) const;

    // Exact end of the leading component in body coordinates (solid_left patterns);
    // exact start of the trailing component (solid_right patterns).
    Rat lambda(const std::string& pattern) const;
    Rat rho(const std::string& pattern) const;

    // Shallowest embedding address of a pattern (BFS, smallest address on ties).
    Address shallowest(const std::string& pattern) const;

  private:
    struct Walk {
        EdgeKind kind;
        // for Cluster: cycle chain patterns with the entry (spine) cell index
        std::vector<std::pair<std::string, int>> cycle;
    };
    struct ChaseFrame {
        std::string from;  // pattern holding the ref we descended through
        int ref_index;
        std::string target;
        int resume;  // where to continue in `from` once the copy is consumed
    };

    void compute_reachability_flags();
    Walk walk_edge(const std::string& start, bool left) const;
    void compute_contexts();
    ClusterContent content_from_cycle(const std::vector<std::pair<std::string, int>>& cycle,
                                      bool suffix_after_entry) const;
    bool cell_range_has_trivial(const std::string& pattern, int from, int to) const;
    bool fl_scan(const std::vector<std::pair<std::string, int>>& cycle) const;
    bool perfect_for_root(const std::string& root) const;
    std::set<Side> chase(std::string pattern, int j, bool left, std::vector<ChaseFrame>& frames,
                         std::set<std::pair<std::string, int>>& ctx_guard) const;

    PatternSystem sys_;
    std::map<std::string, PatternAttributes> attrs_;
    std::map<std::string, std::vector<std::pair<std::string, int>>> uses_;
    std::map<std::string, Walk> left_walk_, right_walk_;
    std::map<std::string, ClusterContent> left_content_, right_content_;
    std::map<std::string, std::set<NatureAt>> left_ctx_, right_ctx_;
    std::map<std::string, bool> trivial_reachable_;
    std::map<std::string, std::vector<Run>> runs_;
    mutable std::map<std::string, Rat> lambda_, rho_;
};

// Spec-facing operation.
AttributeTable attributes(const PatternSystem& sys);

}  // namespace cantorval

#endif
