#include "cantorval/attributes.hpp"

#include <algorithm>
#include <stdexcept>

namespace cantorval {

namespace {

std::set<std::string> reach(const PatternSystem& sys, const std::string& start) {
    std::set<std::string> seen;
    std::vector<std::string> todo{start};
    while (!todo.empty()) {
        std::string cur = todo.back();
        todo.pop_back();
        if (!seen.insert(cur).second) continue;
        for (const Cell& c : sys.body(cur).cells)
            if (c.kind == CellKind::Ref) todo.push_back(c.target);
    }
    return seen;
}

int first_non_point(const PatternBody& b) {
    for (int i = 0; i < (int)b.cells.size(); ++i)
        if (b.cells[i].kind != CellKind::Point) return i;
    return -1;
}

int last_non_point(const PatternBody& b) {
    for (int i = (int)b.cells.size() - 1; i >= 0; --i)
        if (b.cells[i].kind != CellKind::Point) return i;
    return -1;
}

bool set_has(const std::set<NatureAt>& s, Nature k) {
    for (const NatureAt& n : s)
        if (n.kind == k) return true;
    return false;
}

}  // namespace

Analysis::Analysis(const PatternSystem& sys) : sys_(sys) {
    for (const std::string& name : sys.names()) {
        uses_[name];
        attrs_[name];
        runs_[name];
    }
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i)
            if (cells[i].kind == CellKind::Ref) uses_[cells[i].target].push_back({name, i});
    }

    compute_reachability_flags();

    for (const std::string& name : sys.names()) {
        left_walk_[name] = walk_edge(name, true);
        right_walk_[name] = walk_edge(name, false);
        attrs_[name].left_kind = left_walk_[name].kind;
        attrs_[name].right_kind = right_walk_[name].kind;
    }

    compute_contexts();

    // Trivial components: single points of a realization lying in no interval.
    // Direct sources per body, then closed under reachability; contents of
    // cluster cycles consult both.
    std::map<std::string, bool> direct;
    for (const std::string& name : sys.names())
        direct[name] = cell_range_has_trivial(name, 0, (int)sys.body(name).cells.size());
    for (const std::string& name : sys.names()) {
        bool any = false;
        for (const std::string& q : reach(sys, name)) any = any || direct[q];
        trivial_reachable_[name] = any;
    }

    for (const std::string& name : sys.names()) {
        if (left_walk_[name].kind == EdgeKind::Cluster)
            left_content_[name] = content_from_cycle(left_walk_[name].cycle, true);
        if (right_walk_[name].kind == EdgeKind::Cluster)
            right_content_[name] = content_from_cycle(right_walk_[name].cycle, false);
        attrs_[name].fl_cluster_left =
            left_walk_[name].kind == EdgeKind::Cluster && fl_scan(left_walk_[name].cycle);
    }

    for (const std::string& name : sys.names()) attrs_[name].perfect = perfect_for_root(name);

    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        auto member = [&](const Cell& c) {
            if (c.kind == CellKind::Solid || c.kind == CellKind::Point) return true;
            return c.kind == CellKind::Ref && attrs_.at(c.target).full_span;
        };
        auto interval_maker = [&](const Cell& c) {
            return c.kind == CellKind::Solid ||
                   (c.kind == CellKind::Ref && attrs_.at(c.target).full_span);
        };
        Rat pos = 0;
        int i = 0;
        while (i < (int)cells.size()) {
            if (!member(cells[i])) {
                pos += cells[i].length;
                ++i;
                continue;
            }
            Run r;
            r.first = i;
            r.lo = pos;
            bool makes = false;
            while (i < (int)cells.size() && member(cells[i])) {
                makes = makes || interval_maker(cells[i]);
                pos += cells[i].length;
                ++i;
            }
            r.last = i - 1;
            r.hi = pos;
            if (makes) runs_[name].push_back(r);
        }
    }
}

void Analysis::compute_reachability_flags() {
    for (const std::string& name : sys_.names()) {
        bool gap = false, solid = false, full_ref = false;
        for (const std::string& q : reach(sys_, name)) {
            for (const Cell& c : sys_.body(q).cells) {
                if (c.kind == CellKind::Gap) gap = true;
                if (c.kind == CellKind::Solid) solid = true;
            }
        }
        attrs_[name].has_gap = gap;
        attrs_[name].full_span = !gap;
        (void)full_ref;
        attrs_[name].has_interval = solid || !gap;
    }
    // a ref to a full-span pattern yields an interval even in gap-bearing hosts
    for (const std::string& name : sys_.names()) {
        if (attrs_[name].has_interval) continue;
        for (const std::string& q : reach(sys_, name))
            for (const Cell& c : sys_.body(q).cells)
                if (c.kind == CellKind::Ref && attrs_[c.target].full_span)
                    attrs_[name].has_interval = true;
    }
}

Analysis::Walk Analysis::walk_edge(const std::string& start, bool left) const {
    std::vector<std::pair<std::string, int>> chain;
    std::string cur = start;
    while (true) {
        const PatternBody& b = sys_.body(cur);
        int i = left ? first_non_point(b) : last_non_point(b);
        if (i < 0) throw std::logic_error("body without positive-length cells");
        const Cell& c = b.cells[i];
        if (c.kind == CellKind::Solid) return {EdgeKind::Solid, {}};
        if (c.kind == CellKind::Gap) return {EdgeKind::Isolated, {}};
        if (attrs_.at(c.target).full_span) return {EdgeKind::Solid, {}};
        chain.push_back({cur, i});
        for (size_t k = 0; k < chain.size(); ++k) {
            if (chain[k].first == c.target) {
                return {EdgeKind::Cluster,
                        std::vector<std::pair<std::string, int>>(chain.begin() + k, chain.end())};
            }
        }
        cur = c.target;
    }
}

NatureAt Analysis::scan_right(const std::string& pattern, int index) const {
    const auto& cells = sys_.body(pattern).cells;
    for (int i = index; i < (int)cells.size(); ++i) {
        const Cell& c = cells[i];
        if (c.kind == CellKind::Point) continue;
        if (c.kind == CellKind::Solid) return {Nature::Solid, ""};
        if (c.kind == CellKind::Gap) return {Nature::Gap, ""};
        if (attrs_.at(c.target).full_span) return {Nature::Solid, ""};
        switch (attrs_.at(c.target).left_kind) {
            case EdgeKind::Solid: return {Nature::Solid, ""};
            case EdgeKind::Isolated: return {Nature::Gap, ""};
            case EdgeKind::Cluster: return {Nature::Cluster, c.target};
        }
    }
    return {Nature::End, ""};
}

NatureAt Analysis::scan_left(const std::string& pattern, int index) const {
    const auto& cells = sys_.body(pattern).cells;
    for (int i = index - 1; i >= 0; --i) {
        const Cell& c = cells[i];
        if (c.kind == CellKind::Point) continue;
        if (c.kind == CellKind::Solid) return {Nature::Solid, ""};
        if (c.kind == CellKind::Gap) return {Nature::Gap, ""};
        if (attrs_.at(c.target).full_span) return {Nature::Solid, ""};
        switch (attrs_.at(c.target).right_kind) {
            case EdgeKind::Solid: return {Nature::Solid, ""};
            case EdgeKind::Isolated: return {Nature::Gap, ""};
            case EdgeKind::Cluster: return {Nature::Cluster, c.target};
        }
    }
    return {Nature::End, ""};
}

void Analysis::compute_contexts() {
    for (const std::string& name : sys_.names()) {
        left_ctx_[name];
        right_ctx_[name];
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const std::string& name : sys_.names()) {
            std::set<NatureAt> l, r;
            if (name == sys_.root()) {
                l.insert({Nature::End, ""});
                r.insert({Nature::End, ""});
            }
            for (const auto& [user, idx] : uses_.at(name)) {
                NatureAt nl = scan_left(user, idx);
                if (nl.kind == Nature::End)
                    l.insert(left_ctx_[user].begin(), left_ctx_[user].end());
                else
                    l.insert(nl);
                NatureAt nr = scan_right(user, idx + 1);
                if (nr.kind == Nature::End)
                    r.insert(right_ctx_[user].begin(), right_ctx_[user].end());
                else
                    r.insert(nr);
            }
            if (l != left_ctx_[name]) {
                left_ctx_[name] = l;
                changed = true;
            }
            if (r != right_ctx_[name]) {
                right_ctx_[name] = r;
                changed = true;
            }
        }
    }
}

std::set<NatureAt> Analysis::nature_right_of(const std::string& pattern, int index) const {
    NatureAt n = scan_right(pattern, index);
    if (n.kind != Nature::End) return {n};
    return right_ctx_.at(pattern);
}

std::set<NatureAt> Analysis::nature_left_of(const std::string& pattern, int index) const {
    NatureAt n = scan_left(pattern, index);
    if (n.kind != Nature::End) return {n};
    return left_ctx_.at(pattern);
}

bool Analysis::cell_range_has_trivial(const std::string& pattern, int from, int to) const {
    const auto& cells = sys_.body(pattern).cells;
    for (int i = from; i < to; ++i) {
        const Cell& c = cells[i];
        if (c.kind == CellKind::Point) {
            if (!set_has(nature_left_of(pattern, i), Nature::Solid) &&
                !set_has(nature_right_of(pattern, i + 1), Nature::Solid))
                return true;
        } else if (c.kind == CellKind::Ref) {
            const PatternAttributes& t = attrs_.at(c.target);
            if (t.left_kind != EdgeKind::Solid &&
                !set_has(nature_left_of(pattern, i), Nature::Solid))
                return true;
            if (t.right_kind != EdgeKind::Solid &&
                !set_has(nature_right_of(pattern, i + 1), Nature::Solid))
                return true;
            auto it = trivial_reachable_.find(c.target);
            if (it != trivial_reachable_.end() && it->second) return true;
        }
    }
    return false;
}

ClusterContent Analysis::content_from_cycle(
    const std::vector<std::pair<std::string, int>>& cycle, bool suffix_after_entry) const {
    ClusterContent out;
    out.cycle = cycle.front().first;
    for (const auto& [name, entry] : cycle) {
        const auto& cells = sys_.body(name).cells;
        int from = suffix_after_entry ? entry + 1 : 0;
        int to = suffix_after_entry ? (int)cells.size() : entry;
        for (int i = from; i < to; ++i) {
            const Cell& c = cells[i];
            if (c.kind == CellKind::Solid) out.has_interval = true;
            if (c.kind == CellKind::Ref && attrs_.at(c.target).has_interval)
                out.has_interval = true;
        }
        if (cell_range_has_trivial(name, from, to)) out.has_trivial = true;
    }
    return out;
}

bool Analysis::fl_scan(const std::vector<std::pair<std::string, int>>& cycle) const {
    // a gap in a cycle body recurs at every level; if solid-left structure
    // follows it (continuing past body ends within the cycle), free left
    // endpoints of intervals accumulate at the spine limit
    auto embedder_of = [&](const std::string& name) -> std::pair<std::string, int> {
        for (size_t m = 0; m < cycle.size(); ++m) {
            const std::string& next = m + 1 < cycle.size()
                                          ? cycle[m + 1].first
                                          : cycle.front().first;
            if (next == name) return cycle[m];
        }
        return cycle.back();
    };
    for (const auto& [gname, gentry] : cycle) {
        (void)gentry;
        const auto& gcells = sys_.body(gname).cells;
        for (int g = 0; g < (int)gcells.size(); ++g) {
            if (gcells[g].kind != CellKind::Gap) continue;
            std::set<std::pair<std::string, int>> visited;
            std::string pat = gname;
            int idx = g + 1;
            std::optional<bool> verdict;
            while (!verdict) {
                if (!visited.insert({pat, idx}).second) {
                    verdict = false;
                    break;
                }
                const auto& cells = sys_.body(pat).cells;
                if (idx >= (int)cells.size()) {
                    auto [emb, eidx] = embedder_of(pat);
                    pat = emb;
                    idx = eidx + 1;
                    continue;
                }
                const Cell& c = cells[idx];
                switch (c.kind) {
                    case CellKind::Point: ++idx; break;
                    case CellKind::Solid: verdict = true; break;
                    case CellKind::Gap: verdict = false; break;
                    case CellKind::Ref:
                        verdict = attrs_.at(c.target).full_span ||
                                  attrs_.at(c.target).left_kind == EdgeKind::Solid;
                        break;
                }
            }
            if (*verdict) return true;
        }
    }
    return false;
}

bool Analysis::perfect_for_root(const std::string& root) const {
    std::set<std::string> r = reach(sys_, root);
    bool any_pt = false;
    for (const std::string& q : r)
        for (const Cell& c : sys_.body(q).cells)
            if (c.kind == CellKind::Point) any_pt = true;
    if (!any_pt) return true;

    // context fixpoint restricted to the part reachable from this root
    std::map<std::string, std::set<NatureAt>> lctx, rctx;
    for (const std::string& q : r) {
        lctx[q];
        rctx[q];
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const std::string& name : r) {
            std::set<NatureAt> l, rt;
            if (name == root) {
                l.insert({Nature::End, ""});
                rt.insert({Nature::End, ""});
            }
            for (const auto& [user, idx] : uses_.at(name)) {
                if (!r.count(user)) continue;
                NatureAt nl = scan_left(user, idx);
                if (nl.kind == Nature::End)
                    l.insert(lctx[user].begin(), lctx[user].end());
                else
                    l.insert(nl);
                NatureAt nr = scan_right(user, idx + 1);
                if (nr.kind == Nature::End)
                    rt.insert(rctx[user].begin(), rctx[user].end());
                else
                    rt.insert(nr);
            }
            if (l != lctx[name]) {
                lctx[name] = l;
                changed = true;
            }
            if (rt != rctx[name]) {
                rctx[name] = rt;
                changed = true;
            }
        }
    }

    auto open = [](const std::set<NatureAt>& s) {
        for (const NatureAt& n : s)
            if (n.kind == Nature::Gap || n.kind == Nature::End) return true;
        return false;
    };
    for (const std::string& q : r) {
        const auto& cells = sys_.body(q).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Point) continue;
            NatureAt nl = scan_left(q, i);
            std::set<NatureAt> lset = nl.kind == Nature::End ? lctx[q] : std::set<NatureAt>{nl};
            NatureAt nr = scan_right(q, i + 1);
            std::set<NatureAt> rset = nr.kind == Nature::End ? rctx[q] : std::set<NatureAt>{nr};
            if (open(lset) && open(rset)) return false;
        }
    }
    return true;
}

std::set<Side> Analysis::chase(std::string pattern, int j, bool left,
                               std::vector<ChaseFrame>& frames,
                               std::set<std::pair<std::string, int>>& ctx_guard) const {
    while (true) {
        const auto& cells = sys_.body(pattern).cells;
        if (j < 0 || j >= (int)cells.size()) {
            if (!frames.empty()) {
                ChaseFrame f = frames.back();
                frames.pop_back();
                pattern = f.from;
                j = f.resume;
                continue;
            }
            std::set<Side> out;
            if (pattern == sys_.root()) out.insert({SideOutcome::FreeAmbient, {}});
            for (const auto& [user, idx] : uses_.at(pattern)) {
                if (!ctx_guard.insert({user, idx}).second) continue;
                std::vector<ChaseFrame> sub;
                auto part = chase(user, left ? idx - 1 : idx + 1, left, sub, ctx_guard);
                out.insert(part.begin(), part.end());
            }
            return out;
        }
        const Cell& c = cells[j];
        if (c.kind == CellKind::Point || c.kind == CellKind::Solid) {
            j += left ? -1 : 1;
            continue;
        }
        if (c.kind == CellKind::Gap) return {{SideOutcome::FreeGap, {}}};
        // ref
        if (attrs_.at(c.target).full_span) {
            j += left ? -1 : 1;
            continue;
        }
        EdgeKind inner = left ? attrs_.at(c.target).right_kind : attrs_.at(c.target).left_kind;
        if (inner == EdgeKind::Isolated) return {{SideOutcome::FreeGap, {}}};
        if (inner == EdgeKind::Cluster) {
            ClusterContent cc = left ? right_content_.at(c.target) : left_content_.at(c.target);
            return {{SideOutcome::Cluster, cc}};
        }
        // component continues into the copy; detect merge cycles
        for (size_t k = 0; k < frames.size(); ++k) {
            if (frames[k].target == c.target) {
                std::vector<std::pair<std::string, int>> cyc;
                for (size_t m = k + 1; m < frames.size(); ++m)
                    cyc.push_back({frames[m].from, frames[m].ref_index});
                cyc.push_back({pattern, j});
                return {{SideOutcome::Cluster, content_from_cycle(cyc, !left)}};
            }
        }
        int n_t = (int)sys_.body(c.target).cells.size();
        frames.push_back({pattern, j, c.target, j + (left ? -1 : 1)});
        pattern = c.target;
        j = left ? n_t - 1 : 0;
    }
}

std::set<Side> Analysis::run_left_sides(const std::string& pattern, int run_index) const {
    const Run& r = runs_.at(pattern).at(run_index);
    std::vector<ChaseFrame> frames;
    std::set<std::pair<std::string, int>> guard;
    return chase(pattern, r.first - 1, true, frames, guard);
}

std::set<Side> Analysis::run_right_sides(const std::string& pattern, int run_index) const {
    const Run& r = runs_.at(pattern).at(run_index);
    std::vector<ChaseFrame> frames;
    std::set<std::pair<std::string, int>> guard;
    return chase(pattern, r.last + 1, false, frames, guard);
}

const ClusterContent& Analysis::left_content(const std::string& pattern) const {
    return left_content_.at(pattern);
}

const ClusterContent& Analysis::right_content(const std::string& pattern) const {
    return right_content_.at(pattern);
}

namespace {

// Walk for exact merged-component extents: each step contributes an affine map
// x -> offset + scale * x applied to the next pattern's own extent.
struct ExtentStep {
    Rat offset, scale;
    std::string next;  // empty when terminal; offset is then the extent
    bool terminal;
};

}  // namespace

Rat Analysis::lambda(const std::string& pattern) const {
    if (auto it = lambda_.find(pattern); it != lambda_.end()) return it->second;
    auto step = [&](const std::string& p) -> ExtentStep {
        if (attrs_.at(p).full_span) return {1, 0, "", true};
        const auto& cells = sys_.body(p).cells;
        Rat pos = 0;
        for (const Cell& c : cells) {
            if (c.kind == CellKind::Point) continue;
            if (c.kind == CellKind::Solid ||
                (c.kind == CellKind::Ref && attrs_.at(c.target).full_span)) {
                pos += c.length;
                continue;
            }
            if (c.kind == CellKind::Gap) return {pos, 0, "", true};
            if (attrs_.at(c.target).left_kind == EdgeKind::Solid)
                return {pos, c.length, c.target, false};
            return {pos, 0, "", true};
        }
        return {1, 0, "", true};
    };
    std::vector<std::pair<std::string, ExtentStep>> chain;
    std::string cur = pattern;
    Rat val;
    while (true) {
        bool looped = false;
        for (size_t k = 0; k < chain.size(); ++k) {
            if (chain[k].first == cur) {
                Rat a = 0, b = 1;
                for (size_t m = k; m < chain.size(); ++m) {
                    a += b * chain[m].second.offset;
                    b *= chain[m].second.scale;
                }
                val = a / (1 - b);
                chain.resize(k);
                looped = true;
                break;
            }
        }
        if (looped) break;
        ExtentStep s = step(cur);
        if (s.terminal) {
            val = s.offset;
            break;
        }
        chain.push_back({cur, s});
        cur = s.next;
    }
    for (size_t m = chain.size(); m-- > 0;)
        val = chain[m].second.offset + chain[m].second.scale * val;
    lambda_[pattern] = val;
    return val;
}

Rat Analysis::rho(const std::string& pattern) const {
    if (auto it = rho_.find(pattern); it != rho_.end()) return it->second;
    auto step = [&](const std::string& p) -> ExtentStep {
        if (attrs_.at(p).full_span) return {0, 0, "", true};
        const auto& cells = sys_.body(p).cells;
        Rat pos = 1;
        for (int i = (int)cells.size() - 1; i >= 0; --i) {
            const Cell& c = cells[i];
            if (c.kind == CellKind::Point) continue;
            if (c.kind == CellKind::Solid ||
                (c.kind == CellKind::Ref && attrs_.at(c.target).full_span)) {
                pos -= c.length;
                continue;
            }
            if (c.kind == CellKind::Gap) return {pos, 0, "", true};
            if (attrs_.at(c.target).right_kind == EdgeKind::Solid)
                return {pos - c.length, c.length, c.target, false};
            return {pos, 0, "", true};
        }
        return {0, 0, "", true};
    };
    std::vector<std::pair<std::string, ExtentStep>> chain;
    std::string cur = pattern;
    Rat val;
    while (true) {
        bool looped = false;
        for (size_t k = 0; k < chain.size(); ++k) {
            if (chain[k].first == cur) {
                Rat a = 0, b = 1;
                for (size_t m = k; m < chain.size(); ++m) {
                    a += b * chain[m].second.offset;
                    b *= chain[m].second.scale;
                }
                val = a / (1 - b);
                chain.resize(k);
                looped = true;
                break;
            }
        }
        if (looped) break;
        ExtentStep s = step(cur);
        if (s.terminal) {
            val = s.offset;
            break;
        }
        chain.push_back({cur, s});
        cur = s.next;
    }
    for (size_t m = chain.size(); m-- > 0;)
        val = chain[m].second.offset + chain[m].second.scale * val;
    rho_[pattern] = val;
    return val;
}

Address Analysis::shallowest(const std::string& pattern) const {
    std::map<std::string, Address> best;
    best[sys_.root()] = Address{};
    auto better = [](const Address& a, const Address& b) {
        if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
        return a < b;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const std::string& name : sys_.names()) {
            auto it = best.find(name);
            if (it == best.end()) continue;
            const auto& cells = sys_.body(name).cells;
            for (int i = 0; i < (int)cells.size(); ++i) {
                if (cells[i].kind != CellKind::Ref) continue;
                Address cand = it->second.child(i);
                auto jt = best.find(cells[i].target);
                if (jt == best.end() || better(cand, jt->second)) {
                    best[cells[i].target] = cand;
                    changed = true;
                }
            }
        }
    }
    return best.at(pattern);
}

AttributeTable Analysis::table() const {
    AttributeTable t;
    for (const std::string& name : sys_.names()) {
        const PatternAttributes& a = attrs_.at(name);
        AttributeRow r;
        r.solid_left = a.solid_left();
        r.solid_right = a.solid_right();
        r.cluster_left = a.cluster_left();
        r.cluster_right = a.cluster_right();
        r.fl_cluster_left = a.fl_cluster_left;
        r.has_gap = a.has_gap;
        r.has_interval = a.has_interval;
        r.perfect = a.perfect;
        t[name] = r;
    }
    return t;
}

AttributeTable attributes(const PatternSystem& sys) { return Analysis(sys).table(); }

}  // namespace cantorval
