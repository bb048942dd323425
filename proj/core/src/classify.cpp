#include <cantorval/classify.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

#include <cantorval/approx.hpp>

namespace cantorval {

namespace {

std::set<std::string> reachable(const PatternSystem& sys, const std::string& from) {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
        std::string cur = todo.back();
        todo.pop_back();
        if (!seen.insert(cur).second) continue;
        for (const Cell& c : sys.body(cur).cells)
            if (c.kind == CellKind::Ref) todo.push_back(c.target);
    }
    return seen;
}

bool on_cycle(const PatternSystem& sys, const std::string& p) {
    std::set<std::string> seen;
    std::vector<std::string> todo;
    for (const Cell& c : sys.body(p).cells)
        if (c.kind == CellKind::Ref) todo.push_back(c.target);
    while (!todo.empty()) {
        std::string cur = todo.back();
        todo.pop_back();
        if (cur == p) return true;
        if (!seen.insert(cur).second) continue;
        for (const Cell& c : sys.body(cur).cells)
            if (c.kind == CellKind::Ref) todo.push_back(c.target);
    }
    return false;
}

bool all_free(const std::set<Side>& sides) {
    return std::all_of(sides.begin(), sides.end(), [](const Side& s) { return s.free(); });
}

bool addr_before(const Address& a, const Address& b) {
    if (a.depth() != b.depth()) return a.depth() < b.depth();
    return a.path < b.path;
}

void take_min(std::optional<Address>& best, const Address& candidate) {
    if (!best || addr_before(candidate, *best)) best = candidate;
}

std::optional<Address> first_interval_address(const Analysis& an) {
    const PatternSystem& sys = an.system();
    std::optional<Address> best;
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            bool makes = cells[i].kind == CellKind::Solid ||
                         (cells[i].kind == CellKind::Ref && an.attrs(cells[i].target).full_span);
            if (makes) take_min(best, an.shallowest(name).child(i));
        }
    }
    return best;
}

std::optional<Address> first_gap_address(const Analysis& an, const std::set<std::string>* among) {
    const PatternSystem& sys = an.system();
    std::optional<Address> best;
    for (const std::string& name : sys.names()) {
        if (among && !among->count(name)) continue;
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i)
            if (cells[i].kind == CellKind::Gap) take_min(best, an.shallowest(name).child(i));
    }
    return best;
}

std::optional<Address> imperfection_witness(const Analysis& an) {
    const PatternSystem& sys = an.system();
    auto open = [](const std::set<NatureAt>& s) {
        for (const NatureAt& n : s)
            if (n.kind == Nature::Gap || n.kind == Nature::End) return true;
        return false;
    };
    std::optional<Address> best;
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Point) continue;
            if (open(an.nature_left_of(name, i)) && open(an.nature_right_of(name, i + 1)))
                take_min(best, an.shallowest(name).child(i));
        }
    }
    return best;
}

struct LVerdict {
    bool ok = true;
    Address witness;
};

// every gap must have solid structure on its right and an interval-bearing
// cluster on its left; the set minimum must start an interval
LVerdict l_check(const Analysis& an) {
    const PatternSystem& sys = an.system();
    std::optional<Address> worst;
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Gap) continue;
            bool ok = true;
            for (const NatureAt& n : an.nature_right_of(name, i + 1))
                ok = ok && n.kind == Nature::Solid;
            for (const NatureAt& n : an.nature_left_of(name, i))
                ok = ok && n.kind == Nature::Cluster &&
                     an.right_content(n.cluster_of).has_interval;
            if (!ok) take_min(worst, an.shallowest(name).child(i));
        }
    }
    if (worst) return {false, *worst};
    if (!an.attrs(sys.root()).solid_left()) return {false, Address{}};
    return {true, {}};
}

// map an address in the mirrored system back to the original
Address unmirror_address(const PatternSystem& original, const Address& mirrored) {
    Address out;
    std::string p = original.root();
    for (int c : mirrored.path) {
        int n = (int)original.body(p).cells.size();
        int oc = n - 1 - c;
        out.path.push_back(oc);
        const Cell& cell = original.body(p).cells[oc];
        if (cell.kind != CellKind::Ref) break;
        p = cell.target;
    }
    return out;
}

}  // namespace

ClassReport classify(const PatternSystem& sys) {
    Analysis an(sys);
    const std::string& root = sys.root();
    const PatternAttributes& ra = an.attrs(root);
    ClassReport rep;

    rep.is_cantor_set = ra.perfect && !ra.has_interval;
    if (!rep.is_cantor_set) {
        std::optional<Address> w =
            ra.has_interval ? first_interval_address(an) : imperfection_witness(an);
        rep.witnesses["is_cantor_set"] = w.value_or(Address{});
    }

    {
        std::optional<Address> bad;
        if (!ra.has_interval) {
            bad = first_gap_address(an, nullptr);
        } else if (!ra.perfect) {
            bad = imperfection_witness(an);
        } else {
            for (const std::string& name : sys.names()) {
                // a self-similar region with gaps but no intervals is dust:
                // its points are not limits of interior points
                if (on_cycle(sys, name) && an.attrs(name).has_gap &&
                    !an.attrs(name).has_interval) {
                    std::set<std::string> region = reachable(sys, name);
                    if (auto g = first_gap_address(an, &region)) take_min(bad, *g);
                }
                const auto& runs = an.runs(name);
                for (int r = 0; r < (int)runs.size(); ++r) {
                    auto clustered_trivial = [](const std::set<Side>& sides) {
                        for (const Side& s : sides)
                            if (s.free() || !s.content.has_trivial) return false;
                        return true;
                    };
                    if (!clustered_trivial(an.run_left_sides(name, r)) ||
                        !clustered_trivial(an.run_right_sides(name, r)))
                        take_min(bad, an.shallowest(name).child(runs[r].first));
                }
            }
        }
        rep.is_cantorval = !bad.has_value();
        if (bad) rep.witnesses["is_cantorval"] = *bad;
    }

    LVerdict l = l_check(an);
    rep.is_l_cantorval = l.ok;
    if (!l.ok) rep.witnesses["is_l_cantorval"] = l.witness;

    PatternSystem mirrored = sys.mirrored();
    Analysis man(mirrored);
    LVerdict r = l_check(man);
    rep.is_r_cantorval = r.ok;
    if (!r.ok) rep.witnesses["is_r_cantorval"] = unmirror_address(sys, r.witness);

    {
        std::optional<Address> bad;
        if (!l.ok) {
            bad = l.witness;
        } else {
            for (const std::string& name : sys.names()) {
                const auto& runs = an.runs(name);
                for (int rr = 0; rr < (int)runs.size(); ++rr)
                    if (!all_free(an.run_left_sides(name, rr)))
                        take_min(bad, an.shallowest(name).child(runs[rr].first));
            }
        }
        rep.is_special_l = !bad.has_value();
        if (bad) rep.witnesses["is_special_l"] = *bad;
    }

    {
        std::optional<Address> bad;
        for (const std::string& name : sys.names()) {
            const auto& runs = an.runs(name);
            for (int rr = 0; rr < (int)runs.size(); ++rr) {
                bool clustered_left = !all_free(an.run_left_sides(name, rr));
                auto rights = an.run_right_sides(name, rr);
                bool free_right = std::any_of(rights.begin(), rights.end(),
                                              [](const Side& s) { return s.free(); });
                if (clustered_left && free_right)
                    take_min(bad, an.shallowest(name).child(runs[rr].first));
            }
        }
        rep.is_left_oriented = !bad.has_value();
        if (bad) rep.witnesses["is_left_oriented"] = *bad;
    }

    return rep;
}

std::vector<FreeEndpoint> free_endpoint_report(const PatternSystem& sys) {
    Analysis an(sys);
    std::vector<FreeEndpoint> out;
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        const auto& runs = an.runs(name);
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Solid) continue;
            int ri = -1;
            for (int k = 0; k < (int)runs.size(); ++k)
                if (runs[k].first <= i && i <= runs[k].last) ri = k;
            FreeEndpoint fe;
            fe.pattern = name;
            fe.cell_index = i;
            fe.address = an.shallowest(name).child(i);
            fe.left_free = all_free(an.run_left_sides(name, ri));
            fe.right_free = all_free(an.run_right_sides(name, ri));
            out.push_back(fe);
        }
    }
    return out;
}

std::vector<GapInfo> inappropriate_gaps(const PatternSystem& sys, int depth) {
    if (depth < 1) throw std::invalid_argument("depth must be at least 1");
    Analysis an(sys);
    ApproxSet s = expand(sys, depth);
    std::vector<GapInfo> out;
    for (const Piece& p : s.pieces) {
        if (p.kind != PieceKind::Gap) continue;
        GapInfo g;
        g.address = p.addr;
        g.lo = p.a;
        g.hi = p.b;

        std::vector<std::pair<std::string, int>> chain;
        std::string cur = sys.root();
        for (int c : p.addr.path) {
            chain.push_back({cur, c});
            const Cell& cell = sys.body(cur).cells[c];
            if (cell.kind == CellKind::Ref) cur = cell.target;
        }

        // concrete adjacency for this instance, resolving body ends upward
        auto probe = [&](bool rightward) -> std::pair<GapAdjacency, std::string> {
            bool skipped_point = false;
            for (int level = (int)chain.size() - 1; level >= 0; --level) {
                const auto& [pat, idx] = chain[level];
                const auto& cells = sys.body(pat).cells;
                for (int j = rightward ? idx + 1 : idx - 1; j >= 0 && j < (int)cells.size();
                     j += rightward ? 1 : -1) {
                    const Cell& c = cells[j];
                    if (c.kind == CellKind::Point) {
                        skipped_point = true;
                        continue;
                    }
                    if (c.kind == CellKind::Solid) return {GapAdjacency::Interval, ""};
                    if (c.kind == CellKind::Gap) return {GapAdjacency::Point, ""};
                    const PatternAttributes& ta = an.attrs(c.target);
                    if (ta.full_span) return {GapAdjacency::Interval, ""};
                    switch (rightward ? ta.left_kind : ta.right_kind) {
                        case EdgeKind::Solid: return {GapAdjacency::Interval, ""};
                        case EdgeKind::Isolated: return {GapAdjacency::Point, ""};
                        case EdgeKind::Cluster: return {GapAdjacency::Cluster, c.target};
                    }
                }
            }
            (void)skipped_point;
            return {GapAdjacency::Point, ""};  // nothing but the ambient side
        };
        auto [rk, rt] = probe(true);
        auto [lk, lt] = probe(false);
        (void)lt;
        g.right_adjacency = rk;
        g.left_adjacency = lk;
        g.inappropriate = rk == GapAdjacency::Cluster && an.attrs(rt).fl_cluster_left;
        out.push_back(g);
    }
    std::stable_sort(out.begin(), out.end(), [](const GapInfo& a, const GapInfo& b) {
        return a.address.depth() < b.address.depth();
    });
    return out;
}

const char* to_string(GapAdjacency a) {
    switch (a) {
        case GapAdjacency::Interval: return "interval";
        case GapAdjacency::Cluster: return "cluster";
        case GapAdjacency::Point: return "point";
    }
    return "point";
}

}  // namespace cantorval
