#include <cantorval/order.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <cantorval/approx.hpp>
#include <cantorval/classify.hpp>

namespace cantorval {

namespace {

bool addr_before(const Address& a, const Address& b) {
    if (a.depth() != b.depth()) return a.depth() < b.depth();
    return a.path < b.path;
}

void take_min(std::optional<Address>& best, const Address& candidate) {
    if (!best || addr_before(candidate, *best)) best = candidate;
}

struct Extraction {
    std::vector<OrderElement> elements;
    std::vector<bool> more_a;  // size elements+1, one slot per region around them
    std::vector<bool> more_b;
};

// Gap pieces are exact.  A solid piece with an uncertified side continues into
// the neighbouring unresolved copy; lambda/rho give the exact component end,
// so element extents do not depend on the listing depth.
Extraction list_elements(const Analysis& an, int depth) {
    ApproxSet s = expand(an.system(), depth);
    Extraction out;
    bool pend_a = false, pend_b = false;
    auto flush = [&] {
        out.more_a.push_back(pend_a);
        out.more_b.push_back(pend_b);
        pend_a = pend_b = false;
    };
    for (std::size_t i = 0; i < s.pieces.size(); ++i) {
        const Piece& p = s.pieces[i];
        if (p.kind == PieceKind::Gap) {
            flush();
            out.elements.push_back({ElementTag::A, p.addr, p.a, p.b});
        } else if (p.kind == PieceKind::Solid) {
            Rat lo = p.a, hi = p.b;
            if (!p.left_certified) {
                const Piece& u = s.pieces[i - 1];
                lo = u.a + u.width() * an.rho(u.pattern);
            }
            if (!p.right_certified) {
                const Piece& u = s.pieces[i + 1];
                hi = u.a + u.width() * an.lambda(u.pattern);
            }
            flush();
            out.elements.push_back({ElementTag::B, p.addr, lo, hi});
        } else if (p.kind == PieceKind::Unresolved) {
            const PatternAttributes& at = an.attrs(p.pattern);
            pend_a = pend_a || at.has_gap;
            pend_b = pend_b || at.has_interval;
        }
    }
    flush();
    return out;
}

// True when another gap lies rightward of index j with only solid material
// between; such a pair of gaps is adjacent in the gap order.
bool gap_bridge(const PatternSystem& sys, const Analysis& an, const std::string& p, int j,
                std::set<std::pair<std::string, int>>& guard) {
    const auto& cells = sys.body(p).cells;
    for (int k = j; k < (int)cells.size(); ++k) {
        const Cell& c = cells[k];
        if (c.kind == CellKind::Solid || c.kind == CellKind::Point) continue;
        if (c.kind == CellKind::Gap) return true;
        if (an.attrs(c.target).full_span) continue;
        return false;  // the copy's own gaps separate the pair
    }
    for (const auto& [q, idx] : an.uses(p))
        if (guard.insert({q, idx}).second && gap_bridge(sys, an, q, idx + 1, guard)) return true;
    return false;
}

// True when interval material lies rightward of index j with gaps but no
// interval between.  `separated` records whether a gap has been crossed, so a
// touching continuation of the same component is not reported.
bool interval_bridge(const PatternSystem& sys, const Analysis& an, const std::string& p, int j,
                     bool separated, std::set<std::tuple<std::string, int, bool>>& guard) {
    const auto& cells = sys.body(p).cells;
    for (int k = j; k < (int)cells.size(); ++k) {
        const Cell& c = cells[k];
        if (c.kind == CellKind::Point) continue;
        if (c.kind == CellKind::Gap) {
            separated = true;
            continue;
        }
        if (c.kind == CellKind::Solid) return separated;
        const PatternAttributes& at = an.attrs(c.target);
        if (at.full_span || at.solid_left()) return separated;
        separated = true;  // gaps precede any interval inside the copy
        if (at.has_interval) return false;
    }
    for (const auto& [q, idx] : an.uses(p))
        if (guard.insert({q, idx, separated}).second &&
            interval_bridge(sys, an, q, idx + 1, separated, guard))
            return true;
    return false;
}

// Walks the left (or right) spine looking for an extreme gap.  A cycle means
// gaps accumulate at the end without a first (last) one.
std::optional<Address> edge_gap(const PatternSystem& sys, const Analysis& an, bool left) {
    std::set<std::string> seen;
    std::string cur = sys.root();
    Address addr;
    for (;;) {
        if (!seen.insert(cur).second) return std::nullopt;
        const auto& cells = sys.body(cur).cells;
        int n = (int)cells.size();
        bool moved = false;
        for (int t = 0; t < n && !moved; ++t) {
            int i = left ? t : n - 1 - t;
            const Cell& c = cells[i];
            if (c.kind == CellKind::Solid || c.kind == CellKind::Point) continue;
            if (c.kind == CellKind::Gap) return addr.child(i);
            if (an.attrs(c.target).full_span) continue;
            addr = addr.child(i);
            cur = c.target;
            moved = true;
        }
        if (!moved) return std::nullopt;
    }
}

std::optional<Address> adjacent_gap_witness(const PatternSystem& sys, const Analysis& an) {
    std::optional<Address> best;
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Gap) continue;
            std::set<std::pair<std::string, int>> guard;
            if (gap_bridge(sys, an, name, i + 1, guard))
                take_min(best, an.shallowest(name).child(i));
        }
    }
    return best;
}

std::optional<Address> adjacent_interval_witness(const PatternSystem& sys, const Analysis& an) {
    std::optional<Address> best;
    for (const std::string& name : sys.names()) {
        for (const Run& r : an.runs(name)) {
            std::set<std::tuple<std::string, int, bool>> guard;
            if (interval_bridge(sys, an, name, r.last + 1, false, guard))
                take_min(best, an.shallowest(name).child(r.first));
        }
        // components can also end at the right edge of a solid-right copy
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            const Cell& c = cells[i];
            if (c.kind != CellKind::Ref) continue;
            const PatternAttributes& at = an.attrs(c.target);
            if (at.full_span || !at.solid_right()) continue;
            std::set<std::tuple<std::string, int, bool>> guard;
            if (interval_bridge(sys, an, name, i + 1, false, guard))
                take_min(best, an.shallowest(name).child(i));
        }
    }
    return best;
}

struct DenseIssue {
    std::string what;
    Address witness;
};

// Hypotheses for the alternating construction: gaps dense toward both ends,
// and intervals (when present) dense among themselves.
std::optional<DenseIssue> dense_issue(const PatternSystem& sys, const Analysis& an) {
    if (!an.attrs(sys.root()).has_gap) return DenseIssue{"the system has no gaps", Address{}};
    if (auto w = edge_gap(sys, an, true)) return DenseIssue{"a least gap exists", *w};
    if (auto w = edge_gap(sys, an, false)) return DenseIssue{"a greatest gap exists", *w};
    if (auto w = adjacent_gap_witness(sys, an)) return DenseIssue{"adjacent gaps", *w};
    if (an.attrs(sys.root()).has_interval)
        if (auto w = adjacent_interval_witness(sys, an))
            return DenseIssue{"adjacent intervals", *w};
    return std::nullopt;
}

using Extent = std::pair<Rat, Rat>;

// Pull-based element listing in enumeration order: elements arrive in blocks
// of increasing first-appearance depth, position-ordered within a block.
// Extents are exact and depth-independent (addresses of merged components are
// not), so an element keeps its slot forever and refinement only appends.
struct SourceState {
    Analysis an;
    int depth = 0;
    std::vector<OrderElement> elements;  // enumeration order
    std::vector<bool> used;
    std::map<Extent, int> listed;
    std::size_t scan_from = 0;  // everything before this index is used

    explicit SourceState(const PatternSystem& sys) : an(sys) { refine(); }

    void refine() {
        if (depth >= 20 || elements.size() > 200000)
            throw std::runtime_error("back_and_forth: prefix source exhausted");
        ++depth;
        Extraction ex = list_elements(an, depth);
        for (OrderElement& e : ex.elements) {
            if (listed.emplace(Extent{e.lo, e.hi}, (int)elements.size()).second) {
                elements.push_back(std::move(e));
                used.push_back(false);
            }
        }
    }

    void mark_used(std::size_t i) {
        used[i] = true;
        while (scan_from < used.size() && used[scan_from]) ++scan_from;
    }
};

struct Matching {
    std::vector<std::pair<OrderElement, OrderElement>> pairs;  // sorted by first.lo

    void insert(const OrderElement& x, const OrderElement& y) {
        auto it = std::lower_bound(
            pairs.begin(), pairs.end(), x.lo,
            [](const auto& p, const Rat& v) { return p.first.lo < v; });
        pairs.insert(it, {x, y});
    }

    // images of the nearest matched neighbours of [lo,hi]; anchors 0 and 1
    // stand in when there is no neighbour.  An order-preserving matching is
    // sorted on both sides at once, so both lookups can bisect.
    std::pair<Rat, Rat> bounds(const Rat& lo, const Rat& hi, bool x_side) const {
        auto side = [&](const std::pair<OrderElement, OrderElement>& p) -> const OrderElement& {
            return x_side ? p.first : p.second;
        };
        auto img = [&](const std::pair<OrderElement, OrderElement>& p) -> const OrderElement& {
            return x_side ? p.second : p.first;
        };
        Rat blo = 0, bhi = 1;
        auto it = std::partition_point(pairs.begin(), pairs.end(),
                                       [&](const auto& p) { return side(p).lo < hi; });
        if (it != pairs.end()) bhi = img(*it).lo;
        auto jt = std::partition_point(pairs.begin(), it,
                                       [&](const auto& p) { return side(p).hi <= lo; });
        if (jt != pairs.begin()) blo = img(*(jt - 1)).hi;
        return {blo, bhi};
    }
};

// One insertion: lowest-enumeration unmatched element on the active side,
// matched to the lowest-enumeration element between its neighbours' images.
// Both sides refine their prefixes on demand.
std::pair<OrderElement, OrderElement> bf_step(SourceState& a, SourceState& b, Matching& m,
                                              bool a_is_x, bool gaps_only) {
    std::size_t ia = 0;
    for (bool have = false;;) {
        for (ia = a.scan_from; ia < a.elements.size(); ++ia) {
            if (a.used[ia]) continue;
            if (gaps_only && a.elements[ia].tag != ElementTag::A) continue;
            have = true;
            break;
        }
        if (have) break;
        a.refine();
    }
    const OrderElement e = a.elements[ia];  // copy: refining b never moves a, but stay safe
    auto [blo, bhi] = m.bounds(e.lo, e.hi, a_is_x);
    std::size_t ib = 0;
    for (bool found = false;;) {
        for (ib = b.scan_from; ib < b.elements.size(); ++ib) {
            const OrderElement& cand = b.elements[ib];
            if (b.used[ib] || cand.tag != e.tag) continue;
            if (cand.lo < blo || cand.hi > bhi) continue;
            found = true;
            break;
        }
        if (found) break;
        b.refine();
    }
    const OrderElement f = b.elements[ib];
    a.mark_used(ia);
    b.mark_used(ib);
    if (a_is_x) {
        m.insert(e, f);
        return {e, f};
    }
    m.insert(f, e);
    return {f, e};
}

void validate_matching(const Matching& m) {
    for (std::size_t i = 0; i < m.pairs.size(); ++i) {
        if (m.pairs[i].first.tag != m.pairs[i].second.tag)
            throw std::logic_error("back_and_forth: matched elements of different tags");
        if (i == 0) continue;
        const auto& [px, py] = m.pairs[i - 1];
        const auto& [cx, cy] = m.pairs[i];
        if (cx.lo < px.hi || cy.lo < py.hi)
            throw std::logic_error("back_and_forth: matching is not order-preserving");
    }
}

// The interval element starting exactly at `at`; refined into view on demand.
std::size_t successor_interval(SourceState& s, const Rat& at) {
    for (;;) {
        for (std::size_t i = 0; i < s.elements.size(); ++i)
            if (s.elements[i].tag == ElementTag::B && s.elements[i].lo == at) return i;
        s.refine();
    }
}

PartialIso bf_run(const PatternSystem& x, const PatternSystem& y, int steps, bool unchecked,
                  std::vector<PartialIso>* trace) {
    if (steps < 0) throw std::invalid_argument("back_and_forth: steps must be nonnegative");
    SourceState sx(x), sy(y);
    if (!unchecked) {
        if (auto issue = dense_issue(x, sx.an))
            throw std::invalid_argument("back_and_forth: left source fails the dense hypothesis: " +
                                        issue->what + " (witness " + issue->witness.to_string() +
                                        ")");
        if (auto issue = dense_issue(y, sy.an))
            throw std::invalid_argument("back_and_forth: right source fails the dense hypothesis: " +
                                        issue->what + " (witness " + issue->witness.to_string() +
                                        ")");
        if (sx.an.attrs(x.root()).has_interval != sy.an.attrs(y.root()).has_interval)
            throw std::invalid_argument(
                "back_and_forth: interval elements exist on one side only");
    }
    Matching m;
    for (int s = 0; s < steps; ++s) {
        bf_step(sx, sy, m, true, false);
        bf_step(sy, sx, m, false, false);
        if (trace) trace->push_back({m.pairs, s + 1});
    }
    validate_matching(m);
    PartialIso out;
    out.pairs = std::move(m.pairs);
    out.steps = steps;
    return out;
}

PartialIso special_run(const PatternSystem& x, const PatternSystem& y, int steps,
                       std::vector<PartialIso>* trace) {
    if (steps < 0) throw std::invalid_argument("special_iso: steps must be nonnegative");
    auto complain = [](const ConditionsReport& rep, const char* side) {
        const std::pair<const char*, bool> checks[] = {
            {"I", rep.I}, {"II", rep.II}, {"III", rep.III}};
        for (const auto& [name, ok] : checks) {
            if (ok) continue;
            std::string msg = std::string("special_iso: condition ") + name + " fails for the " +
                              side + " system";
            auto it = rep.witnesses.find(name);
            if (it != rep.witnesses.end()) msg += " (witness " + it->second.to_string() + ")";
            throw std::invalid_argument(msg);
        }
    };
    complain(check_conditions(x, 1), "left");
    complain(check_conditions(y, 1), "right");

    SourceState sx(x), sy(y);
    Matching m;
    auto extend = [&](const std::pair<OrderElement, OrderElement>& pair) {
        const auto& [gx, gy] = pair;
        if (gx.hi >= 1 || gy.hi >= 1) return;  // a last gap has no successor
        std::size_t bx = successor_interval(sx, gx.hi);
        std::size_t by = successor_interval(sy, gy.hi);
        if (sx.used[bx] || sy.used[by]) return;
        OrderElement ex = sx.elements[bx], ey = sy.elements[by];
        sx.mark_used(bx);
        sy.mark_used(by);
        m.insert(ex, ey);
    };
    for (int s = 0; s < steps; ++s) {
        extend(bf_step(sx, sy, m, true, true));
        extend(bf_step(sy, sx, m, false, true));
        if (trace) trace->push_back({m.pairs, s + 1});
    }
    validate_matching(m);
    PartialIso out;
    out.pairs = std::move(m.pairs);
    out.steps = steps;
    return out;
}

}  // namespace

Rat PLMap::apply(const Rat& x) const {
    if (breakpoints.empty()) return x;
    if (x <= breakpoints.front().first) return breakpoints.front().second + (x - breakpoints.front().first);
    if (x >= breakpoints.back().first) return breakpoints.back().second + (x - breakpoints.back().first);
    auto it = std::upper_bound(
        breakpoints.begin(), breakpoints.end(), x,
        [](const Rat& v, const std::pair<Rat, Rat>& bp) { return v < bp.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

OrderPrefix gap_interval_order(const PatternSystem& sys, int depth) {
    if (depth < 1) throw std::invalid_argument("gap_interval_order: depth must be at least 1");
    Analysis an(sys);
    Extraction ex = list_elements(an, depth);
    OrderPrefix out(sys);
    out.depth = depth;
    out.elements = std::move(ex.elements);
    out.more_a_between = std::move(ex.more_a);
    out.more_b_between = std::move(ex.more_b);
    return out;
}

ConditionsReport check_conditions(const PatternSystem& sys, int depth) {
    (void)depth;  // conditions are structural, not depth-bound
    Analysis an(sys);
    ConditionsReport rep;
    std::optional<Address> w;

    // (I) each gap's right side opens into an interval wherever the gap occurs
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Gap) continue;
            for (const NatureAt& n : an.nature_right_of(name, i + 1))
                if (n.kind != Nature::Solid && n.kind != Nature::End)
                    take_min(w, an.shallowest(name).child(i));
        }
    }
    rep.I = !w;
    if (w) rep.witnesses["I"] = *w;

    // (II) every component begins at a gap or at the set minimum
    w.reset();
    for (const std::string& name : sys.names()) {
        const auto& rs = an.runs(name);
        for (int r = 0; r < (int)rs.size(); ++r)
            for (const Side& s : an.run_left_sides(name, r))
                if (!s.free()) take_min(w, an.shallowest(name).child(rs[r].first));
    }
    rep.II = !w;
    if (w) rep.witnesses["II"] = *w;

    // (III) gaps densely ordered, with the virtual end anchors as first/last
    w.reset();
    if (!an.attrs(sys.root()).has_gap) {
        w = Address{};
    } else if (auto lg = edge_gap(sys, an, true)) {
        w = *lg;
    } else if (auto gg = edge_gap(sys, an, false)) {
        w = *gg;
    } else if (auto adj = adjacent_gap_witness(sys, an)) {
        w = *adj;
    }
    rep.III = !w;
    if (w) rep.witnesses["III"] = *w;
    return rep;
}

PartialIso back_and_forth(const PatternSystem& x, const PatternSystem& y, int steps,
                          bool unchecked) {
    return bf_run(x, y, steps, unchecked, nullptr);
}

std::vector<PartialIso> back_and_forth_trace(const PatternSystem& x, const PatternSystem& y,
                                             int steps, bool unchecked) {
    std::vector<PartialIso> trace;
    bf_run(x, y, steps, unchecked, &trace);
    return trace;
}

PartialIso special_iso(const PatternSystem& x, const PatternSystem& y, int steps) {
    return special_run(x, y, steps, nullptr);
}

std::vector<PartialIso> special_iso_trace(const PatternSystem& x, const PatternSystem& y,
                                          int steps) {
    std::vector<PartialIso> trace;
    special_run(x, y, steps, &trace);
    return trace;
}

PLMap iso_to_homeo(const PartialIso& iso) {
    if (iso.pairs.empty()) throw std::invalid_argument("iso_to_homeo: empty matching");
    std::map<Rat, Rat> bp;
    auto put = [&bp](const Rat& x, const Rat& y) {
        auto [it, fresh] = bp.emplace(x, y);
        if (!fresh && it->second != y)
            throw std::invalid_argument("iso_to_homeo: conflicting images at x=" + format_rat(x));
    };
    put(Rat(0), Rat(0));
    put(Rat(1), Rat(1));
    for (const auto& [ex, ey] : iso.pairs) {
        put(ex.lo, ey.lo);
        put(ex.hi, ey.hi);
    }
    PLMap out;
    const Rat* prev = nullptr;
    for (const auto& [x, y] : bp) {
        if (prev && !(*prev < y))
            throw std::invalid_argument("iso_to_homeo: matching is not increasing at x=" +
                                        format_rat(x));
        out.breakpoints.push_back({x, y});
        prev = &out.breakpoints.back().second;
    }
    return out;
}

PartialIso homeo_to_iso(const PLMap& map, const OrderPrefix& x, const OrderPrefix& y) {
    for (std::size_t i = 0; i + 1 < map.breakpoints.size(); ++i)
        if (!(map.breakpoints[i].first < map.breakpoints[i + 1].first) ||
            !(map.breakpoints[i].second < map.breakpoints[i + 1].second))
            throw std::invalid_argument("homeo_to_iso: map is not strictly increasing");
    PartialIso out;
    for (const OrderElement& e : x.elements) {
        Rat lo = map.apply(e.lo), hi = map.apply(e.hi);
        const OrderElement* hit = nullptr;
        for (const OrderElement& f : y.elements)
            if (f.tag == e.tag && f.lo == lo && f.hi == hi) {
                hit = &f;
                break;
            }
        if (!hit)
            throw std::runtime_error("homeo_to_iso: image of the element at " +
                                     e.address.to_string() + " straddles the target pieces");
        out.pairs.push_back({e, *hit});
    }
    out.steps = (int)out.pairs.size();
    return out;
}

PLMap to_model_cantorval(const PatternSystem& x, int steps) {
    for (const FreeEndpoint& fe : free_endpoint_report(x))
        if (fe.left_free || fe.right_free)
            throw std::invalid_argument("to_model_cantorval: interval at " +
                                        fe.address.to_string() + " has a free endpoint");
    ClassReport rep = classify(x);
    if (!rep.is_cantorval) {
        std::string msg = "to_model_cantorval: system is not a Cantorval";
        auto it = rep.witnesses.find("is_cantorval");
        if (it != rep.witnesses.end()) msg += " (witness " + it->second.to_string() + ")";
        throw std::invalid_argument(msg);
    }
    PartialIso iso = back_and_forth(x, PatternSystem::builtin("modelC"), steps);
    PLMap out = iso_to_homeo(iso);
    for (const auto& [ex, ey] : iso.pairs)
        if (out.apply(ex.lo) != ey.lo || out.apply(ex.hi) != ey.hi)
            throw std::logic_error("to_model_cantorval: matched element not carried exactly");
    return out;
}

Rat sup_distance(const PLMap& f, const PLMap& g) {
    std::set<Rat> xs;
    for (const auto& bp : f.breakpoints) xs.insert(bp.first);
    for (const auto& bp : g.breakpoints) xs.insert(bp.first);
    Rat best = 0;
    for (const Rat& x : xs) best = rat_max(best, rat_abs(f.apply(x) - g.apply(x)));
    return best;
}

}  // namespace cantorval
