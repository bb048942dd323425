#include <cantorval/km_embed.hpp>

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

#include <cantorval/order.hpp>

namespace cantorval {

namespace {

Rat level_width(int level) { return pow_rat(rat(1, 2), static_cast<unsigned>(level)); }

}  // namespace

MetricView::MetricView(const PatternSystem& sys, int depth) : x_(expand(sys, depth)) {
    auto prefix = gap_interval_order(sys, depth);
    for (const auto& e : prefix.elements)
        if (e.tag == ElementTag::B) comps_.push_back({e.lo, e.hi});
    for (const auto& p : x_.pieces)
        if (p.kind == PieceKind::Point) comps_.push_back({p.a, p.a});
    std::sort(comps_.begin(), comps_.end(),
              [](const Comp& a, const Comp& b) { return a.lo < b.lo; });

    std::set<Rat> gap_lo, gap_hi;
    Rat widest_unresolved = 0;
    for (const auto& p : x_.pieces) {
        if (p.kind == PieceKind::Gap) {
            gap_lo.insert(p.a);
            gap_hi.insert(p.b);
        } else if (p.kind == PieceKind::Unresolved) {
            widest_unresolved = rat_max(widest_unresolved, p.b - p.a);
        }
    }
    for (auto& c : comps_) {
        c.lo_open = c.lo == x_.hull_lo || gap_hi.count(c.lo) > 0;
        c.hi_open = c.hi == x_.hull_hi || gap_lo.count(c.hi) > 0;
    }

    // hidden gaps inside an unresolved piece are narrower than the piece, so
    // atom decompositions stay exact while the threshold covers the widest one
    if (widest_unresolved == 0) {
        max_level_ = 40;
    } else {
        while (level_width(max_level_ + 1) >= widest_unresolved) ++max_level_;
    }
    atom_cache_.resize(static_cast<std::size_t>(max_level_) + 1);
}

const std::vector<MetricView::Atom>& MetricView::atoms(int level) const {
    if (level < 0 || level > max_level_)
        throw std::invalid_argument("metric view: level out of range");
    auto& slot = atom_cache_[static_cast<std::size_t>(level)];
    if (!slot.empty()) return slot;
    Rat t = level_width(level);
    Rat lo = 0, hi = 0;
    bool open = false;
    for (const auto& p : x_.pieces) {
        if (p.kind == PieceKind::Gap) {
            if (open && p.b - p.a > t) {
                slot.push_back({lo, hi});
                open = false;
            }
            continue;
        }
        if (!open) {
            lo = p.a;
            open = true;
        }
        hi = p.b;
    }
    if (open) slot.push_back({lo, hi});
    return slot;
}

const MetricView::Comp& MetricView::comp(int component) const {
    if (component < 0 || component >= static_cast<int>(comps_.size()))
        throw std::invalid_argument("metric view: no such component");
    return comps_[static_cast<std::size_t>(component)];
}

int MetricView::atom_of_span(int level, const Rat& lo, const Rat& hi) const {
    const auto& as = atoms(level);
    auto it = std::upper_bound(as.begin(), as.end(), lo,
                               [](const Rat& v, const Atom& a) { return v < a.lo; });
    if (it == as.begin()) return -1;
    --it;
    if (it->hi < hi) return -1;
    return static_cast<int>(it - as.begin());
}

ClopenSet MetricView::space(int level) const {
    const auto& as = atoms(level);
    ClopenSet s{level, {}};
    for (int i = 0; i < static_cast<int>(as.size()); ++i) s.atoms.insert(i);
    return s;
}

ClopenSet MetricView::refine(const ClopenSet& s, int level) const {
    if (level < s.level) throw std::invalid_argument("metric view: refine to a coarser level");
    if (level == s.level) {
        atoms(level);  // validate
        return s;
    }
    const auto& coarse = atoms(s.level);
    const auto& fine = atoms(level);
    ClopenSet out{level, {}};
    for (int id : s.atoms) {
        if (id < 0 || id >= static_cast<int>(coarse.size()))
            throw std::invalid_argument("metric view: no such atom");
        const Atom& big = coarse[static_cast<std::size_t>(id)];
        auto it = std::lower_bound(fine.begin(), fine.end(), big.lo,
                                   [](const Atom& a, const Rat& v) { return a.lo < v; });
        for (; it != fine.end() && it->hi <= big.hi; ++it)
            out.atoms.insert(static_cast<int>(it - fine.begin()));
    }
    return out;
}

Rat MetricView::diameter(const ClopenSet& s) const {
    if (s.atoms.empty()) throw std::invalid_argument("metric view: diameter of an empty set");
    const auto& as = atoms(s.level);
    const Atom& first = as[static_cast<std::size_t>(*s.atoms.begin())];
    const Atom& last = as[static_cast<std::size_t>(*s.atoms.rbegin())];
    return last.hi - first.lo;
}

Rat MetricView::distance(const ClopenSet& s, const ClopenSet& t) const {
    if (s.atoms.empty() || t.atoms.empty())
        throw std::invalid_argument("metric view: distance from an empty set");
    const auto& as = atoms(s.level);
    const auto& at = atoms(t.level);
    bool have = false;
    Rat best = 0;
    for (int i : s.atoms) {
        const Atom& a = as[static_cast<std::size_t>(i)];
        for (int j : t.atoms) {
            const Atom& b = at[static_cast<std::size_t>(j)];
            Rat d = 0;
            if (a.hi < b.lo)
                d = b.lo - a.hi;
            else if (b.hi < a.lo)
                d = a.lo - b.hi;
            if (!have || d < best) {
                have = true;
                best = d;
            }
            if (best == 0) return best;
        }
    }
    return best;
}

Rat MetricView::max_distance(const ClopenSet& s, int endpoint) const {
    if (s.atoms.empty()) throw std::invalid_argument("metric view: distance from an empty set");
    const Comp& c = comp(endpoint / 2);
    Rat coord = (endpoint % 2) ? c.hi : c.lo;
    const auto& as = atoms(s.level);
    Rat m = as[static_cast<std::size_t>(*s.atoms.begin())].lo;
    Rat M = as[static_cast<std::size_t>(*s.atoms.rbegin())].hi;
    return rat_max(rat_abs(m - coord), rat_abs(M - coord));
}

Rat MetricView::component_length(int component) const {
    const Comp& c = comp(component);
    return c.hi - c.lo;
}

bool MetricView::end_open(int component, int end) const {
    const Comp& c = comp(component);
    return end ? c.hi_open : c.lo_open;
}

Rat MetricView::endpoint_distance(int e1, int e2) const {
    const Comp& a = comp(e1 / 2);
    const Comp& b = comp(e2 / 2);
    Rat x = (e1 % 2) ? a.hi : a.lo;
    Rat y = (e2 % 2) ? b.hi : b.lo;
    return rat_abs(x - y);
}

int MetricView::component_atom(int component, int level) const {
    const Comp& c = comp(component);
    int id = atom_of_span(level, c.lo, c.hi);
    if (id < 0) throw std::logic_error("metric view: component crosses atoms");
    return id;
}

std::vector<int> MetricView::components_in(const ClopenSet& s) const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(comps_.size()); ++c)
        if (s.atoms.count(component_atom(c, s.level))) out.push_back(c);
    return out;
}

bool MetricView::has_unresolved(const ClopenSet& s) const {
    for (const auto& p : x_.pieces) {
        if (p.kind != PieceKind::Unresolved) continue;
        int id = atom_of_span(s.level, p.a, p.b);
        if (id >= 0 && s.atoms.count(id)) return true;
    }
    return false;
}

bool Region::contains(const ClopenSet& v) const {
    if (by_handles_) {
        int lv = std::max(v.level, handles_.level);
        auto a = view_->refine(v, lv);
        auto b = view_->refine(handles_, lv);
        return std::includes(b.atoms.begin(), b.atoms.end(), a.atoms.begin(), a.atoms.end());
    }
    const auto& as = view_->atoms(v.level);
    for (int id : v.atoms) {
        const auto& a = as[static_cast<std::size_t>(id)];
        if (lo_strict_ ? !(a.lo > lo_) : !(a.lo >= lo_)) return false;
        if (hi_strict_ ? !(a.hi < hi_) : !(a.hi <= hi_)) return false;
    }
    return true;
}

bool Region::contains_component(int component) const {
    if (by_handles_)
        return handles_.atoms.count(view_->component_atom(component, handles_.level)) > 0;
    const auto& c = view_->comp(component);
    if (lo_strict_ ? !(c.lo > lo_) : !(c.lo >= lo_)) return false;
    if (hi_strict_ ? !(c.hi < hi_) : !(c.hi <= hi_)) return false;
    return true;
}

Region b_star(const MetricView& view, int component, const Rat& eps) {
    if (eps <= 0) throw std::invalid_argument("b_star: epsilon must be positive");
    const auto& c = view.comp(component);
    Region r;
    r.view_ = &view;
    // open ends are interior, so the star only grows past the clustered ones
    if (c.lo_open) {
        r.lo_ = c.lo;
    } else {
        r.lo_ = c.lo - eps;
        r.lo_strict_ = true;
    }
    if (c.hi_open) {
        r.hi_ = c.hi;
    } else {
        r.hi_ = c.hi + eps;
        r.hi_strict_ = true;
    }
    return r;
}

Region b_star(const MetricView& view, const ClopenSet& y, const Rat& eps) {
    if (eps <= 0) throw std::invalid_argument("b_star: epsilon must be positive");
    Region r;
    r.view_ = &view;
    r.by_handles_ = true;
    r.handles_ = y;
    return r;
}

ClopenSet clopen_separate(const MetricView& view, int component, const ClopenSet& u) {
    int home = view.component_atom(component, u.level);
    if (!u.atoms.count(home))
        throw std::invalid_argument("clopen_separate: the component is outside the set");

    auto whole = view.space(u.level);
    ClopenSet complement{u.level, {}};
    std::set_difference(whole.atoms.begin(), whole.atoms.end(), u.atoms.begin(), u.atoms.end(),
                        std::inserter(complement.atoms, complement.atoms.end()));
    if (complement.atoms.empty())
        return ClopenSet{u.level, {home}};

    ClopenSet tight{view.max_level(), {view.component_atom(component, view.max_level())}};
    Rat gap = view.distance(tight, complement);
    int start = 0;
    while (level_width(start) >= gap) ++start;

    for (int k = start; k <= view.max_level(); ++k) {
        ClopenSet v{k, {view.component_atom(component, k)}};
        if (k >= u.level) return v;  // nested inside the home atom by now
        auto fine = view.refine(v, u.level);
        if (std::includes(u.atoms.begin(), u.atoms.end(), fine.atoms.begin(), fine.atoms.end()))
            return v;
    }
    throw std::logic_error("clopen_separate: no resolution fits");
}

BnVerdict bn_member(const MetricView& view, const ClopenSet& v, int n) {
    if (n < 1) throw std::invalid_argument("bn_member: n must be positive");
    if (v.atoms.empty()) throw std::invalid_argument("bn_member: empty set");
    const auto& as = view.atoms(v.level);
    Rat m = as[static_cast<std::size_t>(*v.atoms.begin())].lo;
    Rat M = as[static_cast<std::size_t>(*v.atoms.rbegin())].hi;
    Rat bound = rat(1, n);

    std::optional<Rat> best;
    std::optional<int> witness;
    for (int c = 0; c < view.component_count(); ++c) {
        if (!v.atoms.count(view.component_atom(c, v.level))) continue;
        const auto& S = view.comps_[static_cast<std::size_t>(c)];
        Rat left = S.lo - m;
        Rat right = M - S.hi;
        // an open end is interior, so content past it can never be starred in
        if (left > 0 && S.lo_open) continue;
        if (right > 0 && S.hi_open) continue;
        Rat need = rat_max(rat_max(left, right), Rat(0));
        if (!best || need < *best) {
            best = need;
            witness = c;
        }
    }
    if (best && *best < bound) return {true, witness, best};
    // small sets with unresolved content hold infinitely many components, and
    // any one of them works as the witness
    if (view.diameter(v) < bound && view.has_unresolved(v)) return {true, std::nullopt, best};
    return {false, std::nullopt, best};
}

Partition refine_partition(const MetricView& view, const ClopenSet& v, int n) {
    if (n < 1) throw std::invalid_argument("refine_partition: n must be positive");
    if (v.atoms.empty()) throw std::invalid_argument("refine_partition: empty set");
    Rat threshold = rat(1, 2 * n);
    Rat bound = rat(1, n);

    std::vector<int> selected;
    for (int c : view.components_in(v))
        if (view.component_length(c) >= threshold) selected.push_back(c);

    Rat eps = threshold;
    for (std::size_t i = 0; i < selected.size(); ++i)
        for (std::size_t j = i + 1; j < selected.size(); ++j) {
            Rat d = rat_min(view.endpoint_distance(2 * selected[i] + 1, 2 * selected[j]),
                            view.endpoint_distance(2 * selected[j] + 1, 2 * selected[i]));
            eps = rat_min(eps, d / 2);
        }

    for (int k = v.level; k <= view.max_level(); ++k) {
        auto cur = view.refine(v, k);
        std::set<int> arc_atoms;
        bool ok = true;
        for (int c : selected) {
            int id = view.component_atom(c, k);
            if (!arc_atoms.insert(id).second) {
                ok = false;  // two large components share an atom
                break;
            }
            if (!b_star(view, c, eps).contains(ClopenSet{k, {id}})) {
                ok = false;
                break;
            }
        }
        if (ok)
            for (int id : cur.atoms) {
                if (arc_atoms.count(id)) continue;
                if (!(view.diameter(ClopenSet{k, {id}}) < bound)) {
                    ok = false;
                    break;
                }
            }
        if (!ok) continue;
        Partition p;
        for (int id : cur.atoms) p.members.push_back(ClopenSet{k, {id}});
        return p;
    }
    throw std::runtime_error("refine_partition: resolution exhausted");
}

std::vector<Partition> partition_tower(const MetricView& view, int levels) {
    if (levels < 1) throw std::invalid_argument("partition_tower: at least one level is required");
    std::vector<Partition> out;
    Partition prev;
    prev.members.push_back(view.space(0));
    for (int n = 1; n <= levels; ++n) {
        Partition cur;
        for (const auto& w : prev.members) {
            try {
                auto part = refine_partition(view, w, n);
                cur.members.insert(cur.members.end(), part.members.begin(), part.members.end());
            } catch (const std::runtime_error&) {
                throw std::runtime_error("partition_tower: resolution exhausted at level " +
                                         std::to_string(n) + "; maximal achievable N is " +
                                         std::to_string(n - 1));
            }
        }
        out.push_back(cur);
        prev = std::move(cur);
    }
    return out;
}

std::optional<Core> find_core(const MetricView& view, const ClopenSet& w) {
    if (w.atoms.empty()) throw std::invalid_argument("find_core: empty set");
    std::optional<Core> found;
    for (int c = 0; c < view.component_count(); ++c) {
        Rat len = view.component_length(c);
        if (len == 0) continue;
        if (!w.atoms.count(view.component_atom(c, w.level))) continue;
        if (!b_star(view, c, len / 2).contains(w)) continue;
        if (found) throw std::logic_error("find_core: the core is not unique");
        found = Core{c, {2 * c, 2 * c + 1}, len};
    }
    return found;
}

namespace {

// members of one tower level in construction order, with parent links
struct TreeLevel {
    std::vector<ClopenSet> members;
    std::vector<int> parent;
};

}  // namespace

std::pair<ComponentOrder, ApproxSet> km_order(const MetricView& view, int levels) {
    auto tower = partition_tower(view, levels);

    auto extent = [&](const ClopenSet& s) {
        const auto& as = view.atoms(s.level);
        return std::pair<Rat, Rat>{as[static_cast<std::size_t>(*s.atoms.begin())].lo,
                                   as[static_cast<std::size_t>(*s.atoms.rbegin())].hi};
    };

    // order the children of one member: sides of the core first and last, the
    // core's own child in the middle, handle order inside each block
    auto order_children = [&](const ClopenSet& parent, std::vector<int>& childs,
                              const std::vector<ClopenSet>& pool, int n) {
        auto by_extent = [&](int a, int b) {
            return extent(pool[static_cast<std::size_t>(a)]).first <
                   extent(pool[static_cast<std::size_t>(b)]).first;
        };
        auto core = find_core(view, parent);
        if (!core) {
            std::sort(childs.begin(), childs.end(), by_extent);
            return;
        }
        Rat bound = rat(1, n);
        std::vector<int> a_side, b_side, middle;
        for (int idx : childs) {
            const auto& child = pool[static_cast<std::size_t>(idx)];
            if (child.atoms.count(view.component_atom(core->component, child.level))) {
                middle.push_back(idx);
                continue;
            }
            if (view.max_distance(child, core->endpoints.first) < bound)
                a_side.push_back(idx);
            else if (view.max_distance(child, core->endpoints.second) < bound)
                b_side.push_back(idx);
            else
                throw std::logic_error("km_order: a child escapes the core neighborhood");
        }
        if (middle.size() != 1) throw std::logic_error("km_order: the core lost its child");
        std::sort(a_side.begin(), a_side.end(), by_extent);
        std::sort(b_side.begin(), b_side.end(), by_extent);
        childs.clear();
        childs.insert(childs.end(), a_side.begin(), a_side.end());
        childs.push_back(middle.front());
        childs.insert(childs.end(), b_side.begin(), b_side.end());
    };

    // resolve parent links by extent containment, then order level by level
    std::vector<TreeLevel> tree(static_cast<std::size_t>(levels));
    for (int n = 1; n <= levels; ++n) {
        auto& lvl = tree[static_cast<std::size_t>(n - 1)];
        lvl.members = tower[static_cast<std::size_t>(n - 1)].members;
        lvl.parent.assign(lvl.members.size(), -1);
        if (n == 1) continue;
        const auto& up = tree[static_cast<std::size_t>(n - 2)].members;
        for (std::size_t j = 0; j < lvl.members.size(); ++j) {
            auto me = extent(lvl.members[j]);
            for (std::size_t i = 0; i < up.size(); ++i) {
                auto pa = extent(up[i]);
                if (pa.first <= me.first && me.second <= pa.second) {
                    lvl.parent[j] = static_cast<int>(i);
                    break;
                }
            }
            if (lvl.parent[j] < 0) throw std::logic_error("km_order: a member has no parent");
        }
    }

    std::vector<int> order;  // member indices of the current level, ordered
    {
        order.resize(tree[0].members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        order_children(view.space(0), order, tree[0].members, 1);
    }
    for (int n = 2; n <= levels; ++n) {
        const auto& lvl = tree[static_cast<std::size_t>(n - 1)];
        std::vector<std::vector<int>> kids(tree[static_cast<std::size_t>(n - 2)].members.size());
        for (std::size_t j = 0; j < lvl.members.size(); ++j)
            kids[static_cast<std::size_t>(lvl.parent[j])].push_back(static_cast<int>(j));
        std::vector<int> next;
        for (int pi : order) {
            auto& group = kids[static_cast<std::size_t>(pi)];
            order_children(tree[static_cast<std::size_t>(n - 2)].members[static_cast<std::size_t>(pi)],
                           group, lvl.members, n);
            next.insert(next.end(), group.begin(), group.end());
        }
        order = std::move(next);
    }

    const auto& leaves = tree[static_cast<std::size_t>(levels - 1)].members;
    ComponentOrder comp_order;
    for (int li : order)
        for (int c : view.components_in(leaves[static_cast<std::size_t>(li)]))
            comp_order.components.push_back(c);
    comp_order.reversed.assign(comp_order.components.size(), false);

    // build the leaf layout at exact scale, then rescale the assembly to [0, 1]
    std::vector<Piece> pieces;
    Rat off = 0;
    auto emit_leaf = [&](const ClopenSet& leaf) {
        const auto& as = view.atoms(leaf.level);
        bool first_atom = true;
        for (int id : leaf.atoms) {
            if (!first_atom) {
                pieces.push_back({PieceKind::Gap, off, off + 1, "", Address{}, true, true});
                off += 1;
            }
            first_atom = false;
            const auto& atom = as[static_cast<std::size_t>(id)];
            struct Event {
                Rat lo, hi;
                PieceKind kind;
            };
            std::vector<Event> events;
            for (int c : view.components_in(ClopenSet{leaf.level, {id}})) {
                const auto& s = view.comps_[static_cast<std::size_t>(c)];
                events.push_back({s.lo, s.hi, s.lo == s.hi ? PieceKind::Point : PieceKind::Solid});
            }
            for (const auto& p : view.x_.pieces)
                if (p.kind == PieceKind::Gap && p.a >= atom.lo && p.b <= atom.hi)
                    events.push_back({p.a, p.b, PieceKind::Gap});
            std::sort(events.begin(), events.end(),
                      [](const Event& a, const Event& b) { return a.lo < b.lo; });
            Rat cursor = atom.lo;
            Rat base = off - atom.lo;
            for (const auto& e : events) {
                if (e.lo > cursor)
                    pieces.push_back(
                        {PieceKind::Unresolved, base + cursor, base + e.lo, "", Address{}, false,
                         false});
                pieces.push_back({e.kind, base + e.lo, base + e.hi, "", Address{},
                                  e.kind != PieceKind::Unresolved, e.kind != PieceKind::Unresolved});
                cursor = e.hi;
            }
            if (cursor < atom.hi)
                pieces.push_back({PieceKind::Unresolved, base + cursor, base + atom.hi, "",
                                  Address{}, false, false});
            off = base + atom.hi;
        }
    };
    bool first_leaf = true;
    for (int li : order) {
        if (!first_leaf) {
            pieces.push_back({PieceKind::Gap, off, off + 1, "", Address{}, true, true});
            off += 1;
        }
        first_leaf = false;
        emit_leaf(leaves[static_cast<std::size_t>(li)]);
    }

    ApproxSet realized;
    realized.depth = levels;
    realized.hull_lo = 0;
    realized.hull_hi = 1;
    for (auto& p : pieces) {
        p.a = p.a / off;
        p.b = p.b / off;
    }
    realized.pieces = std::move(pieces);
    return {comp_order, realized};
}

}  // namespace cantorval
