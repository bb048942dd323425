#include "cantorval/ordinal.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "cantorval/order.hpp"

namespace cantorval {

namespace {

Rat half_pow(int k) { return pow_rat(rat(1, 2), static_cast<unsigned>(k)); }

}  // namespace

CNF CNF::from_int(int n) {
    if (n < 0) throw std::invalid_argument("ordinal: negative value");
    CNF out;
    if (n > 0) out.terms.push_back({0, n});
    return out;
}

CNF CNF::predecessor() const {
    if (!successor()) throw std::invalid_argument("ordinal: predecessor of a non-successor");
    CNF out = *this;
    if (out.terms.back().second > 1)
        --out.terms.back().second;
    else
        out.terms.pop_back();
    return out;
}

CNF CNF::plus(const CNF& tail) const {
    CNF out = *this;
    for (auto [e, c] : tail.terms) {
        if (!out.terms.empty() && out.terms.back().first == e)
            out.terms.back().second += c;
        else {
            if (!out.terms.empty() && out.terms.back().first < e)
                throw std::invalid_argument("ordinal: sum would break normal form");
            out.terms.push_back({e, c});
        }
    }
    return out;
}

CNF parse_ordinal(const std::string& text) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("parse_ordinal: " + why + " in '" + text + "'");
    };
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == '+') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch)))
            cur += ch;
    }
    parts.push_back(cur);

    auto number = [&](const std::string& s, std::size_t& i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            fail("expected a number");
        long v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            v = v * 10 + (s[i] - '0');
            if (v > 1000000) fail("coefficient too large");
            ++i;
        }
        return static_cast<int>(v);
    };

    CNF out;
    if (parts.size() == 1 && parts[0] == "0") return out;
    for (const std::string& part : parts) {
        if (part.empty()) fail("empty term");
        int e = 0, c = 0;
        std::size_t i = 0;
        if (part[0] == 'w') {
            i = 1;
            e = 1;
            if (i < part.size() && part[i] == '^') {
                ++i;
                e = number(part, i);
            }
            c = 1;
            if (i < part.size() && part[i] == '*') {
                ++i;
                c = number(part, i);
            }
        } else {
            c = number(part, i);
        }
        if (i != part.size()) fail("unexpected characters");
        if (c < 1) fail("coefficient must be positive");
        if (!out.terms.empty() && out.terms.back().first <= e)
            fail("exponents must be strictly descending");
        out.terms.push_back({e, c});
    }
    return out;
}

std::string format_ordinal(const CNF& a) {
    if (a.terms.empty()) return "0";
    std::string out;
    for (auto [e, c] : a.terms) {
        if (!out.empty()) out += "+";
        if (e == 0) {
            out += std::to_string(c);
            continue;
        }
        out += "w";
        if (e != 1) out += "^" + std::to_string(e);
        if (c != 1) out += "*" + std::to_string(c);
    }
    return out;
}

namespace {

CNF plus_pow(const CNF& base, int exp, int k) {
    if (k == 0) return base;
    CNF t;
    t.terms.push_back({exp, k});
    return base.plus(t);
}

// run of top-level blocks, one entry per block; the trailing +1 of a
// limit-plus-one ordinal is absorbed as the sup of the final block
struct TopRun {
    std::vector<int> exponents;
    bool absorbed = false;
    CNF sup;  // the absorbed point, = alpha - 1
};

TopRun top_run(const CNF& alpha) {
    TopRun run;
    std::vector<std::pair<int, int>> terms = alpha.terms;
    if (terms.size() >= 2 && terms.back() == std::pair<int, int>{0, 1}) {
        run.absorbed = true;
        run.sup = alpha.predecessor();
        terms.pop_back();
    }
    for (auto [e, c] : terms)
        for (int i = 0; i < c; ++i) run.exponents.push_back(e);
    return run;
}

void check_range(const CNF& alpha, int max_exponent) {
    if (alpha.leading_exponent() > max_exponent)
        throw std::domain_error("ordinal_embed: the ordinal exceeds the supported w^" +
                                std::to_string(max_exponent) + " range");
}

// ladder of w^(e-1) blocks on [u,v), accumulating at v
void emit_block(int e, const Rat& u, const Rat& v, int depth, int cost_in, const CNF& base,
                std::vector<LayoutPoint>& out) {
    for (int j = 0; j < depth; ++j) {
        Rat lo = v - (v - u) * half_pow(j);
        Rat hi = v - (v - u) * half_pow(j + 1);
        int cost = std::max(cost_in, j + 1);
        CNF b = plus_pow(base, e - 1, j);
        if (e == 1)
            out.push_back({b, lo, b.limit(), cost});
        else
            emit_block(e - 1, lo, hi, depth, cost, b, out);
    }
}

// ordinal subtraction for beta >= base where base is a term prefix of beta
CNF minus_prefix(const CNF& beta, const CNF& base) {
    CNF out = beta;
    for (auto [e, c] : base.terms) {
        if (out.terms.empty() || out.terms.front().first != e || out.terms.front().second < c)
            throw std::logic_error("ordinal: prefix subtraction misaligned");
        if (out.terms.front().second > c) {
            out.terms.front().second -= c;
            break;
        }
        out.terms.erase(out.terms.begin());
    }
    return out;
}

Rat block_pos(int e, const CNF& delta, const Rat& u, const Rat& v) {
    int j = 0;
    CNF rem = delta;
    if (!rem.terms.empty() && rem.terms.front().first == e - 1) {
        j = rem.terms.front().second;
        rem.terms.erase(rem.terms.begin());
    }
    Rat lo = v - (v - u) * half_pow(j);
    Rat hi = v - (v - u) * half_pow(j + 1);
    if (e == 1) return lo;
    return block_pos(e - 1, rem, lo, hi);
}

}  // namespace

OrdinalLayout ordinal_embed(const CNF& alpha, int depth, int max_exponent) {
    if (depth < 1) throw std::invalid_argument("ordinal_embed: depth must be positive");
    check_range(alpha, max_exponent);
    OrdinalLayout out;
    out.alpha = alpha;
    out.depth = depth;
    TopRun run = top_run(alpha);
    int n = static_cast<int>(run.exponents.size());
    CNF base;
    for (int j = 0; j < n; ++j) {
        Rat lo = 1 - half_pow(j);
        Rat hi = (j == n - 1) ? Rat(1) : 1 - half_pow(j + 1);
        int e = run.exponents[static_cast<std::size_t>(j)];
        if (e == 0) {
            out.points.push_back({base, lo, base.limit(), 1});
            base = plus_pow(base, 0, 1);
        } else {
            emit_block(e, lo, hi, depth, 1, base, out.points);
            base = plus_pow(base, e, 1);
        }
    }
    if (run.absorbed) out.points.push_back({run.sup, Rat(1), true, 1});
    std::sort(out.points.begin(), out.points.end(),
              [](const LayoutPoint& a, const LayoutPoint& b) { return a.pos < b.pos; });
    return out;
}

Rat layout_position(const CNF& alpha, const CNF& beta, int max_exponent) {
    if (!(beta < alpha)) throw std::invalid_argument("layout_position: the point is out of range");
    check_range(alpha, max_exponent);
    TopRun run = top_run(alpha);
    if (run.absorbed && beta == run.sup) return Rat(1);
    int n = static_cast<int>(run.exponents.size());
    CNF base;
    for (int j = 0; j < n; ++j) {
        Rat lo = 1 - half_pow(j);
        Rat hi = (j == n - 1) ? Rat(1) : 1 - half_pow(j + 1);
        int e = run.exponents[static_cast<std::size_t>(j)];
        CNF next = plus_pow(base, e, 1);
        if (beta < next) {
            if (e == 0) return lo;
            return block_pos(e, minus_prefix(beta, base), lo, hi);
        }
        base = next;
    }
    throw std::logic_error("layout_position: walk exhausted the run");
}

namespace {

// generation-time meaning of each cell, keyed by (pattern, cell index)
struct CellRole {
    enum Kind { Lead, Feature, Brick, LadderFeature, LadderDescend, LadderStep } kind = Brick;
    CNF ord;          // Feature: the base point
    bool in_a = false;
    int step_exp = 0;  // LadderStep: adds w^step_exp
};

struct Generator {
    const SubsetDesc& desc;
    std::vector<Cell> root;
    std::vector<Rat> root_start;  // running offsets in assembly units
    Rat offset = 0;
    std::map<std::pair<std::string, int>, CellRole> roles;
    std::set<int> used_hair_ladders, used_point_ladders;
    std::set<CNF> chosen;

    explicit Generator(const SubsetDesc& d) : desc(d) {
        for (const CNF& p : d.points) chosen.insert(p);
    }

    void push(Cell c, CellRole role) {
        roles[{"R", static_cast<int>(root.size())}] = role;
        root_start.push_back(offset);
        offset += c.length;
        root.push_back(std::move(c));
    }

    bool member(const CNF& p) const { return desc.all || chosen.count(p) != 0; }

    bool any_chosen_at_least(const CNF& p) const {
        if (desc.all) return true;
        auto it = chosen.lower_bound(p);
        return it != chosen.end();
    }

    bool any_chosen_in(const CNF& lo, const CNF& hi) const {
        if (desc.all) return true;
        auto it = chosen.lower_bound(lo);
        return it != chosen.end() && *it < hi;
    }

    void feature(const CNF& ord, const Rat& window) {
        if (member(ord)) {
            push(Cell::solid(window / 4), {CellRole::Feature, ord, true, 0});
            push(Cell::ref("W", window * rat(3, 4)), {CellRole::Brick, {}, false, 0});
        } else {
            push(Cell::point(), {CellRole::Feature, ord, false, 0});
            push(Cell::ref("W", window), {CellRole::Brick, {}, false, 0});
        }
    }

    void element(int e, const Rat& window, const CNF& base) {
        if (e == 0) {
            feature(base, window);
            return;
        }
        CNF end = plus_pow(base, e, 1);
        if (desc.all) {
            for (int k = 1; k <= e; ++k) used_hair_ladders.insert(k);
            push(Cell::ref("Z" + std::to_string(e), window), {CellRole::Brick, base, true, e});
            return;
        }
        if (!any_chosen_in(base, end)) {
            for (int k = 1; k <= e; ++k) used_point_ladders.insert(k);
            push(Cell::ref("P" + std::to_string(e), window), {CellRole::Brick, base, false, e});
            return;
        }
        // unroll the ladder until the chosen points are behind us
        for (int j = 0;; ++j) {
            CNF wlo = plus_pow(base, e - 1, j);
            if (!any_chosen_in(wlo, end)) {
                for (int k = 1; k <= e; ++k) used_point_ladders.insert(k);
                push(Cell::ref("P" + std::to_string(e), window * half_pow(j)),
                     {CellRole::Brick, wlo, false, e});
                return;
            }
            element(e - 1, window * half_pow(j + 1), wlo);
        }
    }

    // roles for zone refs need the base ordinal; reuse Brick kind with ord+exp
    // staged in (ord, step_exp); the interpreter treats refs to Z*/P* specially.
};

PatternBody ladder_hair_body(int e) {
    PatternBody b;
    if (e == 1) {
        b.cells = {Cell::solid(rat(1, 8)), Cell::ref("W", rat(3, 8)), Cell::ref("Z1", rat(1, 2))};
    } else {
        b.cells = {Cell::ref("Z" + std::to_string(e - 1), rat(1, 2)),
                   Cell::ref("Z" + std::to_string(e), rat(1, 2))};
    }
    return b;
}

PatternBody ladder_point_body(int e) {
    PatternBody b;
    if (e == 1) {
        b.cells = {Cell::point(), Cell::ref("W", rat(1, 2)), Cell::ref("P1", rat(1, 2))};
    } else {
        b.cells = {Cell::ref("P" + std::to_string(e - 1), rat(1, 2)),
                   Cell::ref("P" + std::to_string(e), rat(1, 2))};
    }
    return b;
}

struct ResolvedFeature {
    bool is_base = false;
    CNF ord;
    bool in_a = false;
};

// walk an expansion address back to the generated cell it realizes
ResolvedFeature resolve_feature(const PatternSystem& sys,
                                const std::map<std::pair<std::string, int>, CellRole>& roles,
                                const Address& addr) {
    std::string pattern = sys.root();
    CNF ord;
    for (std::size_t step = 0; step < addr.path.size(); ++step) {
        int idx = addr.path[step];
        const Cell& cell = sys.body(pattern).cells[static_cast<std::size_t>(idx)];
        if (pattern == "W") return {};  // brick internals
        if (pattern == sys.root()) {
            const CellRole& role = roles.at({"R", idx});
            if (role.kind == CellRole::Feature) return {true, role.ord, role.in_a};
            if (role.kind == CellRole::Lead) return {};
            // brick or zone ref
            if (cell.kind == CellKind::Ref && cell.target != "W") {
                ord = role.ord;
                pattern = cell.target;
                continue;
            }
            if (cell.target == "W") {
                pattern = "W";
                continue;
            }
            return {};
        }
        // inside a generated ladder
        bool hair = pattern[0] == 'Z';
        int e = pattern[1] - '0';
        if (cell.kind == CellKind::Solid || cell.kind == CellKind::Point)
            return {true, ord, hair};
        if (cell.kind == CellKind::Ref && cell.target == pattern) {
            ord = plus_pow(ord, e - 1, 1);
            continue;
        }
        if (cell.kind == CellKind::Ref && cell.target == "W") {
            pattern = "W";
            continue;
        }
        if (cell.kind == CellKind::Ref) {
            pattern = cell.target;
            continue;
        }
        return {};
    }
    return {};
}

}  // namespace

BuiltSet build_from_ordinal_subset(const SubsetDesc& desc, int depth) {
    if (!desc.alpha.successor())
        throw std::invalid_argument(
            "build_from_ordinal_subset: the ordinal must be a successor so the base is compact");
    if (desc.alpha.leading_exponent() > 3)
        throw std::domain_error("build_from_ordinal_subset: the ordinal exceeds the w^3 range");
    if (depth < 2)
        throw std::invalid_argument(
            "build_from_ordinal_subset: depth 2 is needed to separate the brick clusters");
    if (!desc.all)
        for (const CNF& p : desc.points)
            if (!(p < desc.alpha))
                throw std::invalid_argument(
                    "build_from_ordinal_subset: a chosen point lies outside the ordinal");

    Generator gen(desc);
    gen.push(Cell::solid(Rat(1)), {CellRole::Lead, {}, false, 0});
    gen.push(Cell::ref("W", Rat(1)), {CellRole::Brick, {}, false, 0});

    TopRun run = top_run(desc.alpha);
    int n = static_cast<int>(run.exponents.size());
    Rat zone = 8;
    CNF base;
    Rat last_window;
    for (int j = 0; j < n; ++j) {
        Rat lo = zone * (1 - half_pow(j));
        Rat hi = (j == n - 1) ? zone : zone * (1 - half_pow(j + 1));
        last_window = hi - lo;
        int e = run.exponents[static_cast<std::size_t>(j)];
        gen.element(e, hi - lo, base);
        base = plus_pow(base, e, 1);
    }
    if (run.absorbed) {
        if (gen.member(run.sup))
            gen.push(Cell::solid(last_window / 8), {CellRole::Feature, run.sup, true, 0});
        else
            gen.push(Cell::point(), {CellRole::Feature, run.sup, false, 0});
    }
    if (!gen.root.empty() && gen.root.back().kind == CellKind::Ref &&
        gen.root.back().target == "W") {
        gen.offset += 1;
        gen.root.back().length += 1;
    } else
        gen.push(Cell::ref("W", Rat(1)), {CellRole::Brick, {}, false, 0});

    Rat total = gen.offset;
    for (Cell& c : gen.root)
        if (c.kind != CellKind::Point) c.length /= total;

    std::vector<std::pair<std::string, PatternBody>> defs;
    defs.push_back({"R", PatternBody{gen.root}});
    defs.push_back({"W", PatternSystem::builtin("W").root_body()});
    for (int e : gen.used_hair_ladders) defs.push_back({"Z" + std::to_string(e), ladder_hair_body(e)});
    for (int e : gen.used_point_ladders)
        defs.push_back({"P" + std::to_string(e), ladder_point_body(e)});

    BuiltSet out{PatternSystem::from_parts(std::move(defs), "R"), {}, {}, desc, depth};
    out.set = expand(out.system, depth);

    // metadata from the realized pieces
    struct RawHair {
        CNF ord;
        std::size_t cost;
        Rat lo, hi;
    };
    std::vector<RawHair> raw;
    std::map<std::vector<int>, BrickSpan> brick_groups;
    for (const Piece& p : out.set.pieces) {
        if (p.kind == PieceKind::Gap) continue;
        // group everything under one W entry as a single brick span
        std::string pat = out.system.root();
        for (std::size_t i = 0; i < p.addr.path.size(); ++i) {
            const Cell& cell = out.system.body(pat).cells[static_cast<std::size_t>(p.addr.path[i])];
            if (cell.kind == CellKind::Ref && cell.target == "W") {
                std::vector<int> key(p.addr.path.begin(),
                                     p.addr.path.begin() + static_cast<long>(i) + 1);
                auto [it, fresh] = brick_groups.try_emplace(key, BrickSpan{p.a, p.b});
                if (!fresh) {
                    it->second.lo = std::min(it->second.lo, p.a);
                    it->second.hi = std::max(it->second.hi, p.b);
                }
                break;
            }
            if (cell.kind != CellKind::Ref) break;
            pat = cell.target;
        }
        if (p.kind != PieceKind::Solid && p.kind != PieceKind::Point) continue;
        ResolvedFeature f = resolve_feature(out.system, gen.roles, p.addr);
        if (!f.is_base) continue;
        if (f.in_a) raw.push_back({f.ord, p.addr.depth(), p.a, p.b});
    }

    // point features are swallowed by their flush brick neighbors in the piece
    // list, so recover them from the set of expanded pattern instances
    std::map<std::string, std::vector<Rat>> starts;
    for (const std::string& name : out.system.names()) {
        std::vector<Rat> s{Rat(0)};
        for (const Cell& c : out.system.body(name).cells)
            s.push_back(s.back() + (c.kind == CellKind::Point ? Rat(0) : c.length));
        starts[name] = std::move(s);
    }
    std::set<std::vector<int>> instances;
    for (const Piece& p : out.set.pieces)
        for (std::size_t k = 0; k < p.addr.path.size(); ++k)
            instances.insert(std::vector<int>(p.addr.path.begin(),
                                              p.addr.path.begin() + static_cast<long>(k)));
    for (const std::vector<int>& inst : instances) {
        std::string pat = out.system.root();
        Rat lo = 0, scale = 1;
        bool ok = true;
        for (int idx : inst) {
            const Cell& c = out.system.body(pat).cells[static_cast<std::size_t>(idx)];
            if (c.kind != CellKind::Ref) {
                ok = false;
                break;
            }
            lo += scale * starts[pat][static_cast<std::size_t>(idx)];
            scale *= c.length;
            pat = c.target;
        }
        if (!ok || pat == "W") continue;
        const PatternBody& body = out.system.body(pat);
        for (std::size_t i = 0; i < body.cells.size(); ++i) {
            if (body.cells[i].kind != CellKind::Point) continue;
            Address addr{inst};
            addr.path.push_back(static_cast<int>(i));
            ResolvedFeature f = resolve_feature(out.system, gen.roles, addr);
            if (!f.is_base || f.in_a) continue;
            Rat pos = lo + scale * starts[pat][i];
            out.plan.base.push_back({f.ord, layout_position(desc.alpha, f.ord), pos, false, -1});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const RawHair& a, const RawHair& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.ord < b.ord;
    });
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out.plan.hairs.push_back(
            {raw[i].ord, static_cast<int>(i), half_pow(static_cast<int>(i)), raw[i].lo, raw[i].hi});
        out.plan.base.push_back({raw[i].ord, layout_position(desc.alpha, raw[i].ord), raw[i].lo,
                                 true, static_cast<int>(i)});
    }
    std::sort(out.plan.base.begin(), out.plan.base.end(),
              [](const BasePoint& a, const BasePoint& b) { return a.realized_pos < b.realized_pos; });
    for (auto& [key, span] : brick_groups) out.plan.bricks.push_back(span);
    std::sort(out.plan.bricks.begin(), out.plan.bricks.end(),
              [](const BrickSpan& a, const BrickSpan& b) { return a.lo < b.lo; });
    return out;
}

ComponentSpace component_space(const PatternSystem& sys, int depth) {
    ApproxSet x = expand(sys, depth);
    OrderPrefix pre = gap_interval_order(sys, depth);

    std::vector<SpaceNode> comps;
    for (const OrderElement& e : pre.elements)
        if (e.tag == ElementTag::B) comps.push_back({PieceKind::Solid, e.lo, e.hi, false, false, false});
    for (const Piece& p : x.pieces)
        if (p.kind == PieceKind::Point)
            comps.push_back({PieceKind::Point, p.a, p.b, false, false, false});
    std::sort(comps.begin(), comps.end(),
              [](const SpaceNode& a, const SpaceNode& b) { return a.lo < b.lo; });

    std::vector<std::pair<Rat, Rat>> gaps;
    for (const Piece& p : x.pieces)
        if (p.kind == PieceKind::Gap) gaps.push_back({p.a, p.b});

    auto flush_left = [&](const Rat& at) {
        if (at == x.hull_lo) return true;
        for (const auto& g : gaps)
            if (g.second == at) return true;
        return false;
    };
    auto flush_right = [&](const Rat& at) {
        if (at == x.hull_hi) return true;
        for (const auto& g : gaps)
            if (g.first == at) return true;
        return false;
    };
    auto separated = [&](const Rat& lo, const Rat& hi) {
        for (const auto& g : gaps)
            if (lo <= g.first && g.second <= hi) return true;
        return false;
    };
    for (std::size_t i = 0; i < comps.size(); ++i) {
        comps[i].left_cluster = !flush_left(comps[i].lo);
        comps[i].right_cluster = !flush_right(comps[i].hi);
        bool left_ok = i == 0 || separated(comps[i - 1].hi, comps[i].lo);
        bool right_ok = i + 1 == comps.size() || separated(comps[i].hi, comps[i + 1].lo);
        comps[i].isolated = left_ok && right_ok;
    }

    // leftover unresolved mass, outside every certified component
    std::vector<SpaceNode> clusters;
    for (const Piece& p : x.pieces) {
        if (p.kind != PieceKind::Unresolved) continue;
        Rat lo = p.a, hi = p.b;
        for (const SpaceNode& c : comps) {
            if (c.hi <= lo || hi <= c.lo) continue;
            if (c.lo <= lo) lo = rat_max(lo, c.hi);
            if (c.hi >= hi) hi = rat_min(hi, c.lo);
        }
        if (lo >= hi) continue;
        if (!clusters.empty() && clusters.back().hi == lo)
            clusters.back().hi = hi;
        else
            clusters.push_back({PieceKind::Unresolved, lo, hi, false, true, true});
    }

    ComponentSpace out;
    out.nodes = std::move(comps);
    out.nodes.insert(out.nodes.end(), clusters.begin(), clusters.end());
    std::sort(out.nodes.begin(), out.nodes.end(),
              [](const SpaceNode& a, const SpaceNode& b) { return a.lo < b.lo; });
    for (const SpaceNode& n : out.nodes)
        if (n.kind == PieceKind::Point && n.isolated) out.has_isolated_trivial = true;
    return out;
}

ComponentSpace component_space(const BuiltSet& built) {
    return component_space(built.system, built.depth);
}

namespace {

std::pair<int, int> rank_degree(const CNF& gamma) {
    if (gamma.terms.empty()) return {0, 1};
    if (gamma.terms.size() == 1 && gamma.terms.front().first == 0)
        return {0, gamma.terms.front().second + 1};
    return {gamma.terms.front().first, gamma.terms.front().second};
}

}  // namespace

ZReport z_subspace(const BuiltSet& built) {
    ZReport r;
    if (!built.desc.all && built.desc.points.empty()) {
        r.empty = true;
        return r;
    }
    CNF gamma;
    if (built.desc.all)
        gamma = built.desc.alpha.predecessor();
    else {
        std::set<CNF> distinct(built.desc.points.begin(), built.desc.points.end());
        gamma = CNF::from_int(static_cast<int>(distinct.size()) - 1);
    }
    auto [rank, degree] = rank_degree(gamma);
    r.rank = rank;
    r.degree = degree;
    r.witnesses = built.plan.hairs;
    return r;
}

ZReport z_subspace(const ApproxSet& x) {
    ZReport r;
    r.partial = true;
    int i = 0;
    for (std::size_t k = 0; k < x.pieces.size(); ++k) {
        const Piece& p = x.pieces[k];
        if (p.kind != PieceKind::Solid || !p.left_certified || !p.right_certified) continue;
        bool left = k > 0 && x.pieces[k - 1].kind == PieceKind::Unresolved &&
                    x.pieces[k - 1].b == p.a;
        bool right = k + 1 < x.pieces.size() && x.pieces[k + 1].kind == PieceKind::Unresolved &&
                     x.pieces[k + 1].a == p.b;
        if (left && right) r.witnesses.push_back({CNF{}, i++, Rat(0), p.a, p.b});
    }
    r.empty = r.witnesses.empty();
    return r;
}

std::vector<int> cb_survivor_counts(const BuiltSet& built, int rounds) {
    if (rounds < 1) throw std::invalid_argument("cb_survivor_counts: at least one round");
    std::vector<int> out;
    for (int r = 1; r <= rounds; ++r) {
        int n = 0;
        for (const BasePoint& b : built.plan.base)
            if (!b.ord.zero() && b.ord.trailing_exponent() >= r) ++n;
        out.push_back(n);
    }
    return out;
}

DistinguishMatrix distinguish(const std::vector<SubsetDesc>& family, int depth) {
    if (family.size() < 2)
        throw std::invalid_argument("distinguish: at least two descriptions are needed");
    DistinguishMatrix out;
    for (const SubsetDesc& d : family) out.reports.push_back(z_subspace(build_from_ordinal_subset(d, depth)));
    for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a + 1; b < family.size(); ++b) {
            const ZReport& ra = out.reports[a];
            const ZReport& rb = out.reports[b];
            bool distinct = ra.empty != rb.empty ||
                            (!ra.empty && (ra.rank != rb.rank || ra.degree != rb.degree));
            out.pairs.push_back({static_cast<int>(a), static_cast<int>(b), distinct});
        }
    return out;
}

}  // namespace cantorval
