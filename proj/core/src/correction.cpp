#include <cantorval/correction.hpp>

#include <algorithm>
#include <climits>
#include <optional>
#include <set>
#include <stdexcept>

#include <cantorval/attributes.hpp>
#include <cantorval/classify.hpp>

namespace cantorval {

Rat ChunkMap::apply(const Rat& x) const {
    for (const ChunkPiece& p : pieces)
        if (x >= p.lo && x < p.hi) return x - p.delta;
    return x;
}

Rat ChunkMap::max_shift() const {
    Rat m = 0;
    for (const ChunkPiece& p : pieces) m = rat_max(m, rat_abs(p.delta));
    return m;
}

ChunkMap compose(const ChunkMap& outer, const ChunkMap& inner) {
    // domain breakpoints: inner's own, plus every preimage of an outer
    // breakpoint (through each inner span and through the identity regions)
    std::set<Rat> cuts;
    for (const ChunkPiece& p : inner.pieces) {
        cuts.insert(p.lo);
        cuts.insert(p.hi);
    }
    for (const ChunkPiece& q : outer.pieces)
        for (const Rat& t : {q.lo, q.hi}) {
            cuts.insert(t);
            for (const ChunkPiece& p : inner.pieces) {
                Rat pre = t + p.delta;
                if (pre >= p.lo && pre < p.hi) cuts.insert(pre);
            }
        }
    ChunkMap out;
    out.error_bound = inner.error_bound + outer.error_bound;
    std::vector<Rat> cs(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
        Rat mid = (cs[i] + cs[i + 1]) / 2;
        Rat shift = mid - outer.apply(inner.apply(mid));
        if (shift == 0) continue;
        if (!out.pieces.empty() && out.pieces.back().hi == cs[i] &&
            out.pieces.back().delta == shift)
            out.pieces.back().hi = cs[i + 1];
        else
            out.pieces.push_back({cs[i], cs[i + 1], shift});
    }
    return out;
}

namespace {

// Canonical plan for the gap piece (a, b) of x, no symbolic checks.
CorrectionPlan plan_window(const ApproxSet& x, const Rat& a, const Rat& b, const Rat& epsilon,
                           long long budget, bool flag_short) {
    std::size_t gi = x.pieces.size();
    for (std::size_t i = 0; i < x.pieces.size(); ++i) {
        const Piece& p = x.pieces[i];
        if (p.kind == PieceKind::Gap && p.a == a && p.b == b) {
            gi = i;
            break;
        }
    }
    if (gi == x.pieces.size())
        throw std::invalid_argument("correction: no gap piece at (" + format_rat(a) + ", " +
                                    format_rat(b) + ")");

    CorrectionPlan plan;
    plan.gap_lo = a;
    plan.gap_hi = b;
    plan.epsilon = epsilon;

    // snap the window height to the midpoint of the widest resolved gap
    // starting inside (b, b+eta0); ties go to the gap nearest the window top
    Rat eta0 = rat_min((b - a) / 2, epsilon / 2);
    std::size_t si = x.pieces.size();
    for (std::size_t i = gi + 1; i < x.pieces.size(); ++i) {
        const Piece& p = x.pieces[i];
        if (p.a >= b + eta0) break;
        if (p.kind != PieceKind::Gap || p.a <= b) continue;
        if (si == x.pieces.size() || p.b - p.a >= x.pieces[si].b - x.pieces[si].a) si = i;
    }
    if (si == x.pieces.size())
        throw std::runtime_error("correction: no resolved gap in the snap window, increase depth");
    Rat cut = (x.pieces[si].a + rat_min(x.pieces[si].b, b + eta0)) / 2;
    plan.eta = cut - b;

    // chunk cuts: free left endpoints of resolved intervals, walking down to b
    if (budget > 0) {
        bool have_max = false;
        Rat cur_max = 0;
        for (std::size_t i = si; i-- > gi + 1;) {
            const Piece& p = x.pieces[i];
            if (p.kind == PieceKind::Unresolved) break;
            if (p.kind == PieceKind::Gap) continue;
            if (!have_max) {
                cur_max = p.b;
                have_max = true;
            }
            if (p.kind == PieceKind::Solid && x.pieces[i - 1].kind == PieceKind::Gap) {
                CorrectionChunk ch;
                ch.min = p.a;
                ch.max = cur_max;
                ch.delta = plan.chunks.empty() ? Rat(0) : Rat(ch.max + ch.min - 2 * b);
                plan.chunks.push_back(ch);
                have_max = false;
                if ((long long)plan.chunks.size() == budget) break;
            }
        }
    }
    plan.residual = plan.chunks.empty() ? plan.eta : Rat(plan.chunks.back().min - b);
    plan.truncated = flag_short && (long long)plan.chunks.size() < budget;
    return plan;
}

}  // namespace

CorrectionPlan find_correction(const PatternSystem& sys, const ApproxSet& x,
                               const Address& gap_address, const Rat& epsilon, int chunks) {
    if (chunks < 0) throw std::invalid_argument("find_correction: chunk budget is negative");
    if (epsilon <= 0) throw std::invalid_argument("find_correction: epsilon must be positive");
    ClassReport rep = classify(sys);
    if (!rep.is_left_oriented)
        throw std::invalid_argument("find_correction: system is not left-oriented (witness " +
                                    rep.witnesses.at("is_left_oriented").to_string() + ")");
    std::optional<GapInfo> hit;
    for (const GapInfo& g : inappropriate_gaps(sys, x.depth))
        if (g.address.path == gap_address.path) {
            hit = g;
            break;
        }
    if (!hit)
        throw std::invalid_argument("find_correction: no gap at address " +
                                    gap_address.to_string());
    if (!hit->inappropriate)
        throw std::invalid_argument("find_correction: gap at " + gap_address.to_string() +
                                    " is not inappropriate");
    return plan_window(x, hit->lo, hit->hi, epsilon, chunks, true);
}

std::pair<ApproxSet, ChunkMap> apply_correction(const ApproxSet& x, const CorrectionPlan& plan) {
    const Rat& a = plan.gap_lo;
    const Rat& b = plan.gap_hi;
    bool gap_found = false;
    for (const Piece& p : x.pieces)
        if (p.kind == PieceKind::Gap && p.a == a && p.b == b) {
            gap_found = true;
            break;
        }
    if (!gap_found) throw std::invalid_argument("apply_correction: plan does not match the set");

    ChunkMap map;
    map.error_bound = 2 * plan.residual;
    if (plan.chunks.empty()) return {x, map};

    for (std::size_t k = plan.chunks.size(); k-- > 1;)
        map.pieces.push_back({plan.chunks[k].min, plan.chunks[k - 1].min, plan.chunks[k].delta});

    for (const CorrectionChunk& ch : plan.chunks) {
        bool anchored = false;
        for (const Piece& p : x.pieces)
            if (p.kind == PieceKind::Solid && p.a == ch.min) {
                anchored = true;
                break;
            }
        if (!anchored) throw std::invalid_argument("apply_correction: plan does not match the set");
    }

    const Rat c0 = plan.chunks.front().min;
    const Rat c_last = plan.chunks.back().min;

    std::vector<Piece> out;
    out.reserve(x.pieces.size() + 4);
    for (const Piece& p : x.pieces) {
        if (p.kind == PieceKind::Gap) {
            // the corrected gap and the window gaps below the anchor get retiled
            if (p.a == a && p.b == b) continue;
            if (p.a >= b && p.b <= c0) continue;
            out.push_back(p);
            continue;
        }
        if (p.b > b && p.a < c0) {
            if (p.a >= b && p.b <= c_last) continue;  // tail, absorbed by the marker
            std::size_t k = 1;
            while (k < plan.chunks.size() && plan.chunks[k].min > p.a) ++k;
            if (k == plan.chunks.size() || p.a < plan.chunks[k].min || p.b > plan.window_hi(k))
                throw std::invalid_argument("apply_correction: plan does not match the set");
            Piece moved = p;
            moved.a -= plan.chunks[k].delta;
            moved.b -= plan.chunks[k].delta;
            out.push_back(std::move(moved));
            continue;
        }
        out.push_back(p);
    }

    // the unenumerated tail reflects into a certified span flush left of b
    Piece marker;
    marker.kind = PieceKind::Unresolved;
    marker.a = 2 * b - c_last;
    marker.b = b;
    out.push_back(std::move(marker));

    std::sort(out.begin(), out.end(), [](const Piece& l, const Piece& r) {
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });

    ApproxSet img;
    img.depth = x.depth;
    img.hull_lo = x.hull_lo;
    img.hull_hi = x.hull_hi;
    img.pieces.reserve(out.size() + 8);
    Rat cursor = x.hull_lo;
    for (Piece& p : out) {
        if (p.a < cursor) throw std::logic_error("apply_correction: image pieces overlap");
        if (p.a > cursor) {
            Piece g;
            g.kind = PieceKind::Gap;
            g.a = cursor;
            g.b = p.a;
            g.left_certified =
                !img.pieces.empty() && img.pieces.back().kind != PieceKind::Unresolved;
            g.right_certified = p.kind != PieceKind::Unresolved;
            img.pieces.push_back(std::move(g));
        }
        img.pieces.push_back(std::move(p));
        cursor = img.pieces.back().b;
    }
    if (cursor > x.hull_hi) throw std::logic_error("apply_correction: image leaves the hull");
    if (cursor < x.hull_hi) {
        Piece g;
        g.kind = PieceKind::Gap;
        g.a = cursor;
        g.b = x.hull_hi;
        g.left_certified = !img.pieces.empty() && img.pieces.back().kind != PieceKind::Unresolved;
        img.pieces.push_back(std::move(g));
    }
    return {std::move(img), std::move(map)};
}

PipelineResult l_cantorvalize(const PatternSystem& sys, int stages, int depth) {
    if (stages < 1) throw std::invalid_argument("l_cantorvalize: at least one stage is required");
    Analysis an(sys);
    ClassReport rep = classify(sys);
    if (!rep.is_left_oriented)
        throw std::invalid_argument("l_cantorvalize: system is not left-oriented (witness " +
                                    rep.witnesses.at("is_left_oriented").to_string() + ")");
    // every gap must be either already appropriate or correctable: an interval
    // with a free left endpoint has to accumulate on its right
    for (const std::string& name : sys.names()) {
        const auto& cells = sys.body(name).cells;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (cells[i].kind != CellKind::Gap) continue;
            for (const NatureAt& nat : an.nature_right_of(name, i + 1)) {
                bool ok = nat.kind == Nature::Solid ||
                          (nat.kind == Nature::Cluster && an.attrs(nat.cluster_of).fl_cluster_left);
                if (!ok)
                    throw std::invalid_argument(
                        "l_cantorvalize: gap at " + an.shallowest(name).child(i).to_string() +
                        " has no interval with a free left endpoint accumulating on its right");
            }
        }
    }

    ApproxSet x = expand(sys, depth);
    ChunkMap composed;
    int n = 0;
    for (const GapInfo& g : inappropriate_gaps(sys, depth)) {
        if (!g.inappropriate) continue;
        if (n == stages) break;
        ++n;
        Rat eps = pow_rat(rat(1, 2), (unsigned)n);
        CorrectionPlan plan =
            plan_window(x, composed.apply(g.lo), composed.apply(g.hi), eps, LLONG_MAX, false);
        auto [img, f] = apply_correction(x, plan);
        x = std::move(img);
        composed = compose(f, composed);
    }

    PipelineResult r;
    r.stages = stages;
    r.approx = std::move(x);
    r.composed = std::move(composed);
    r.tail_bound = pow_rat(rat(1, 2), (unsigned)(stages - 1));
    return r;
}

std::vector<Piece> gaps_without_right_interval(const ApproxSet& x) {
    std::vector<Piece> bad;
    for (std::size_t i = 0; i < x.pieces.size(); ++i) {
        const Piece& p = x.pieces[i];
        if (p.kind != PieceKind::Gap) continue;
        if (i + 1 == x.pieces.size()) {
            bad.push_back(p);
            continue;
        }
        const Piece& r = x.pieces[i + 1];
        if (r.kind == PieceKind::Unresolved) continue;
        if (r.kind != PieceKind::Solid) bad.push_back(p);
    }
    return bad;
}

}  // namespace cantorval
