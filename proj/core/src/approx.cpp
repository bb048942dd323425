#include "cantorval/approx.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace cantorval {

namespace {

struct Window {
    Rat lo, hi;
    bool meets(const Rat& a, const Rat& b) const {
        if (a == b) return a > lo && a < hi;  // point
        return a < hi && b > lo;
    }
};

void emit(const PatternSystem& sys, const std::string& name, int budget, const Rat& origin,
          const Rat& scale, Address addr, const std::optional<Window>& win,
          std::vector<Piece>& out) {
    Rat pos = origin;
    const auto& cells = sys.body(name).cells;
    for (int i = 0; i < (int)cells.size(); ++i) {
        const Cell& c = cells[i];
        Rat w = scale * c.length;
        Rat end = pos + w;
        if (win && !win->meets(pos, end)) {
            pos = end;
            continue;
        }
        switch (c.kind) {
            case CellKind::Solid:
                out.push_back({PieceKind::Solid, pos, end, "", addr.child(i)});
                break;
            case CellKind::Gap:
                out.push_back({PieceKind::Gap, pos, end, "", addr.child(i)});
                break;
            case CellKind::Point:
                out.push_back({PieceKind::Point, pos, pos, "", addr.child(i)});
                break;
            case CellKind::Ref:
                if (budget > 0)
                    emit(sys, c.target, budget - 1, pos, w, addr.child(i), win, out);
                else
                    out.push_back({PieceKind::Unresolved, pos, end, c.target, addr.child(i)});
                break;
        }
        pos = end;
    }
}

}  // namespace

std::vector<Piece> normalize_pieces(std::vector<Piece> raw, const Analysis* an) {
    if (an) {
        for (Piece& p : raw) {
            if (p.kind == PieceKind::Unresolved && an->attrs(p.pattern).full_span) {
                p.kind = PieceKind::Solid;
                p.pattern.clear();
            }
        }
    }
    std::vector<Piece> out;
    for (size_t i = 0; i < raw.size(); ++i) {
        const Piece& p = raw[i];
        if (p.kind == PieceKind::Point) {
            if (!out.empty()) {
                const Piece& q = out.back();
                if (q.b == p.a &&
                    (q.kind == PieceKind::Solid || q.kind == PieceKind::Unresolved))
                    continue;
                if (q.kind == PieceKind::Point && q.a == p.a) continue;
            }
            size_t j = i + 1;
            while (j < raw.size() && raw[j].kind == PieceKind::Point && raw[j].a == p.a) ++j;
            if (j < raw.size() && raw[j].a == p.a &&
                (raw[j].kind == PieceKind::Solid || raw[j].kind == PieceKind::Unresolved))
                continue;
            out.push_back(p);
            continue;
        }
        if (p.kind == PieceKind::Solid && !out.empty() && out.back().kind == PieceKind::Solid &&
            out.back().b == p.a) {
            out.back().b = p.b;
            continue;
        }
        out.push_back(p);
    }
    for (size_t i = 0; i < out.size(); ++i) {
        Piece& p = out[i];
        const Piece* ln = (i > 0 && out[i - 1].b == p.a) ? &out[i - 1] : nullptr;
        const Piece* rn = (i + 1 < out.size() && out[i + 1].a == p.b) ? &out[i + 1] : nullptr;
        auto blocked_by = [&](const Piece* n, bool from_left) {
            // does an interval continue across the shared endpoint into n?
            if (!n) return true;  // unknown neighborhood: leave uncertified
            if (n->kind == PieceKind::Gap || n->kind == PieceKind::Point) return false;
            if (n->kind == PieceKind::Solid) return true;
            if (!an) return true;
            EdgeKind k = from_left ? an->attrs(n->pattern).right_kind
                                   : an->attrs(n->pattern).left_kind;
            return k == EdgeKind::Solid;
        };
        switch (p.kind) {
            case PieceKind::Gap:
            case PieceKind::Point:
                p.left_certified = p.right_certified = true;
                break;
            case PieceKind::Solid:
            case PieceKind::Unresolved:
                p.left_certified = !blocked_by(ln, true);
                p.right_certified = !blocked_by(rn, false);
                break;
        }
    }
    return out;
}

const Piece* ApproxSet::find(const Address& addr) const {
    for (const Piece& p : pieces)
        if (p.addr == addr) return &p;
    return nullptr;
}

ApproxSet expand(const PatternSystem& sys, int depth) {
    if (depth < 0) throw std::invalid_argument("expand: negative depth");
    Analysis an(sys);
    std::vector<Piece> raw;
    if (depth == 0)
        raw.push_back({PieceKind::Unresolved, 0, 1, sys.root(), Address{}});
    else
        emit(sys, sys.root(), depth - 1, 0, 1, Address{}, std::nullopt, raw);
    ApproxSet a;
    a.pieces = normalize_pieces(std::move(raw), &an);
    a.depth = depth;
    a.hull_lo = 0;
    a.hull_hi = 1;
    if (!a.pieces.empty()) {
        a.pieces.front().left_certified = true;  // hull boundary is the set minimum
        a.pieces.back().right_certified = true;
    }
    return a;
}

std::vector<Piece> expand_window(const PatternSystem& sys, int depth, const Rat& lo,
                                 const Rat& hi) {
    if (depth < 0) throw std::invalid_argument("expand_window: negative depth");
    Analysis an(sys);
    std::vector<Piece> raw;
    Window win{lo, hi};
    if (depth == 0) {
        if (win.meets(0, 1)) raw.push_back({PieceKind::Unresolved, 0, 1, sys.root(), Address{}});
    } else {
        emit(sys, sys.root(), depth - 1, 0, 1, Address{}, win, raw);
    }
    return normalize_pieces(std::move(raw), &an);
}

ApproxSet achievement_set(const std::vector<Rat>& terms, const Rat& tail_bound, int depth) {
    if (depth < 0 || depth > (int)terms.size())
        throw std::invalid_argument("achievement_set: depth exceeds available terms");
    if (tail_bound < 0) throw std::invalid_argument("achievement_set: negative tail bound");
    for (size_t i = 0; i < terms.size(); ++i) {
        if (terms[i] <= 0) throw std::invalid_argument("achievement_set: non-positive term");
        if (i > 0 && terms[i] > terms[i - 1])
            throw std::invalid_argument("achievement_set: terms must be decreasing");
    }
    std::vector<Rat> sums{Rat(0)};
    for (int i = 0; i < depth; ++i) {
        size_t n = sums.size();
        for (size_t j = 0; j < n; ++j) sums.push_back(sums[j] + terms[i]);
    }
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());

    ApproxSet a;
    a.depth = depth;
    a.hull_lo = sums.front();
    Rat lo = sums.front(), hi = sums.front() + tail_bound;
    auto flush = [&](const Rat& next_lo) {
        if (lo == hi)
            a.pieces.push_back({PieceKind::Point, lo, lo, "", {}, true, true});
        else
            a.pieces.push_back({PieceKind::Solid, lo, hi, "", {}, true, true});
        if (next_lo > hi) a.pieces.push_back({PieceKind::Gap, hi, next_lo, "", {}, true, true});
    };
    for (size_t i = 1; i < sums.size(); ++i) {
        if (sums[i] <= hi) {
            hi = rat_max(hi, sums[i] + tail_bound);
        } else {
            flush(sums[i]);
            lo = sums[i];
            hi = sums[i] + tail_bound;
        }
    }
    flush(hi);
    a.hull_hi = hi;
    return a;
}

}  // namespace cantorval
