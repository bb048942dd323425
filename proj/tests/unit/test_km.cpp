#include <doctest.h>

#include <cantorval/km_embed.hpp>
#include <cantorval/order.hpp>
#include <cantorval/pattern.hpp>
#include <algorithm>
#include <random>
#include <string>
#include <vector>

using namespace cantorval;

namespace {

Rat R(const char* s) { return parse_rat(s); }

const MetricView& model_view() {
    static MetricView v(PatternSystem::builtin("modelC"), 8);
    return v;
}

// id of the central bar, the only component of length 1/3
int main_bar(const MetricView& v) {
    for (int c = 0; c < v.component_count(); ++c)
        if (v.component_length(c) == R("1/3")) return c;
    return -1;
}

std::vector<Rat> solid_lengths(const ApproxSet& x) {
    std::vector<Rat> out;
    for (const Piece& p : x.pieces)
        if (p.kind == PieceKind::Solid) out.push_back(p.b - p.a);
    return out;
}

}  // namespace

TEST_CASE("metric view exposes atoms, components, and distances") {
    const MetricView& v = model_view();
    CHECK(v.max_level() == 12);
    CHECK(v.component_count() == 85);
    CHECK(v.space(0).atoms.size() == 1);
    CHECK(v.space(4).atoms.size() == 3);
    CHECK(v.space(7).atoms.size() == 11);
    CHECK(v.space(12).atoms.size() == 43);
    CHECK(v.diameter(v.space(0)) == 1);

    int mb = main_bar(v);
    CHECK(mb == 42);
    CHECK(v.component_length(mb) == R("1/3"));
    CHECK_FALSE(v.end_open(mb, 0));
    CHECK_FALSE(v.end_open(mb, 1));
    CHECK(v.component_atom(mb, 4) == 1);
    CHECK(v.component_atom(mb, 7) == 5);
    CHECK(v.endpoint_distance(2 * mb, 2 * mb + 1) == R("1/3"));

    auto in0 = v.components_in(ClopenSet{4, {0}});
    REQUIRE(in0.size() == 21);
    CHECK(in0.front() == 0);
    CHECK(in0.back() == 20);

    CHECK(v.diameter(ClopenSet{4, {1}}) == R("5/9"));
    CHECK(v.distance(ClopenSet{4, {0}}, ClopenSet{4, {1}}) == R("1/9"));
    CHECK(v.max_distance(ClopenSet{4, {0}}, 2 * mb) == R("1/3"));

    CHECK(v.refine(ClopenSet{4, {1}}, 7) == ClopenSet{7, {3, 4, 5, 6, 7}});
    CHECK_THROWS_AS((void)v.refine(ClopenSet{7, {3}}, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)v.space(13), std::invalid_argument);
    CHECK_THROWS_AS((void)v.diameter(ClopenSet{4, {}}), std::invalid_argument);
}

TEST_CASE("ball regions honor open and clustered ends") {
    const MetricView& v = model_view();
    int mb = main_bar(v);

    Region reg = b_star(v, mb, R("1/6"));
    CHECK(reg.contains(ClopenSet{4, {1}}));
    CHECK_FALSE(reg.contains(ClopenSet{4, {0}}));
    CHECK_FALSE(reg.contains(v.space(4)));
    CHECK(reg.contains_component(mb));

    // strictness: the ball is open, so content exactly 1/81 away stays outside
    Region tight = b_star(v, mb, R("1/81"));
    CHECK_FALSE(tight.contains(ClopenSet{7, {5}}));

    Region handles = b_star(v, ClopenSet{4, {1}}, R("1/2"));
    CHECK(handles.contains(ClopenSet{4, {1}}));
    CHECK(handles.contains(v.refine(ClopenSet{4, {1}}, 7)));
    CHECK_FALSE(handles.contains(v.space(4)));

    CHECK_THROWS_AS((void)b_star(v, mb, Rat(0)), std::invalid_argument);
}

TEST_CASE("clopen separation picks the coarsest adequate set") {
    const MetricView& v = model_view();
    int mb = main_bar(v);

    ClopenSet u{7, {3, 4, 5, 6, 7}};
    CHECK(clopen_separate(v, mb, u) == ClopenSet{4, {1}});
    CHECK(clopen_separate(v, mb, v.space(4)) == ClopenSet{4, {1}});
    CHECK_THROWS_WITH_AS((void)clopen_separate(v, mb, ClopenSet{4, {0}}),
                         "clopen_separate: the component is outside the set",
                         std::invalid_argument);
}

TEST_CASE("neighborhood membership verdicts") {
    const MetricView& v = model_view();

    BnVerdict b1 = bn_member(v, v.space(0), 1);
    CHECK(b1.member);
    CHECK(b1.witness == 42);
    CHECK(b1.needed_eps == R("1/3"));

    BnVerdict b3 = bn_member(v, ClopenSet{4, {1}}, 3);
    CHECK(b3.member);
    CHECK(b3.witness == 42);
    CHECK(b3.needed_eps == R("1/9"));

    // needed distance is exactly 1/9, and the ball is open
    BnVerdict b9 = bn_member(v, ClopenSet{4, {1}}, 9);
    CHECK_FALSE(b9.member);
    CHECK(b9.needed_eps == R("1/9"));

    BnVerdict part = bn_member(v, ClopenSet{7, {5, 6, 7}}, 6);
    CHECK(part.member);
    CHECK(part.witness == 42);
    CHECK(part.needed_eps == R("1/9"));

    BnVerdict split = bn_member(v, ClopenSet{7, {3, 5}}, 20);
    CHECK_FALSE(split.member);

    // dust windows are members by resolution, with no nameable witness
    MetricView dust(PatternSystem::builtin("cantor3"), 8);
    BnVerdict fine = bn_member(dust, ClopenSet{10, {0}}, 50);
    CHECK(fine.member);
    CHECK_FALSE(fine.witness.has_value());

    CHECK_THROWS_AS((void)bn_member(v, v.space(0), 0), std::invalid_argument);
    CHECK_THROWS_AS((void)bn_member(v, ClopenSet{4, {}}, 2), std::invalid_argument);
}

TEST_CASE("partition refinement isolates the large arcs") {
    const MetricView& v = model_view();

    Partition p3 = refine_partition(v, v.space(0), 3);
    REQUIRE(p3.members.size() == 3);
    CHECK(p3.members[0] == ClopenSet{4, {0}});
    CHECK(p3.members[1] == ClopenSet{4, {1}});
    CHECK(p3.members[2] == ClopenSet{4, {2}});
    CHECK(v.diameter(p3.members[0]) == R("1/9"));
    CHECK(v.diameter(p3.members[1]) == R("5/9"));
    CHECK(v.diameter(p3.members[2]) == R("1/9"));

    Partition p5 = refine_partition(v, ClopenSet{4, {1}}, 5);
    REQUIRE(p5.members.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(p5.members[static_cast<std::size_t>(i)].level == 7);

    CHECK_THROWS_AS((void)refine_partition(v, v.space(0), 0), std::invalid_argument);
    CHECK_THROWS_AS((void)refine_partition(v, ClopenSet{4, {}}, 2), std::invalid_argument);
}

TEST_CASE("partition towers refine level by level") {
    const MetricView& v = model_view();
    auto tower = partition_tower(v, 6);
    REQUIRE(tower.size() == 6);
    std::vector<std::size_t> sizes;
    for (const auto& p : tower) sizes.push_back(p.members.size());
    CHECK(sizes == std::vector<std::size_t>{3, 3, 3, 3, 7, 7});

    const Partition& p6 = tower[5];
    CHECK(p6.members[0] == ClopenSet{4, {0}});
    CHECK(p6.members[1] == ClopenSet{7, {3}});
    CHECK(p6.members[2] == ClopenSet{7, {4}});
    CHECK(p6.members[3] == ClopenSet{7, {5}});
    CHECK(p6.members[4] == ClopenSet{7, {6}});
    CHECK(p6.members[5] == ClopenSet{7, {7}});
    CHECK(p6.members[6] == ClopenSet{4, {2}});
    CHECK(v.diameter(p6.members[3]) == R("29/81"));

    // every member sits inside exactly one member of the previous level
    for (std::size_t n = 1; n < tower.size(); ++n)
        for (const auto& m : tower[n].members) {
            int parents = 0;
            for (const auto& q : tower[n - 1].members) {
                if (q.level > m.level) continue;
                auto fine = v.refine(q, m.level);
                if (std::includes(fine.atoms.begin(), fine.atoms.end(), m.atoms.begin(),
                                  m.atoms.end()))
                    ++parents;
            }
            CHECK(parents == 1);
        }

    CHECK_THROWS_AS((void)partition_tower(v, 0), std::invalid_argument);
}

TEST_CASE("towers report where resolution runs out") {
    MetricView shallow(PatternSystem::builtin("modelC"), 3);
    CHECK(shallow.max_level() == 4);
    CHECK(shallow.component_count() == 5);

    auto t4 = partition_tower(shallow, 4);
    std::vector<std::size_t> sizes;
    for (const auto& p : t4) sizes.push_back(p.members.size());
    CHECK(sizes == std::vector<std::size_t>{3, 3, 3, 3});

    CHECK_THROWS_WITH_AS(
        (void)partition_tower(shallow, 6),
        "partition_tower: resolution exhausted at level 5; maximal achievable N is 4",
        std::runtime_error);
}

TEST_CASE("core detection inside clopen windows") {
    const MetricView& v = model_view();

    CHECK_FALSE(find_core(v, v.space(0)).has_value());
    CHECK_FALSE(find_core(v, ClopenSet{7, {3}}).has_value());

    auto core = find_core(v, ClopenSet{7, {5}});
    REQUIRE(core.has_value());
    CHECK(core->component == 42);
    CHECK(core->length == R("1/3"));
    CHECK(core->endpoints == std::pair<int, int>{84, 85});

    auto wide = find_core(v, ClopenSet{7, {5, 6, 7}});
    REQUIRE(wide.has_value());
    CHECK(wide->component == 42);

    CHECK_THROWS_AS((void)find_core(v, ClopenSet{4, {}}), std::invalid_argument);
}

TEST_CASE("core detection agrees with brute force on random windows") {
    const MetricView& v = model_view();
    std::mt19937 rng(7);
    int with_core = 0, checked = 0;
    while (checked < 100) {
        int lv = 4 + static_cast<int>(rng() % 4);
        ClopenSet w{lv, {}};
        int na = static_cast<int>(v.space(lv).atoms.size());
        for (int i = 0; i < na; ++i)
            if (rng() & 1) w.atoms.insert(i);
        if (w.atoms.empty()) continue;
        ++checked;
        std::vector<int> brute;
        for (int c = 0; c < v.component_count(); ++c) {
            Rat len = v.component_length(c);
            if (len == 0) continue;
            if (!w.atoms.count(v.component_atom(c, lv))) continue;
            if (b_star(v, c, len / 2).contains(w)) brute.push_back(c);
        }
        auto via = find_core(v, w);
        CAPTURE(checked);
        REQUIRE(brute.size() <= 1);
        REQUIRE((brute.size() == 1) == via.has_value());
        if (via) {
            CHECK(via->component == brute.front());
            ++with_core;
        }
    }
    CHECK(checked == 100);
    CHECK(with_core == 12);
}

TEST_CASE("ordering and realization of the model set") {
    const MetricView& v = model_view();
    auto [ord, realized] = km_order(v, 6);

    REQUIRE(ord.components.size() == 85);
    CHECK(std::is_sorted(ord.components.begin(), ord.components.end()));
    CHECK(std::none_of(ord.reversed.begin(), ord.reversed.end(), [](bool b) { return b; }));

    CHECK(realized.pieces.size() == 511);
    CHECK(realized.depth == 6);
    CHECK(realized.hull_lo == 0);
    CHECK(realized.hull_hi == 1);
    int solids = 0, gaps = 0, unres = 0, points = 0;
    for (const auto& p : realized.pieces) {
        if (p.kind == PieceKind::Solid) ++solids;
        if (p.kind == PieceKind::Gap) ++gaps;
        if (p.kind == PieceKind::Unresolved) ++unres;
        if (p.kind == PieceKind::Point) ++points;
    }
    CHECK(solids == 85);
    CHECK(gaps == 170);
    CHECK(unres == 256);
    CHECK(points == 0);

    // every arc keeps its original length up to one common scale
    std::size_t k = 0;
    for (const auto& p : realized.pieces) {
        if (p.kind != PieceKind::Solid) continue;
        CHECK(v.component_length(ord.components[k]) == (p.b - p.a) * R("545/81"));
        ++k;
    }
    CHECK(k == ord.components.size());

    auto again = km_order(v, 6);
    CHECK(again.first == ord);
    REQUIRE(again.second.pieces.size() == realized.pieces.size());
    for (std::size_t i = 0; i < realized.pieces.size(); ++i) {
        CHECK(again.second.pieces[i].a == realized.pieces[i].a);
        CHECK(again.second.pieces[i].kind == realized.pieces[i].kind);
    }
}

TEST_CASE("realized arcs align with the source order under a homeomorphism") {
    const MetricView& v = model_view();
    auto [ord, realized] = km_order(v, 6);

    auto pre = gap_interval_order(PatternSystem::builtin("modelC"), 8);
    std::vector<OrderElement> src;
    for (const auto& e : pre.elements)
        if (e.tag == ElementTag::B) src.push_back(e);
    REQUIRE(src.size() == ord.components.size());

    PartialIso iso;
    std::size_t k = 0;
    for (const auto& p : realized.pieces) {
        if (p.kind != PieceKind::Solid) continue;
        iso.pairs.push_back({OrderElement{ElementTag::B, Address{}, p.a, p.b}, src[k]});
        ++k;
    }
    PLMap h = iso_to_homeo(iso);
    CHECK(h.breakpoints.size() == 172);
    CHECK(h.apply(iso.pairs.front().first.lo) == R("1/2187"));
    CHECK(h.apply(iso.pairs.front().first.hi) == src.front().hi);
}

TEST_CASE("reflection changes nothing the metric can see") {
    MetricView vs(PatternSystem::builtin("SL"), 8);
    MetricView vm(PatternSystem::builtin("SL").mirrored(), 8);
    CHECK(vs.component_count() == 256);
    CHECK(vm.component_count() == 256);
    CHECK(vs.max_level() == 16);

    CHECK(vs.component_length(0) == R("1/3"));
    CHECK(vs.end_open(0, 0));
    CHECK_FALSE(vs.end_open(0, 1));
    int gapped = -1;
    for (int c = 0; c < vs.component_count() && gapped < 0; ++c)
        if (vs.end_open(c, 0) && vs.component_length(c) == R("1/6")) gapped = c;
    CHECK(gapped == 128);

    auto [os, rs] = km_order(vs, 5);
    auto [om, rm] = km_order(vm, 5);
    CHECK(os.components.size() == 256);
    CHECK(om.components.size() == 256);
    CHECK(std::is_sorted(os.components.begin(), os.components.end()));
    CHECK(std::is_sorted(om.components.begin(), om.components.end()));

    auto ls = solid_lengths(rs);
    auto lm = solid_lengths(rm);
    std::reverse(lm.begin(), lm.end());
    CHECK(ls == lm);
}

TEST_CASE("pure dust realizes as alternating unresolved pieces") {
    MetricView vc(PatternSystem::builtin("cantor3"), 8);
    CHECK(vc.component_count() == 0);

    auto [oc, rc] = km_order(vc, 5);
    CHECK(oc.components.empty());
    int solids = 0, gaps = 0, unres = 0;
    for (const auto& p : rc.pieces) {
        if (p.kind == PieceKind::Solid) ++solids;
        if (p.kind == PieceKind::Gap) ++gaps;
        if (p.kind == PieceKind::Unresolved) ++unres;
    }
    CHECK(solids == 0);
    CHECK(gaps == 255);
    CHECK(unres == 256);
    for (std::size_t i = 1; i < rc.pieces.size(); ++i)
        CHECK((rc.pieces[i].kind == PieceKind::Unresolved) !=
              (rc.pieces[i - 1].kind == PieceKind::Unresolved));
}

TEST_CASE("tower members shrink onto the component they carry") {
    const MetricView& v = model_view();
    auto tower = partition_tower(v, 6);

    auto excess = [&](int comp, int n) -> Rat {
        for (const auto& m : tower[static_cast<std::size_t>(n - 1)].members)
            if (m.atoms.count(v.component_atom(comp, m.level)))
                return v.diameter(m) - v.component_length(comp);
        return Rat(-1);
    };
    for (int n = 1; n <= 6; ++n) CHECK(excess(0, n) == R("242/2187"));
    std::vector<const char*> want{"2/9", "2/9", "2/9", "2/9", "2/81", "2/81"};
    for (int n = 1; n <= 6; ++n) CHECK(excess(42, n) == R(want[static_cast<std::size_t>(n - 1)]));
}
