#include <doctest.h>

#include <cantorval/order.hpp>
#include <string>
#include <utility>
#include <vector>

using namespace cantorval;

namespace {

constexpr ElementTag TA = ElementTag::A;
constexpr ElementTag TB = ElementTag::B;

PatternSystem sys(const char* name) { return PatternSystem::builtin(name); }

PatternSystem c5_variant() {
    return PatternSystem::parse(
        "C5 = ref(D5,2/5) bar(1/5) ref(D5,2/5);\n"
        "D5 = ref(C5,2/5) gap(1/5) ref(C5,2/5);\n"
        "root = C5;");
}

struct ElemSpec {
    ElementTag tag;
    const char *lo, *hi, *addr;
};

void check_prefix(const OrderPrefix& p, const std::vector<ElemSpec>& want,
                  const std::vector<std::pair<bool, bool>>& regions) {
    REQUIRE(p.elements.size() == want.size());
    REQUIRE(p.more_a_between.size() == want.size() + 1);
    REQUIRE(p.more_b_between.size() == want.size() + 1);
    REQUIRE(regions.size() == want.size() + 1);
    for (std::size_t i = 0; i < want.size(); ++i) {
        CAPTURE(i);
        const OrderElement& e = p.elements[i];
        CHECK(e.tag == want[i].tag);
        CHECK(e.lo == parse_rat(want[i].lo));
        CHECK(e.hi == parse_rat(want[i].hi));
        CHECK(e.address.to_string() == want[i].addr);
    }
    for (std::size_t r = 0; r < regions.size(); ++r) {
        CAPTURE(r);
        CHECK(p.more_a_between[r] == regions[r].first);
        CHECK(p.more_b_between[r] == regions[r].second);
    }
}

struct PairSpec {
    ElementTag tag;
    const char *xlo, *xhi, *ylo, *yhi;
};

void check_pairs(const PartialIso& iso, const std::vector<PairSpec>& want) {
    REQUIRE(iso.pairs.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CAPTURE(i);
        const auto& [a, b] = iso.pairs[i];
        CHECK(a.tag == want[i].tag);
        CHECK(b.tag == want[i].tag);
        CHECK(a.lo == parse_rat(want[i].xlo));
        CHECK(a.hi == parse_rat(want[i].xhi));
        CHECK(b.lo == parse_rat(want[i].ylo));
        CHECK(b.hi == parse_rat(want[i].yhi));
    }
}

// strictly increasing on both sides with equal tags, which is exactly
// order preservation plus injectivity
void check_sound(const PartialIso& iso) {
    for (std::size_t i = 0; i < iso.pairs.size(); ++i) {
        CAPTURE(i);
        CHECK(iso.pairs[i].first.tag == iso.pairs[i].second.tag);
        if (i == 0) continue;
        CHECK(iso.pairs[i - 1].first.hi <= iso.pairs[i].first.lo);
        CHECK(iso.pairs[i - 1].second.hi <= iso.pairs[i].second.lo);
    }
}

PartialIso one_pair_iso() {
    PartialIso iso;
    OrderElement a{TA, Address{}, parse_rat("1/3"), parse_rat("2/3")};
    OrderElement b{TA, Address{}, parse_rat("1/5"), parse_rat("4/5")};
    iso.pairs.push_back({a, b});
    iso.steps = 1;
    return iso;
}

Rat widest_image_span(const PLMap& f) {
    Rat span = 0;
    for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i)
        span = rat_max(span, f.breakpoints[i + 1].second - f.breakpoints[i].second);
    return span;
}

}  // namespace

TEST_CASE("line order of a dust: gaps only, more gaps in every region") {
    const std::pair<bool, bool> ao{true, false};
    check_prefix(gap_interval_order(sys("cantor3"), 2),
                 {{TA, "1/9", "2/9", "0.1"}, {TA, "1/3", "2/3", "1"}, {TA, "7/9", "8/9", "2.1"}},
                 {ao, ao, ao, ao});
}

TEST_CASE("line order of the model Cantorval: both limit flags everywhere") {
    const std::pair<bool, bool> ab{true, true};
    check_prefix(gap_interval_order(sys("modelC"), 2),
                 {{TA, "1/9", "2/9", "0.1"}, {TB, "1/3", "2/3", "1"}, {TA, "7/9", "8/9", "2.1"}},
                 {ab, ab, ab, ab});
}

TEST_CASE("line order of SL: anchored intervals with quiet flanks") {
    const std::pair<bool, bool> no{false, false}, ab{true, true};
    check_prefix(gap_interval_order(sys("SL"), 2),
                 {{TB, "0", "1/3", "0"},
                  {TA, "3/8", "7/16", "1.2"},
                  {TB, "7/16", "23/48", "1.3"},
                  {TA, "1/2", "3/4", "2"},
                  {TB, "3/4", "11/12", "3"},
                  {TA, "15/16", "31/32", "4.2"},
                  {TB, "31/32", "95/96", "4.3"}},
                 {no, ab, no, ab, no, ab, no, ab});
}

TEST_CASE("line order of the quinary Cantorval at depth 3") {
    const std::pair<bool, bool> ab{true, true};
    check_prefix(gap_interval_order(c5_variant(), 3),
                 {{TB, "8/125", "12/125", "0.0.1"},
                  {TA, "4/25", "6/25", "0.1"},
                  {TB, "38/125", "42/125", "0.2.1"},
                  {TB, "2/5", "3/5", "1"},
                  {TB, "83/125", "87/125", "2.0.1"},
                  {TA, "19/25", "21/25", "2.1"},
                  {TB, "113/125", "117/125", "2.2.1"}},
                 {ab, ab, ab, ab, ab, ab, ab, ab});
}

TEST_CASE("line order of a lone bar, and depth validation") {
    PatternSystem bar = PatternSystem::parse("P = bar(1); root = P;");
    check_prefix(gap_interval_order(bar, 3), {{TB, "0", "1", "0"}}, {{false, false}, {false, false}});
    CHECK_THROWS_AS(gap_interval_order(bar, 0), std::invalid_argument);
}

TEST_CASE("structural conditions across the fixture systems") {
    struct Row {
        const char* name;
        bool I, II, III;
        const char *wI, *wII, *wIII;  // nullptr = no witness
    };
    const Row rows[] = {
        {"cantor3", false, true, true, "1", nullptr, nullptr},
        {"cantor5", false, true, true, "1", nullptr, nullptr},
        {"modelC", false, false, true, "0.1", "1", nullptr},
        {"SL", true, true, true, nullptr, nullptr, nullptr},
        {"SL2", true, true, true, nullptr, nullptr, nullptr},
        {"W", true, true, true, nullptr, nullptr, nullptr},
        {"FL", true, true, false, nullptr, nullptr, "1"},
        {"B1", false, true, false, "1", nullptr, "2.1"},
        {"Binf", false, true, false, "1", nullptr, "2.1"},
    };
    for (const Row& r : rows) {
        CAPTURE(r.name);
        ConditionsReport rep = check_conditions(sys(r.name), 4);
        CHECK(rep.I == r.I);
        CHECK(rep.II == r.II);
        CHECK(rep.III == r.III);
        for (auto [key, w] : {std::pair{"I", r.wI}, {"II", r.wII}, {"III", r.wIII}}) {
            if (w)
                CHECK(rep.witnesses.at(key).to_string() == w);
            else
                CHECK(rep.witnesses.count(key) == 0);
        }
    }
    ConditionsReport c5 = check_conditions(c5_variant(), 4);
    CHECK_FALSE(c5.I);
    CHECK_FALSE(c5.II);
    CHECK(c5.III);
    CHECK(c5.witnesses.at("I").to_string() == "0.1");
    CHECK(c5.witnesses.at("II").to_string() == "1");
}

TEST_CASE("back-and-forth maps a system onto itself identically") {
    PartialIso iso = back_and_forth(sys("cantor3"), sys("cantor3"), 5);
    REQUIRE(iso.pairs.size() == 10);
    const char* gaps[] = {"1/81", "1/27", "7/81", "1/9", "19/81",
                          "7/27", "1/3",  "19/27", "7/9", "25/27"};
    for (std::size_t i = 0; i < 10; ++i) {
        CAPTURE(i);
        CHECK(iso.pairs[i].first == iso.pairs[i].second);
        CHECK(iso.pairs[i].first.tag == TA);
        CHECK(iso.pairs[i].first.lo == parse_rat(gaps[i]));
    }
}

TEST_CASE("back-and-forth pairs the ternary and quinary dusts") {
    check_pairs(back_and_forth(sys("cantor3"), sys("cantor5"), 1),
                {{TA, "1/9", "2/9", "1/25", "4/25"}, {TA, "1/3", "2/3", "1/5", "4/5"}});
    check_pairs(back_and_forth(sys("cantor3"), sys("cantor5"), 3),
                {{TA, "1/27", "2/27", "1/125", "4/125"},
                 {TA, "1/9", "2/9", "1/25", "4/25"},
                 {TA, "7/27", "8/27", "21/125", "24/125"},
                 {TA, "1/3", "2/3", "1/5", "4/5"},
                 {TA, "19/27", "20/27", "101/125", "104/125"},
                 {TA, "7/9", "8/9", "21/25", "24/25"}});
}

TEST_CASE("back-and-forth pairs the two slow systems, intervals included") {
    check_pairs(back_and_forth(sys("SL"), sys("SL2"), 3),
                {{TB, "0", "1/3", "0", "2/5"},
                 {TA, "3/8", "7/16", "5/12", "4/9"},
                 {TB, "7/16", "23/48", "4/9", "29/60"},
                 {TA, "1/2", "3/4", "1/2", "2/3"},
                 {TB, "3/4", "11/12", "2/3", "9/10"},
                 {TA, "15/16", "31/32", "11/12", "17/18"}});
    check_sound(back_and_forth(sys("SL"), sys("SL2"), 30));
}

TEST_CASE("matchings grow conservatively round by round") {
    auto trace = back_and_forth_trace(sys("SL"), sys("SL2"), 12);
    REQUIRE(trace.size() == 12);
    for (int k = 0; k < 12; ++k) {
        CAPTURE(k);
        PartialIso fresh = back_and_forth(sys("SL"), sys("SL2"), k + 1);
        REQUIRE(trace[k].pairs.size() == fresh.pairs.size());
        CHECK(trace[k].steps == k + 1);
        for (std::size_t i = 0; i < fresh.pairs.size(); ++i) {
            CHECK(trace[k].pairs[i].first == fresh.pairs[i].first);
            CHECK(trace[k].pairs[i].second == fresh.pairs[i].second);
        }
        if (k == 0) continue;
        for (const auto& p : trace[k - 1].pairs) {
            bool kept = false;
            for (const auto& q : trace[k].pairs)
                kept = kept || (p.first == q.first && p.second == q.second);
            CHECK(kept);
        }
    }
}

TEST_CASE("back-and-forth screens its sources") {
    CHECK_THROWS_WITH_AS(
        back_and_forth(sys("FL"), sys("cantor3"), 2),
        "back_and_forth: left source fails the dense hypothesis: a greatest gap exists (witness 1)",
        std::invalid_argument);
    CHECK_THROWS_WITH_AS(back_and_forth(sys("cantor3"), sys("modelC"), 2),
                         "back_and_forth: interval elements exist on one side only",
                         std::invalid_argument);
    CHECK_THROWS_AS(back_and_forth(sys("cantor3"), sys("cantor3"), -1), std::invalid_argument);

    // unchecked mode still runs, and identity needs no hypothesis
    PartialIso id = back_and_forth(sys("FL"), sys("FL"), 6, true);
    CHECK(id.pairs.size() == 12);
    for (const auto& [a, b] : id.pairs) CHECK(a == b);
}

TEST_CASE("a gapped dust with no solid cells still matches the ternary dust") {
    PatternSystem dust = PatternSystem::parse("P = ref(P,1/2) gap(1/4) ref(P,1/4); root = P;");
    PartialIso iso = back_and_forth(dust, sys("cantor3"), 25);
    CHECK(iso.pairs.size() == 50);
    check_sound(iso);
}

TEST_CASE("special iso carries each gap with its successor interval") {
    check_pairs(special_iso(sys("SL"), sys("SL2"), 3),
                {{TA, "11/32", "23/64", "29/72", "11/27"},
                 {TB, "23/64", "71/192", "11/27", "149/360"},
                 {TA, "3/8", "7/16", "5/12", "4/9"},
                 {TB, "7/16", "23/48", "4/9", "29/60"},
                 {TA, "31/64", "63/128", "35/72", "53/108"},
                 {TB, "63/128", "191/384", "53/108", "179/360"},
                 {TA, "1/2", "3/4", "1/2", "2/3"},
                 {TB, "3/4", "11/12", "2/3", "9/10"},
                 {TA, "59/64", "119/128", "65/72", "49/54"},
                 {TB, "119/128", "359/384", "49/54", "329/360"},
                 {TA, "15/16", "31/32", "11/12", "17/18"},
                 {TB, "31/32", "95/96", "17/18", "59/60"}});

    // every matched gap short of the maximum drags its successor interval along
    PartialIso iso = special_iso(sys("SL"), sys("SL2"), 10);
    check_sound(iso);
    for (const auto& [ga, gb] : iso.pairs) {
        if (ga.tag != TA || ga.hi >= 1 || gb.hi >= 1) continue;
        bool extended = false;
        for (const auto& [ba, bb] : iso.pairs)
            extended = extended || (ba.tag == TB && ba.lo == ga.hi && bb.lo == gb.hi);
        CHECK(extended);
    }
}

TEST_CASE("special iso of a system with itself is the identity") {
    PartialIso iso = special_iso(sys("SL"), sys("SL"), 4);
    CHECK(iso.pairs.size() == 16);
    for (const auto& [a, b] : iso.pairs) CHECK(a == b);
}

TEST_CASE("special iso refuses systems that fail the conditions") {
    CHECK_THROWS_WITH_AS(special_iso(sys("SL"), sys("modelC"), 2),
                         "special_iso: condition I fails for the right system (witness 0.1)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(special_iso(sys("modelC"), sys("SL"), 2),
                         "special_iso: condition I fails for the left system (witness 0.1)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(special_iso(sys("FL"), sys("SL"), 2),
                         "special_iso: condition III fails for the left system (witness 1)",
                         std::invalid_argument);
}

TEST_CASE("a one-pair matching becomes the documented piecewise-linear map") {
    PLMap f = iso_to_homeo(one_pair_iso());
    REQUIRE(f.breakpoints.size() == 4);
    const char* want[][2] = {{"0", "0"}, {"1/3", "1/5"}, {"2/3", "4/5"}, {"1", "1"}};
    for (int i = 0; i < 4; ++i) {
        CHECK(f.breakpoints[i].first == parse_rat(want[i][0]));
        CHECK(f.breakpoints[i].second == parse_rat(want[i][1]));
    }
    CHECK(f.apply(parse_rat("1/6")) == parse_rat("1/10"));  // slope 3/5 below the gap
    CHECK(f.apply(parse_rat("1/2")) == parse_rat("1/2"));   // gap midpoint to gap midpoint
}

TEST_CASE("an identity matching becomes the identity map") {
    PLMap f = iso_to_homeo(back_and_forth(sys("cantor3"), sys("cantor3"), 5));
    for (const auto& [x, y] : f.breakpoints) CHECK(x == y);
    CHECK(f.apply(parse_rat("1/7")) == parse_rat("1/7"));
}

TEST_CASE("the induced map carries every matched element exactly") {
    PartialIso iso = back_and_forth(sys("SL"), sys("SL2"), 3);
    PLMap f = iso_to_homeo(iso);
    for (const auto& [a, b] : iso.pairs) {
        CHECK(f.apply(a.lo) == b.lo);
        CHECK(f.apply(a.hi) == b.hi);
    }
}

TEST_CASE("degenerate matchings are rejected") {
    CHECK_THROWS_WITH_AS(iso_to_homeo(PartialIso{}), "iso_to_homeo: empty matching",
                         std::invalid_argument);

    PartialIso down;
    down.pairs.push_back({{TA, Address{}, parse_rat("1/3"), parse_rat("2/3")},
                          {TA, Address{}, parse_rat("1/2"), parse_rat("3/4")}});
    down.pairs.push_back({{TA, Address{}, parse_rat("3/4"), parse_rat("5/6")},
                          {TA, Address{}, parse_rat("1/4"), parse_rat("1/3")}});
    CHECK_THROWS_WITH_AS(iso_to_homeo(down), "iso_to_homeo: matching is not increasing at x=3/4",
                         std::invalid_argument);

    PartialIso split;
    split.pairs.push_back({{TA, Address{}, parse_rat("1/3"), parse_rat("2/3")},
                           {TA, Address{}, parse_rat("1/5"), parse_rat("4/5")}});
    split.pairs.push_back({{TB, Address{}, parse_rat("2/3"), parse_rat("3/4")},
                           {TB, Address{}, parse_rat("5/6"), parse_rat("9/10")}});
    CHECK_THROWS_WITH_AS(iso_to_homeo(split), "iso_to_homeo: conflicting images at x=2/3",
                         std::invalid_argument);
}

TEST_CASE("reading a matching back off a map") {
    PLMap id;
    id.breakpoints = {{0, 0}, {1, 1}};
    OrderPrefix mc = gap_interval_order(sys("modelC"), 2);
    PartialIso iso = homeo_to_iso(id, mc, mc);
    REQUIRE(iso.pairs.size() == 3);
    for (const auto& [a, b] : iso.pairs) CHECK(a == b);

    PLMap f = iso_to_homeo(one_pair_iso());
    PartialIso rt = homeo_to_iso(f, gap_interval_order(sys("cantor3"), 1),
                                 gap_interval_order(sys("cantor5"), 1));
    check_pairs(rt, {{TA, "1/3", "2/3", "1/5", "4/5"}});
}

TEST_CASE("maps that cannot come from a matching are rejected") {
    PLMap down;
    down.breakpoints = {{0, 1}, {1, 0}};
    OrderPrefix c3 = gap_interval_order(sys("cantor3"), 1);
    CHECK_THROWS_WITH_AS(homeo_to_iso(down, c3, c3), "homeo_to_iso: map is not strictly increasing",
                         std::invalid_argument);

    PLMap id;
    id.breakpoints = {{0, 0}, {1, 1}};
    CHECK_THROWS_WITH_AS(homeo_to_iso(id, c3, gap_interval_order(sys("cantor5"), 1)),
                         "homeo_to_iso: image of the element at 1 straddles the target pieces",
                         std::runtime_error);
}

TEST_CASE("the quinary Cantorval is carried onto the model") {
    PatternSystem c5 = c5_variant();
    PLMap f = to_model_cantorval(c5, 40);
    CHECK(f.breakpoints.size() == 162);

    OrderPrefix px = gap_interval_order(c5, 3);
    OrderPrefix py = gap_interval_order(sys("modelC"), 3);
    REQUIRE(px.elements.size() == 7);
    REQUIRE(py.elements.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CAPTURE(i);
        CHECK(px.elements[i].tag == py.elements[i].tag);
        CHECK(f.apply(px.elements[i].lo) == py.elements[i].lo);
        CHECK(f.apply(px.elements[i].hi) == py.elements[i].hi);
    }
    CHECK(homeo_to_iso(f, px, py).pairs.size() == 7);
}

TEST_CASE("the model is carried onto itself identically") {
    PLMap f = to_model_cantorval(sys("modelC"), 8);
    CHECK(f.breakpoints.size() == 34);
    for (const auto& [x, y] : f.breakpoints) CHECK(x == y);
}

TEST_CASE("systems outside the mapping theorem are turned away") {
    CHECK_THROWS_WITH_AS(to_model_cantorval(sys("SL"), 3),
                         "to_model_cantorval: interval at 0 has a free endpoint",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(to_model_cantorval(sys("cantor3"), 3),
                         "to_model_cantorval: system is not a Cantorval (witness 1)",
                         std::invalid_argument);
}

TEST_CASE("sup distance between refinement stages shrinks") {
    auto trace = back_and_forth_trace(sys("cantor3"), sys("cantor5"), 13);
    const char* chain[] = {"2/75",   "2/375",  "2/375",  "2/1875", "2/1875", "2/1875",
                           "2/1875", "2/9375", "2/9375", "2/9375", "2/9375", "2/9375"};
    for (int k = 0; k + 1 < 13; ++k) {
        CAPTURE(k);
        CHECK(sup_distance(iso_to_homeo(trace[k]), iso_to_homeo(trace[k + 1])) ==
              parse_rat(chain[k]));
    }
}

TEST_CASE("sup distance is monotone over long runs of both fixture pairs") {
    auto run = [](const char* a, const char* b) {
        auto trace = back_and_forth_trace(sys(a), sys(b), 60);
        Rat last(-1);
        PLMap prev;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            PLMap cur = iso_to_homeo(trace[k]);
            if (k > 0) {
                Rat d = sup_distance(prev, cur);
                if (last >= 0) CHECK(d <= last);
                last = d;
            }
            prev = std::move(cur);
        }
    };
    run("cantor3", "cantor5");
    run("SL", "SL2");
}

TEST_CASE("stage distance is bounded by the widest unmatched span, which shrinks") {
    auto run = [](std::vector<PartialIso> trace) {
        Rat last_bound(-1);
        for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
            CAPTURE(k);
            PLMap f = iso_to_homeo(trace[k]);
            PLMap g = iso_to_homeo(trace[k + 1]);
            Rat bound = widest_image_span(f);
            CHECK(sup_distance(f, g) <= bound);
            if (last_bound >= 0) CHECK(bound <= last_bound);
            last_bound = bound;
        }
    };
    run(special_iso_trace(sys("SL"), sys("SL2"), 40));
    run(back_and_forth_trace(sys("cantor3"), sys("cantor5"), 40));
}

TEST_CASE("sup distance is symmetric and vanishes on equal maps") {
    PLMap f = iso_to_homeo(one_pair_iso());
    PLMap id;
    id.breakpoints = {{0, 0}, {1, 1}};
    CHECK(sup_distance(f, f) == 0);
    CHECK(sup_distance(f, id) == sup_distance(id, f));
    CHECK(sup_distance(f, id) == parse_rat("2/15"));  // attained at x=1/3
}