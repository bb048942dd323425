#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <cantorval/attributes.hpp>
#include <cantorval/pattern.hpp>
#include <cantorval/rational.hpp>

namespace cantorval {

enum class ElementTag { A, B };  // A = gap, B = interval

struct OrderElement {
    ElementTag tag = ElementTag::A;
    Address address;  // at the depth the element was listed
    Rat lo = 0;
    Rat hi = 0;  // exact component extent for B, exact gap for A

    bool operator==(const OrderElement& o) const {
        return tag == o.tag && lo == o.lo && hi == o.hi;
    }
};

struct OrderPrefix {
    explicit OrderPrefix(PatternSystem src) : source(std::move(src)) {}

    PatternSystem source;
    int depth = 0;
    std::vector<OrderElement> elements;  // in line order
    // region i sits before elements[i]; region elements.size() is after the last
    std::vector<bool> more_a_between;
    std::vector<bool> more_b_between;
};

struct PartialIso {
    std::vector<std::pair<OrderElement, OrderElement>> pairs;  // sorted by source lo
    int steps = 0;
};

struct PLMap {
    std::vector<std::pair<Rat, Rat>> breakpoints;  // strictly increasing in x and y
    Rat apply(const Rat& x) const;                 // identity slope beyond extremes
};

struct ConditionsReport {
    bool I = false;
    bool II = false;
    bool III = false;
    std::map<std::string, Address> witnesses;  // "I", "II", "III" for failures
};

OrderPrefix gap_interval_order(const PatternSystem& sys, int depth);
ConditionsReport check_conditions(const PatternSystem& sys, int depth);

// deterministic back-and-forth on gaps and intervals; refuses sources that
// fail the dense-order hypotheses unless unchecked is set
PartialIso back_and_forth(const PatternSystem& x, const PatternSystem& y, int steps,
                          bool unchecked = false);

// gap-only back-and-forth where each matched gap drags along the interval
// immediately to its right
PartialIso special_iso(const PatternSystem& x, const PatternSystem& y, int steps);

// matching snapshots after rounds 1..steps of a single run; snapshot k equals
// the run stopped at k+1 rounds, so convergence can be watched without rerunning
std::vector<PartialIso> back_and_forth_trace(const PatternSystem& x, const PatternSystem& y,
                                             int steps, bool unchecked = false);
std::vector<PartialIso> special_iso_trace(const PatternSystem& x, const PatternSystem& y,
                                          int steps);

PLMap iso_to_homeo(const PartialIso& iso);
PartialIso homeo_to_iso(const PLMap& map, const OrderPrefix& x, const OrderPrefix& y);
PLMap to_model_cantorval(const PatternSystem& x, int steps);

Rat sup_distance(const PLMap& f, const PLMap& g);

}  // namespace cantorval
