#pragma once

#include <map>
#include <string>
#include <vector>

#include <cantorval/attributes.hpp>
#include <cantorval/pattern.hpp>
#include <cantorval/rational.hpp>

namespace cantorval {

struct ClassReport {
    bool is_cantor_set = false;
    bool is_cantorval = false;
    bool is_l_cantorval = false;
    bool is_r_cantorval = false;
    bool is_special_l = false;
    bool is_left_oriented = false;
    std::map<std::string, Address> witnesses;  // flag name -> violating address
};

enum class GapAdjacency { Interval, Cluster, Point };

struct GapInfo {
    Address address;
    Rat lo = 0;
    Rat hi = 0;
    GapAdjacency right_adjacency = GapAdjacency::Point;
    GapAdjacency left_adjacency = GapAdjacency::Point;
    bool inappropriate = false;
};

struct FreeEndpoint {
    std::string pattern;
    int cell_index = 0;
    Address address;
    bool left_free = false;
    bool right_free = false;
};

ClassReport classify(const PatternSystem& sys);

// one record per solid cell occurrence; freeness refers to the maximal
// component the cell's interval sits in
std::vector<FreeEndpoint> free_endpoint_report(const PatternSystem& sys);

// every gap of expand(sys, depth) with concrete adjacency on both sides,
// ordered by address depth then position
std::vector<GapInfo> inappropriate_gaps(const PatternSystem& sys, int depth);

const char* to_string(GapAdjacency a);

}  // namespace cantorval
