#ifndef CANTORVAL_PATTERN_HPP
#define CANTORVAL_PATTERN_HPP

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cantorval/rational.hpp"

namespace cantorval {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
};

struct ValidationError : std::runtime_error {
    std::string pattern;  // offending pattern name, empty for system-level rules
    std::string rule;     // stable rule id, e.g. "length-sum"
    ValidationError(const std::string& what, std::string pattern_, std::string rule_)
        : std::runtime_error(what), pattern(std::move(pattern_)), rule(std::move(rule_)) {}
};

enum class CellKind { Solid, Gap, Point, Ref };

struct Cell {
    CellKind kind;
    Rat length;          // scale factor for Ref; 0 for Point
    std::string target;  // Ref only

    static Cell solid(Rat len) { return {CellKind::Solid, std::move(len), {}}; }
    static Cell gap(Rat len) { return {CellKind::Gap, std::move(len), {}}; }
    static Cell point() { return {CellKind::Point, Rat(0), {}}; }
    static Cell ref(std::string target, Rat scale) {
        return {CellKind::Ref, std::move(scale), std::move(target)};
    }
    bool operator==(const Cell&) const = default;
};

struct PatternBody {
    std::vector<Cell> cells;
    bool operator==(const PatternBody&) const = default;
};

// Chain of cell indices from the root body, following refs.
struct Address {
    std::vector<int> path;

    Address() = default;
    explicit Address(std::vector<int> p) : path(std::move(p)) {}

    Address child(int index) const {
        Address out = *this;
        out.path.push_back(index);
        return out;
    }
    std::size_t depth() const { return path.size(); }
    std::string to_string() const;
    static Address parse(const std::string& text);

    bool operator==(const Address&) const = default;
    auto operator<=>(const Address&) const = default;
};

class PatternSystem {
  public:
    // Parses and validates; throws ParseError / ValidationError.
    static PatternSystem parse(const std::string& text);
    // One of: cantor3, cantor5, modelC, SL, SL2, FL, W, B1, Binf.
    static PatternSystem builtin(const std::string& name);
    static PatternSystem from_parts(std::vector<std::pair<std::string, PatternBody>> defs,
                                    std::string root);

    const PatternBody& body(const std::string& name) const;
    const PatternBody& root_body() const { return body(root_); }
    const std::string& root() const { return root_; }
    bool has_pattern(const std::string& name) const { return patterns_.count(name) != 0; }
    // Definition order, root's system text order.
    const std::vector<std::string>& names() const { return order_; }

    PatternSystem mirrored() const;
    std::string to_dsl() const;

    bool operator==(const PatternSystem& other) const {
        return order_ == other.order_ && patterns_ == other.patterns_ && root_ == other.root_;
    }

  private:
    PatternSystem() = default;
    void validate() const;

    std::map<std::string, PatternBody> patterns_;
    std::vector<std::string> order_;
    std::string root_;
};

std::string format_cell(const Cell& cell);

}  // namespace cantorval

#endif
