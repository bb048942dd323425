#include "cantorval/pattern.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace cantorval {

std::string Address::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(path[i]);
    }
    return out;
}

Address Address::parse(const std::string& text) {
    Address out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        std::string part = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad address: " + text);
        out.path.push_back(std::stoi(part));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return out;
}

namespace {

struct Token {
    enum Kind { Ident, Number, Symbol, End } kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_space();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Token::End, "", line, col};
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                word += advance();
            return {Token::Ident, word, line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits += advance();
            return {Token::Number, digits, line, col};
        }
        if (std::string("=;(),/").find(c) != std::string::npos)
            return {Token::Symbol, std::string(1, advance()), line, col};
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

  private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(const std::string& src) : lexer_(src) { shift(); }

    void run(std::vector<std::pair<std::string, PatternBody>>& defs, std::string& root) {
        while (cur_.kind != Token::End) {
            if (cur_.kind != Token::Ident)
                throw ParseError("expected pattern name or 'root'", cur_.line, cur_.col);
            std::string name = cur_.text;
            shift();
            expect_symbol("=");
            if (name == "root" && cur_.kind == Token::Ident && peek_is_decl_end()) {
                if (!root.empty()) throw ParseError("duplicate root declaration", cur_.line, cur_.col);
                root = cur_.text;
                shift();
                expect_symbol(";");
                continue;
            }
            PatternBody body;
            while (!(cur_.kind == Token::Symbol && cur_.text == ";")) body.cells.push_back(cell());
            expect_symbol(";");
            defs.emplace_back(std::move(name), std::move(body));
        }
        if (root.empty()) throw ParseError("missing root declaration", cur_.line, cur_.col);
    }

  private:
    bool peek_is_decl_end() {
        // after "root =" an identifier must be followed by ';'
        Lexer probe = lexer_;
        Token after = probe.next();
        return after.kind == Token::Symbol && after.text == ";";
    }

    Cell cell() {
        if (cur_.kind != Token::Ident)
            throw ParseError("expected cell (bar/gap/pt/ref)", cur_.line, cur_.col);
        std::string head = cur_.text;
        shift();
        if (head == "pt") return Cell::point();
        if (head == "bar" || head == "gap") {
            expect_symbol("(");
            Rat len = frac();
            expect_symbol(")");
            return head == "bar" ? Cell::solid(len) : Cell::gap(len);
        }
        if (head == "ref") {
            expect_symbol("(");
            if (cur_.kind != Token::Ident)
                throw ParseError("expected pattern name in ref", cur_.line, cur_.col);
            std::string target = cur_.text;
            shift();
            expect_symbol(",");
            Rat scale = frac();
            expect_symbol(")");
            return Cell::ref(target, scale);
        }
        throw ParseError("unknown cell '" + head + "'", cur_.line, cur_.col);
    }

    Rat frac() {
        if (cur_.kind != Token::Number) throw ParseError("expected number", cur_.line, cur_.col);
        Int num(cur_.text);
        shift();
        if (cur_.kind == Token::Symbol && cur_.text == "/") {
            shift();
            if (cur_.kind != Token::Number)
                throw ParseError("expected denominator", cur_.line, cur_.col);
            Int den(cur_.text);
            if (den == 0) throw ParseError("zero denominator", cur_.line, cur_.col);
            shift();
            return Rat(num, den);
        }
        return Rat(num);
    }

    void expect_symbol(const std::string& s) {
        if (cur_.kind != Token::Symbol || cur_.text != s)
            throw ParseError("expected '" + s + "'", cur_.line, cur_.col);
        shift();
    }
    void shift() { cur_ = lexer_.next(); }

    Lexer lexer_;
    Token cur_;
};

const char* fixture_text(const std::string& name) {
    if (name == "cantor3") return "C = ref(C,1/3) gap(1/3) ref(C,1/3); root = C;";
    if (name == "cantor5") return "C = ref(C,1/5) gap(3/5) ref(C,1/5); root = C;";
    if (name == "modelC")
        return "C = ref(D,1/3) bar(1/3) ref(D,1/3); D = ref(C,1/3) gap(1/3) ref(C,1/3); root = C;";
    if (name == "SL") return "S = bar(1/4) ref(S,1/4) gap(1/4) bar(1/8) ref(S,1/8); root = S;";
    if (name == "SL2") return "S = bar(1/3) ref(S,1/6) gap(1/6) bar(1/6) ref(S,1/6); root = S;";
    if (name == "FL") return "F = ref(F,1/4) gap(1/4) bar(1/2); root = F;";
    if (name == "W") return "W = ref(W,1/4) gap(1/8) bar(1/8) ref(W,1/2); root = W;";
    if (name == "B1")
        return "B = ref(SL,1/3) gap(1/3) ref(FL,1/3);"
               " SL = bar(1/4) ref(SL,1/4) gap(1/4) bar(1/8) ref(SL,1/8);"
               " FL = ref(FL,1/4) gap(1/4) bar(1/2); root = B;";
    if (name == "Binf")
        return "B = ref(SL,1/4) gap(1/4) ref(FL,1/4) ref(B,1/4);"
               " SL = bar(1/4) ref(SL,1/4) gap(1/4) bar(1/8) ref(SL,1/8);"
               " FL = ref(FL,1/4) gap(1/4) bar(1/2); root = B;";
    return nullptr;
}

}  // namespace

PatternSystem PatternSystem::parse(const std::string& text) {
    std::vector<std::pair<std::string, PatternBody>> defs;
    std::string root;
    Parser(text).run(defs, root);
    return from_parts(std::move(defs), std::move(root));
}

PatternSystem PatternSystem::builtin(const std::string& name) {
    const char* text = fixture_text(name);
    if (!text) throw std::invalid_argument("unknown fixture: " + name);
    return parse(text);
}

PatternSystem PatternSystem::from_parts(std::vector<std::pair<std::string, PatternBody>> defs,
                                        std::string root) {
    PatternSystem sys;
    for (auto& [name, body] : defs) {
        if (!sys.patterns_.emplace(name, std::move(body)).second)
            throw ValidationError("pattern '" + name + "' defined twice", name, "redefinition");
        sys.order_.push_back(name);
    }
    sys.root_ = std::move(root);
    sys.validate();
    return sys;
}

const PatternBody& PatternSystem::body(const std::string& name) const {
    auto it = patterns_.find(name);
    if (it == patterns_.end()) throw std::invalid_argument("no pattern named " + name);
    return it->second;
}

void PatternSystem::validate() const {
    if (!patterns_.count(root_))
        throw ValidationError("root pattern '" + root_ + "' is not defined", root_, "undefined-root");
    for (const auto& name : order_) {
        const auto& cells = patterns_.at(name).cells;
        if (cells.empty())
            throw ValidationError("pattern '" + name + "' has an empty body", name, "empty-body");
        Rat total = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Cell& c = cells[i];
            switch (c.kind) {
                case CellKind::Point:
                    break;
                case CellKind::Solid:
                case CellKind::Gap:
                    if (c.length <= 0)
                        throw ValidationError("pattern '" + name + "' has a non-positive cell length",
                                              name, "nonpositive-length");
                    break;
                case CellKind::Ref:
                    if (c.length <= 0)
                        throw ValidationError("pattern '" + name + "' has a non-positive ref scale",
                                              name, "nonpositive-length");
                    if (c.length >= 1)
                        throw ValidationError(
                            "pattern '" + name + "' has a non-contractive ref (scale >= 1)", name,
                            "non-contractive-ref");
                    if (!patterns_.count(c.target))
                        throw ValidationError(
                            "pattern '" + name + "' refs undefined pattern '" + c.target + "'",
                            name, "undefined-ref");
                    break;
            }
            total += c.length;
            if (c.kind == CellKind::Gap) {
                if (i == 0)
                    throw ValidationError("pattern '" + name + "' starts with a gap cell", name,
                                          "leading-gap");
                if (i + 1 == cells.size())
                    throw ValidationError("pattern '" + name + "' ends with a gap cell", name,
                                          "trailing-gap");
                if (cells[i - 1].kind == CellKind::Gap)
                    throw ValidationError("pattern '" + name + "' has adjacent gap cells", name,
                                          "adjacent-gaps");
            }
        }
        if (total != 1)
            throw ValidationError("pattern '" + name + "' cell lengths sum to " + format_rat(total) +
                                      ", expected 1",
                                  name, "length-sum");
    }
    std::set<std::string> seen{root_};
    std::vector<std::string> queue{root_};
    while (!queue.empty()) {
        std::string name = std::move(queue.back());
        queue.pop_back();
        for (const Cell& c : patterns_.at(name).cells)
            if (c.kind == CellKind::Ref && seen.insert(c.target).second) queue.push_back(c.target);
    }
    for (const auto& name : order_)
        if (!seen.count(name))
            throw ValidationError("pattern '" + name + "' is unreachable from root", name,
                                  "unreachable-pattern");
}

PatternSystem PatternSystem::mirrored() const {
    PatternSystem sys;
    sys.order_ = order_;
    sys.root_ = root_;
    for (const auto& [name, body] : patterns_) {
        PatternBody rev;
        rev.cells.assign(body.cells.rbegin(), body.cells.rend());
        sys.patterns_.emplace(name, std::move(rev));
    }
    sys.validate();
    return sys;
}

std::string format_cell(const Cell& cell) {
    switch (cell.kind) {
        case CellKind::Solid: return "bar(" + format_rat(cell.length) + ")";
        case CellKind::Gap: return "gap(" + format_rat(cell.length) + ")";
        case CellKind::Point: return "pt";
        case CellKind::Ref: return "ref(" + cell.target + "," + format_rat(cell.length) + ")";
    }
    return {};
}

std::string PatternSystem::to_dsl() const {
    std::ostringstream os;
    for (const auto& name : order_) {
        os << name << " =";
        for (const Cell& c : patterns_.at(name).cells) os << ' ' << format_cell(c);
        os << ";\n";
    }
    os << "root = " << root_ << ";\n";
    return os.str();
}

}  // namespace cantorval
