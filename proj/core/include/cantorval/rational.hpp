#ifndef CANTORVAL_RATIONAL_HPP
#define CANTORVAL_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cantorval {

// All interval arithmetic is exact; doubles appear only at render time.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline Rat rat(long long p, long long q = 1) { return Rat(p, q); }

// Accepts "p", "-p", "p/q". Throws std::invalid_argument on anything else.
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool ok = (c >= '0' && c <= '9') || c == '/' || (c == '-' && i == 0);
        if (!ok) throw std::invalid_argument("bad rational literal: " + text);
    }
    auto slash = text.find('/');
    if (slash != std::string::npos &&
        (slash == 0 || slash + 1 == text.size() || text.find('/', slash + 1) != std::string::npos))
        throw std::invalid_argument("bad rational literal: " + text);
    try {
        return Rat(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
}

// "p/q" with q omitted when 1; matches the JSON schema for endpoints.
inline std::string format_rat(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

inline double to_double(const Rat& r) { return static_cast<double>(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Largest integer n with n <= r.
inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (r < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

// 2^-k etc. without pow() noise at call sites.
inline Rat pow_rat(const Rat& base, unsigned exp) {
    Rat out = 1;
    for (unsigned i = 0; i < exp; ++i) out *= base;
    return out;
}

}  // namespace cantorval

#endif
