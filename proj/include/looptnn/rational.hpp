#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace looptnn {

// Exact arbitrary-precision rational. Everything in this library is computed
// over Q; there is deliberately no floating point anywhere near the core types.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Error with a machine-readable code ("NOT_TNN", "WINDOW", ...).  The CLI maps
// these to exit code 2 and a structured JSON error object.
class domain_error : public std::runtime_error {
public:
    domain_error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail) {
    throw domain_error(code, detail);
}

inline Rat make_rat(long long p, long long q = 1) {
    if (q == 0) fail("BAD_INPUT", "zero denominator");
    return Rat(BigInt(p), BigInt(q));
}

// Parses "p", "-p", or "p/q".  Decimal notation is rejected: the exactness
// contract of the CLI requires all numeric inputs to be rational literals.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) fail("BAD_INPUT", "empty rational literal");
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos)
        fail("BAD_INPUT", "decimal/float literal rejected, use p/q: " + s);
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt p(s.substr(0, slash));
        BigInt q(s.substr(slash + 1));
        if (q == 0) fail("BAD_INPUT", "zero denominator in " + s);
        return Rat(p, q);
    } catch (const std::exception&) {
        fail("BAD_INPUT", "malformed rational literal: " + s);
    }
}

// Canonical form: "p" for integers, "p/q" otherwise.
inline std::string rat_str(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

} // namespace looptnn
