#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "masep/common.hpp"

namespace masep {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

/// Parses "2/3" or "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    // decimal digit-by-digit; leading zeros would otherwise read as octal
    auto parse_int = [](std::string s) {
        bool negative = false;
        std::size_t at = 0;
        if (at < s.size() && (s[at] == '+' || s[at] == '-')) negative = s[at++] == '-';
        if (at == s.size()) throw InvalidArgument("empty integer in rational: " + s);
        BigInt value = 0;
        for (; at < s.size(); ++at) {
            if (s[at] < '0' || s[at] > '9') throw InvalidArgument("bad digit in rational: " + s);
            value = value * 10 + (s[at] - '0');
        }
        return negative ? -value : value;
    };
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_int(text.substr(0, slash));
        BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw InvalidArgument("rational with zero denominator: " + text);
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text));
    BigInt num = parse_int(text.substr(0, dot) + text.substr(dot + 1));
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Rational(num, den);
}

/// First-order truncated polynomial a + b*eps (eps^2 = 0). Enough to read
/// off an exact derivative of a product of entries affine in the variable.
template <class T>
struct Dual {
    T a{};  // value
    T b{};  // derivative

    Dual() = default;
    Dual(T value) : a(std::move(value)) {}
    Dual(T value, T deriv) : a(std::move(value)), b(std::move(deriv)) {}

    friend Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, x.b + y.b}; }
    friend Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, x.b - y.b}; }
    friend Dual operator*(const Dual& x, const Dual& y) {
        return {x.a * y.a, x.a * y.b + x.b * y.a};
    }
    Dual& operator+=(const Dual& y) {
        a += y.a;
        b += y.b;
        return *this;
    }
    Dual& operator-=(const Dual& y) {
        a -= y.a;
        b -= y.b;
        return *this;
    }
    Dual& operator*=(const Dual& y) { return *this = *this * y; }
    friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a && x.b == y.b; }
};

}  // namespace masep
