#include "fencelab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace fencelab {

namespace {

BigInt parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("bad integer: " + s);
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            throw std::invalid_argument("bad integer: " + s);
    return BigInt(s[0] == '+' ? s.substr(1) : s);
}

}  // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_int(text));
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(num, den);
}

std::string format_rational(const Rational& r) {
    BigInt n = boost::multiprecision::numerator(r);
    BigInt d = boost::multiprecision::denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

std::string format_decimal(const Rational& r, int places) {
    BigInt n = boost::multiprecision::numerator(r);
    BigInt d = boost::multiprecision::denominator(r);
    bool neg = n < 0;
    if (neg) n = -n;
    BigInt scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    BigInt scaled = n * scale;
    BigInt q = scaled / d;
    BigInt rem = scaled - q * d;
    BigInt twice = rem * 2;
    if (twice > d || (twice == d && (q % 2) == 1)) q += 1;
    std::string digits = q.str();
    if (static_cast<int>(digits.size()) <= places)
        digits.insert(0, static_cast<std::size_t>(places + 1 - digits.size()), '0');
    std::string out = digits.substr(0, digits.size() - places);
    if (places > 0) out += "." + digits.substr(digits.size() - places);
    if (neg && q != 0) out.insert(0, "-");
    return out;
}

Rational dyadic(long long k, int exponent) {
    BigInt den = 1;
    den <<= exponent;
    return Rational(BigInt(k), den);
}

}  // namespace fencelab
