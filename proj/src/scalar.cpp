#include "mixedsys/scalar.hpp"

#include "mixedsys/errors.hpp"

#include <cctype>

namespace mixedsys {

Scalar pow2(long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return Scalar(p);
    Scalar q(BigInt(1), p);
    q.canonicalize();
    return q;
}

BigInt ipow(unsigned long base, unsigned long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), base, e);
    return p;
}

std::string to_string(const Scalar& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Scalar scalar_from_string(const std::string& text) {
    auto is_int = [](const std::string& s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && i < s.size() && s[i] == '-') ++i;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    const auto slash = text.find('/');
    const std::string num = text.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!is_int(num, true) || !is_int(den, false)) throw ParseError("not a rational: '" + text + "'");
    BigInt d(den);
    if (d == 0) throw ParseError("zero denominator: '" + text + "'");
    Scalar q(BigInt(num), d);
    q.canonicalize();
    return q;
}

double approx(const Scalar& q) { return q.get_d(); }

} // namespace mixedsys
