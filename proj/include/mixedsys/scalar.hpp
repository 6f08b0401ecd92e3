#ifndef MIXEDSYS_SCALAR_HPP
#define MIXEDSYS_SCALAR_HPP

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>

namespace mixedsys {

// Exact rational. GMP keeps mpq_class canonical after every arithmetic
// operation (lowest terms, positive denominator).
using Scalar = mpq_class;
using BigInt = mpz_class;

/// 2^e for any integer exponent.
Scalar pow2(long e);

/// k^e for e >= 0.
BigInt ipow(unsigned long base, unsigned long e);

/// Always "p/q", including integers ("3/1").
std::string to_string(const Scalar& q);

/// Inverse of to_string. Accepts "p/q" or a bare integer.
Scalar scalar_from_string(const std::string& text);

/// Nearest double, for the approximate CSV columns only.
double approx(const Scalar& q);

/// An element of N ∪ {∞}.
class ExtCount {
public:
    constexpr ExtCount() = default;
    static constexpr ExtCount finite(std::uint64_t n) { return ExtCount(false, n); }
    static constexpr ExtCount infinite() { return ExtCount(true, 0); }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr std::uint64_t value() const { return value_; }

    constexpr bool operator==(const ExtCount&) const = default;
    constexpr std::strong_ordering operator<=>(const ExtCount& o) const {
        if (infinite_ != o.infinite_) return infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
        return value_ <=> o.value_;
    }

    std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

private:
    constexpr ExtCount(bool inf, std::uint64_t v) : infinite_(inf), value_(v) {}
    bool infinite_ = false;
    std::uint64_t value_ = 0;
};

} // namespace mixedsys

#endif
