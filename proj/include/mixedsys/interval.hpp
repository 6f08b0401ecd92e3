#ifndef MIXEDSYS_INTERVAL_HPP
#define MIXEDSYS_INTERVAL_HPP

#include "mixedsys/scalar.hpp"

namespace mixedsys {

/// Closed rational interval [lo, hi] enclosing a (possibly irrational) value.
struct Interval {
    Scalar lo;
    Scalar hi;

    static Interval point(const Scalar& v) { return {v, v}; }

    Scalar width() const { return hi - lo; }
    bool contains(const Scalar& v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

    Interval& operator+=(const Interval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    bool operator==(const Interval&) const = default;
};

inline Interval operator+(Interval a, const Interval& b) { return a += b; }

/// Scaling by a non-negative rational.
inline Interval operator*(const Scalar& s, const Interval& a) { return {s * a.lo, s * a.hi}; }

/// [floor(√a·2^p), ceil(√a·2^p)] / 2^p for a >= 0, found by Newton iteration
/// on a certified bracket and then snapped to the grid exactly. Because the
/// endpoints are the exact grid neighbours of √a, enclosures at higher
/// precision nest inside lower-precision ones. Width is at most 2^{-p}, and
/// zero when √a is on the grid.
Interval sqrt_enclosure(const Scalar& a, unsigned precision);

} // namespace mixedsys

#endif
