#include "mixedsys/interval.hpp"

#include "mixedsys/errors.hpp"

namespace mixedsys {

namespace {

// ceil(q · 2^bits) / 2^bits
Scalar round_up(const Scalar& q, unsigned bits) {
    BigInt scaled = q.get_num() << bits;
    BigInt c;
    mpz_cdiv_q(c.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    return Scalar(c) * pow2(-static_cast<long>(bits));
}

// floor(q · 2^bits)
BigInt floor_scaled(const Scalar& q, unsigned bits) {
    BigInt scaled = q.get_num() << bits;
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    return f;
}

} // namespace

Interval sqrt_enclosure(const Scalar& a, unsigned precision) {
    if (a < 0) throw InvariantViolation("square root of a negative value");
    if (a == 0) return Interval::point(0);

    // Start above √a: a < 2^{e+1} with e from the bit lengths.
    const long e = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
                   static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 2));
    const long half = (e + 1 >= 0 ? (e + 1) / 2 : -((-(e + 1) + 1) / 2)) + 1;
    Scalar u = pow2(half);

    // Newton steps keep u >= √a (AM-GM) and rounding is upward, so [a/u, u]
    // brackets √a throughout.
    const Scalar target = pow2(-static_cast<long>(precision));
    const unsigned guard = precision + 2;
    for (;;) {
        const Scalar below = a / u;
        if (u - below <= target) break;
        u = round_up((u + below) / 2, guard);
    }

    // floor(√a·2^p) is c or c + 1 where c = floor((a/u)·2^p).
    BigInt c = floor_scaled(a / u, precision);
    const BigInt num4 = a.get_num() << (2 * precision);  // num · 4^p
    auto square_fits = [&](const BigInt& x) { return BigInt(x * x * a.get_den()) <= num4; };
    if (square_fits(c + 1)) c += 1;
    const bool exact = BigInt(c * c * a.get_den()) == num4;

    const Scalar grid = pow2(-static_cast<long>(precision));
    const Scalar lo = Scalar(c) * grid;
    return {lo, exact ? lo : lo + grid};
}

} // namespace mixedsys
