#include "mixedsys/errors.hpp"
#include "mixedsys/projector_topology.hpp"

#include <doctest.h>

#include <random>

using namespace mixedsys;

namespace {

SparseVector e(SparseVector::Index i) { return SparseVector::unit(i); }

// floor(sqrt(a) * 2^p) through the integer square root.
BigInt isqrt_scaled(const Scalar& a, unsigned p) {
    BigInt num = a.get_num() << (2 * p);
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), a.get_den_mpz_t());
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), q.get_mpz_t());
    return r;
}

} // namespace

TEST_CASE("sqrt enclosure") {
    CHECK(sqrt_enclosure(0, 10) == Interval::point(0));
    CHECK(sqrt_enclosure(4, 10) == Interval::point(2));
    CHECK(sqrt_enclosure(Scalar(9, 16), 2) == Interval::point(Scalar(3, 4)));
    const Interval two = sqrt_enclosure(2, 20);
    CHECK(two.width() == pow2(-20));
    CHECK(two.lo * two.lo < 2);
    CHECK(two.hi * two.hi > 2);
    CHECK_THROWS_AS(sqrt_enclosure(-1, 8), InvariantViolation);

    std::mt19937_64 rng(17);
    for (int t = 0; t < 400; ++t) {
        Scalar a(BigInt(static_cast<unsigned long>(rng() % 100000)), BigInt(static_cast<unsigned long>(rng() % 5000 + 1)));
        a.canonicalize();
        if (t % 7 == 0) a *= pow2(static_cast<long>(rng() % 120) - 60);
        const unsigned p = static_cast<unsigned>(rng() % 80 + 1);
        const Interval r = sqrt_enclosure(a, p);
        CAPTURE(a.get_str());
        CHECK(r.lo == Scalar(isqrt_scaled(a, p)) * pow2(-static_cast<long>(p)));
        CHECK(r.width() <= pow2(-static_cast<long>(p)));
        CHECK(r.lo * r.lo <= a);
        CHECK(r.hi * r.hi >= a);
        CHECK(r.contains(sqrt_enclosure(a, 2 * p)));
    }
}

TEST_CASE("project_sigma") {
    const SystemFamily f = make_e1_plus_ek(2);
    CHECK(project_sigma(f, Set::all(), e(1), 2) == SparseVector::from_entries({{1, Scalar(2, 3)}, {2, Scalar(1, 3)}, {3, Scalar(1, 3)}}));
    CHECK(project_sigma(f, Set::none(), e(1), 2).is_zero());
    CHECK(project_sigma(f, Set::finite({2}), f.x(2), 2) == f.x(2));
}

TEST_CASE("metric enclosures") {
    const SystemFamily f = make_e1_plus_ek(24);
    MetricOptions o;
    o.terms = 8;
    o.precision = 40;

    const Interval same = metric_ds(f, Set::residues(2, {1}), Set::residues(2, {1}), 20, o);
    CHECK(same == Interval{0, pow2(-7)});
    CHECK(metric_dw(f, Set::all(), Set::all(), 20, o) == Interval{0, pow2(-7)});

    // Every term is 1 when one side is 0 and the other contains all x_k.
    const Interval full = metric_ds(f, Set::all(), Set::none(), 20, o);
    CHECK(full.contains(Scalar(1)));
    CHECK(full.lo == 1 - pow2(-8));

    const Interval dw = metric_dw(f, Set::all(), Set::none(), 20, o);
    CHECK(dw.lo > Scalar(1, 10));
    CHECK(dw.hi <= full.hi + pow2(-40));

    const std::vector<Set> sets{Set::all(),           Set::none(),          Set::residues(2, {0}), Set::residues(3, {1, 2}),
                                Set::finite({1, 2}), Set::tail(4),         Set::residues(2, {1}).with(2)};
    for (const auto& s : sets) {
        for (const auto& t : sets) {
            const Interval ds = metric_ds(f, s, t, 20, o);
            const Interval dwv = metric_dw(f, s, t, 20, o);
            CHECK(ds == metric_ds_serial(f, s, t, 20, o));
            CHECK(dwv == metric_dw_serial(f, s, t, 20, o));
            CHECK(ds.width() <= pow2(-7) + 8 * pow2(-40));
            CHECK(dwv.width() <= pow2(-7) + 8 * pow2(-40));
            CHECK(dwv.lo <= ds.hi);
            CHECK(dwv.hi <= ds.hi + 8 * pow2(-40));

            MetricOptions fine = o;
            fine.terms = 16;
            fine.precision = 80;
            CHECK(ds.contains(metric_ds(f, s, t, 20, fine)));
            CHECK(dwv.contains(metric_dw(f, s, t, 20, fine)));
        }
    }
    CHECK_THROWS_AS(metric_ds(f, Set::all(), Set::none(), 20, MetricOptions{.terms = 30}), DimensionMismatch);
}

TEST_CASE("separation bound") {
    const SystemFamily ortho = make_young(0, 6);
    for (SparseVector::Index p = 1; p <= 6; ++p) CHECK(separation_bound(ortho, p, 6) == pow2(-2 * static_cast<long>(p)));

    const SystemFamily f = make_e1_plus_ek(8);
    CHECK(separation_bound(f, 1, 3) == Scalar(1, 6));
    for (std::size_t n = 2; n < 8; ++n) CHECK(separation_bound(f, 1, n + 1) <= separation_bound(f, 1, n));

    // <(P - Q) x_p, x_p> = ||x_p - Q x_p||^2 when P x_p = x_p.
    const SystemFamily y = make_young(2, 8);
    for (SparseVector::Index p = 1; p <= 8; ++p) {
        const Set with_p = Set::residues(2, {p % 2}).with(p);
        const Set other = Set::residues(3, {0, 1});
        const SparseVector& xp = y.x(p);
        const SparseVector pp = project_sigma(y, with_p, xp, 8);
        REQUIRE(pp == xp);
        const SparseVector qp = project_sigma(y, other, xp, 8);
        CHECK(dot(pp - qp, xp) == norm_sq(xp - qp));
    }
}

TEST_CASE("intersection chain") {
    const SystemFamily f = make_e1_plus_ek(12);
    const ChainReport all = intersection_chain(f, Set::all(), 6, 12);
    for (std::size_t d : all.h_dims) CHECK(d == 12);
    CHECK(all.equal_to_h_sigma);

    const ChainReport empty = intersection_chain(f, Set::none(), 11, 12, e(1));
    for (std::size_t m = 1; m <= 11; ++m) CHECK(empty.probe_dist_sq[m - 1] == Scalar(1, static_cast<long>(12 - m + 1)));
    CHECK(empty.h_sigma_dim == 0);
    CHECK_FALSE(empty.equal_to_h_sigma);
    for (std::size_t i = 1; i < empty.dims.size(); ++i) CHECK(empty.dims[i] <= empty.dims[i - 1]);
    CHECK(intersection_chain(f, Set::none(), 12, 12).equal_to_h_sigma);

    // Finite dimensions: full-depth chains always land on H_σ.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const long d = static_cast<long>(seed % 5) + 1;
        const SystemFamily b = make_random_finite(d, d, seed, false);
        for (std::uint64_t mask = 0; mask < (1u << d); ++mask) {
            std::vector<SparseVector::Index> members;
            for (long k = 1; k <= d; ++k)
                if (mask >> (k - 1) & 1) members.push_back(static_cast<SparseVector::Index>(k));
            const ChainReport r = intersection_chain(b, Set::finite(members), static_cast<std::size_t>(d), static_cast<std::size_t>(d));
            CHECK(r.equal_to_h_sigma);
            for (std::size_t i = 1; i < r.dims.size(); ++i) CHECK(r.dims[i] <= r.dims[i - 1]);
        }
    }
}

TEST_CASE("sequence rules") {
    CHECK(parse_sequence_rule("tail").kind == SequenceRule::Kind::TailFill);
    CHECK(parse_sequence_rule("prefix").kind == SequenceRule::Kind::Prefix);
    CHECK(parse_sequence_rule(" constant ").kind == SequenceRule::Kind::Constant);
    const SequenceRule ex = parse_sequence_rule("[fin(1);all;res(2;0)]");
    CHECK(ex.length(9) == 3);
    CHECK(ex.at(Set::none(), 2) == Set::all());
    CHECK(ex.name() == "[fin(1);all;res(2;0)]");
    CHECK(SequenceRule{}.at(Set::none(), 3) == Set::tail(4));
    CHECK(parse_sequence_rule("prefix").at(Set::residues(2, {1}), 6) == Set::finite({1, 3, 5}));
    CHECK_THROWS_AS(parse_sequence_rule("tails"), ParseError);
    CHECK_THROWS_AS(parse_sequence_rule("[fin(0)]"), ParseError);
}

TEST_CASE("convergence and semicontinuity") {
    const SystemFamily f = make_e1_plus_ek(30);
    MetricOptions o;
    o.terms = 10;
    o.precision = 48;

    const ConvergenceReport constant = convergence_probe(f, Set::residues(2, {1}), parse_sequence_rule("constant"), 5, 30, 4, o);
    for (const auto& row : constant.rows) {
        CHECK(row.rho == 0);
        CHECK(row.prefix.is_infinite());
        for (const auto& p : row.proxies) CHECK(p == Interval::point(0));
        CHECK(row.ds_to_zero == constant.ds_limit_to_zero);
    }

    // σ = ∅ with σ_m: ρ → 0 exactly, d_s(P_{σ_m}, 0) stays above 1/4.
    const ConvergenceReport jump = convergence_probe(f, Set::none(), SequenceRule{}, 20, 30, 3, o);
    for (const auto& row : jump.rows) {
        CHECK(row.rho == pow2(-static_cast<long>(row.m)));
        CHECK(row.prefix == ExtCount::finite(row.m));
        CHECK(row.ds_to_zero.lo >= Scalar(1, 4));
    }
    CHECK(jump.ds_limit_to_zero == Interval{0, pow2(-9)});

    const SemicontinuityReport s = semicontinuity_probe(f, Set::none(), SequenceRule{}, 20, 30, o);
    CHECK_FALSE(s.violation);
    CHECK(s.jump_up);

    const SemicontinuityReport c = semicontinuity_probe(f, Set::all(), parse_sequence_rule("constant"), 4, 30, o);
    CHECK_FALSE(c.violation);
    CHECK_FALSE(c.jump_up);

    // Basis of R^6: P_{σ_m} = P_σ once m reaches n.
    const SystemFamily b = make_random_finite(6, 6, 9, false);
    MetricOptions ob = o;
    ob.terms = 6;
    const SemicontinuityReport r = semicontinuity_probe(b, Set::residues(2, {0}), SequenceRule{}, 6, 6, ob);
    CHECK_FALSE(r.violation);
    CHECK(r.convergence.rows.back().ds_to_zero == r.convergence.ds_limit_to_zero);
}
