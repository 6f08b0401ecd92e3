#include "mixedsys/errors.hpp"
#include "mixedsys/exact_core.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace mixedsys;
using V = SparseVector;

namespace {

std::vector<V> e1_plus_ek(std::size_t first, std::size_t last) {
    std::vector<V> out;
    for (std::size_t k = first; k <= last; ++k) out.push_back(V::unit(1) + V::unit(k));
    return out;
}

Scalar q(long n, long d) {
    Scalar r(n, d);
    r.canonicalize();
    return r;
}

} // namespace

TEST_CASE("gram: worked examples") {
    CHECK(gram(std::vector{V::unit(1), V::unit(2)}) == ExactMatrix::identity(2));
    CHECK(gram(std::vector{V::from_dense({1, 1, 0}), V::from_dense({1, 0, 1})}) == ExactMatrix{{2, 1}, {1, 2}});

    // Young vectors with two f-coordinates: x_1 = 2f_1 + e_1, x_2 = 4f_1 + 2f_2 + e_2,
    // laid out as (f_1, f_2, e_1, e_2).
    const V x1 = V::from_dense({2, 0, 1, 0});
    const V x2 = V::from_dense({4, 2, 0, 1});
    CHECK(gram(std::vector{x1, x2}) == ExactMatrix{{5, 8}, {8, 21}});
}

TEST_CASE("gram: parallel kernel matches serial reference") {
    std::mt19937_64 rng(11);
    std::vector<V> vs;
    for (int i = 0; i < 40; ++i) vs.push_back(oracle::random_vector(rng, 12));
    const ExactMatrix g = gram(vs);
    CHECK(g == gram_serial(vs));
    CHECK(g.is_symmetric());
}

TEST_CASE("rank: worked examples") {
    CHECK(rank(ExactMatrix::identity(3)) == 3);
    CHECK(rank(ExactMatrix{{1, 2}, {2, 4}}) == 1);
    CHECK(rank(gram(std::vector{V::from_dense({1, 1}), V::unit(2), V::unit(1)})) == 2);
    CHECK(rank(ExactMatrix(0, 0)) == 0);
    CHECK(rank(ExactMatrix(3, 4)) == 0);
}

TEST_CASE("rank: fraction-free elimination agrees with rational Gauss-Jordan") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t ambient = 1 + rng() % 7;
        const std::size_t n = 1 + rng() % 8;
        std::vector<V> vs;
        for (std::size_t i = 0; i < n; ++i) vs.push_back(oracle::random_vector(rng, ambient, 0.5));
        // Force some dependence.
        if (n >= 3 && trial % 2 == 0) vs[2] = Scalar(3) * vs[0] - vs[1];
        const std::size_t expected = oracle::rank(vs, ambient);
        CHECK(span_rank(vs) == expected);
        CHECK(rank(gram(vs)) == expected);
        CHECK(ambient - complement_basis(vs, ambient).size() == expected);
    }
}

TEST_CASE("leading principal minors of Gram matrices are nonnegative") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<V> vs;
        const std::size_t n = 1 + rng() % 6;
        for (std::size_t i = 0; i < n; ++i) vs.push_back(oracle::random_vector(rng, 4));
        for (const auto& m : leading_principal_minors(gram(vs))) CHECK(m >= 0);
    }
    const auto m = leading_principal_minors(ExactMatrix{{2, 1}, {1, 2}});
    CHECK(m[0] == 2);
    CHECK(m[1] == 3);
}

TEST_CASE("project_coefficients: worked examples") {
    CHECK(project_coefficients(V::unit(1), std::vector{V::from_dense({1, 1})}) == std::vector<Scalar>{q(1, 2)});
    const std::vector gens{V::from_dense({1, 1, 0}), V::from_dense({1, 0, 1})};
    CHECK(project_coefficients(V::unit(1), gens) == std::vector<Scalar>{q(1, 3), q(1, 3)});

    const V inside = Scalar(2) * gens[0] - gens[1];
    const auto c = project_coefficients(inside, gens);
    CHECK(c == std::vector<Scalar>{2, -1});
    CHECK(project(inside, gens) == inside);
}

TEST_CASE("project_coefficients: dependent generators are rejected") {
    const std::vector gens{V::from_dense({1, 1}), V::from_dense({2, 2})};
    CHECK_THROWS_AS(project_coefficients(V::unit(1), gens), DependentGenerators);
    // dist_sq prunes instead.
    CHECK(dist_sq(V::unit(1), gens) == q(1, 2));
}

TEST_CASE("dist_sq: worked examples") {
    CHECK(dist_sq(V::unit(1), std::vector{V::unit(2)}) == 1);
    CHECK(dist_sq(V::unit(1), std::vector<V>{}) == 1);
    CHECK(dist_sq(V{}, std::vector{V::unit(2)}) == 0);

    // e_1 against q vectors e_1 + e_k: 1/(q+1); hand check at q = 2 gives 1/3.
    CHECK(dist_sq(V::unit(1), e1_plus_ek(2, 3)) == q(1, 3));
    for (std::size_t qn = 1; qn <= 12; ++qn) {
        const auto gens = e1_plus_ek(2, qn + 1);
        CHECK(oracle::dist_sq(V::unit(1), gens, qn + 1) == q(1, static_cast<long>(qn) + 1));
        CHECK(dist_sq(V::unit(1), gens) == q(1, static_cast<long>(qn) + 1));
    }
    // x_2 = e_1 + e_3 against x_3..x_{q+2}: 1 + 1/(q+1).
    CHECK(dist_sq(V::unit(1) + V::unit(3), e1_plus_ek(4, 4)) == q(3, 2));
    for (std::size_t qn = 1; qn <= 10; ++qn) {
        const auto gens = e1_plus_ek(4, qn + 3);
        CHECK(dist_sq(V::unit(1) + V::unit(3), gens) == 1 + q(1, static_cast<long>(qn) + 1));
    }
}

TEST_CASE("complement_basis: worked examples") {
    auto c = complement_basis(std::vector{V::unit(1), V::unit(2)}, 3);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == V::unit(3));

    c = complement_basis(std::vector{V::from_dense({1, 1, 0}), V::from_dense({1, 0, 1})}, 3);
    REQUIRE(c.size() == 1);
    CHECK((c[0] == V::from_dense({1, -1, -1}) || c[0] == V::from_dense({-1, 1, 1})));

    CHECK(complement_basis(std::vector{V::unit(1), V::unit(2), V::from_dense({1, 1, 1})}, 3).empty());
    CHECK(complement_basis(std::vector<V>{}, 2).size() == 2);
    CHECK_THROWS_AS(complement_basis(std::vector{V::unit(4)}, 3), DimensionMismatch);
}

TEST_CASE("intersect: worked examples") {
    auto r = intersect(std::vector{V::unit(1), V::unit(2)}, std::vector{V::unit(2), V::unit(3)}, 3);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == V::unit(2));

    CHECK(intersect(std::vector{V::unit(1)}, std::vector{V::unit(2)}, 2).empty());

    r = intersect(std::vector{V::from_dense({1, 1, 0}), V::unit(3)}, std::vector{V::from_dense({1, 1, 1})}, 3);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == V::from_dense({1, 1, 1}));
}

TEST_CASE("intersect agrees with a joint-nullspace oracle for ambient <= 6") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t ambient = 1 + rng() % 6;
        std::vector<V> a, b;
        const std::size_t na = rng() % (ambient + 1), nb = rng() % (ambient + 1);
        for (std::size_t i = 0; i < na; ++i) a.push_back(oracle::random_vector(rng, ambient, 0.6));
        for (std::size_t i = 0; i < nb; ++i) b.push_back(oracle::random_vector(rng, ambient, 0.6));

        // Solve sum alpha_i a_i - sum beta_j b_j = 0; the intersection is
        // spanned by sum alpha_i a_i over the nullspace.
        oracle::Dense sys(ambient, std::vector<Scalar>(na + nb));
        for (std::size_t c = 0; c < ambient; ++c) {
            for (std::size_t i = 0; i < na; ++i) sys[c][i] = a[i].at(c + 1);
            for (std::size_t j = 0; j < nb; ++j) sys[c][na + j] = -b[j].at(c + 1);
        }
        const auto piv = oracle::rref(sys);
        std::vector<V> expected;
        for (std::size_t f = 0; f < na + nb; ++f) {
            if (std::find(piv.begin(), piv.end(), f) != piv.end()) continue;
            std::vector<Scalar> coef(na + nb);
            coef[f] = 1;
            for (std::size_t r = 0; r < piv.size(); ++r) coef[piv[r]] = -sys[r][f];
            V w;
            for (std::size_t i = 0; i < na; ++i) w.axpy(coef[i], a[i]);
            expected.push_back(w);
        }
        const auto got = intersect(a, b, ambient);
        const std::size_t re = oracle::rank(expected, ambient);
        CHECK(got.size() == re);
        auto joint = got;
        joint.insert(joint.end(), expected.begin(), expected.end());
        CHECK(oracle::rank(joint, ambient) == re);
    }
}

TEST_CASE("projection properties on random rational instances") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t ambient = 1 + rng() % 6;
        const std::size_t n = rng() % 5;
        std::vector<V> gens;
        for (std::size_t i = 0; i < n; ++i) gens.push_back(oracle::random_vector(rng, ambient));
        const V v = oracle::random_vector(rng, ambient);

        const auto basis = independent_subset(gens);
        const V p = project(v, basis);
        const Scalar d = dist_sq(v, gens);

        // Pythagoras and idempotence, exactly.
        CHECK(norm_sq(v) == norm_sq(p) + d);
        CHECK(project(p, basis) == p);
        CHECK(d == oracle::dist_sq(v, gens, ambient));

        // Membership test.
        auto with_v = gens;
        with_v.push_back(v);
        CHECK((d == 0) == (span_rank(with_v) == span_rank(gens)));

        // Adding a generator never increases the distance.
        const Scalar d2 = dist_sq(v, with_v.size() > 0 ? std::vector<V>(with_v.begin(), with_v.end() - 1) : gens);
        auto more = gens;
        more.push_back(oracle::random_vector(rng, ambient));
        CHECK(dist_sq(v, more) <= d2);
    }
}

TEST_CASE("GramEliminator: incremental distances match from-scratch ones") {
    std::mt19937_64 rng(77);
    GramEliminator elim;
    std::vector<V> gens;
    const V probe = oracle::random_vector(rng, 9, 1.0);
    Scalar last = norm_sq(probe);
    for (int i = 0; i < 12; ++i) {
        V g = oracle::random_vector(rng, 9);
        if (i == 5) g = gens[0] + gens[1];
        const std::size_t before = oracle::rank(gens, 9);
        const bool kept = elim.add(g);
        gens.push_back(g);
        CHECK(kept == (oracle::rank(gens, 9) > before));
        CHECK(elim.rank() == oracle::rank(gens, 9));
        const Scalar d = elim.dist_sq(probe);
        CHECK(d == oracle::dist_sq(probe, gens, 9));
        CHECK(d <= last);
        last = d;
    }
}

TEST_CASE("digit budget aborts runaway elimination") {
    std::vector<V> gens;
    for (int k = 1; k <= 12; ++k) {
        V v;
        for (int j = 1; j <= 12; ++j) v.axpy(Scalar(ipow(static_cast<unsigned long>(k), static_cast<unsigned long>(j))), V::unit(static_cast<std::size_t>(j)));
        gens.push_back(v);
    }
    CHECK_THROWS_AS(dist_sq(V::unit(1), gens, ExactOptions{64}), BudgetExceeded);
    CHECK_THROWS_AS(span_rank(gens, ExactOptions{32}), BudgetExceeded);
    CHECK_NOTHROW(dist_sq(V::unit(1), gens));
}

TEST_CASE("sparse vector canonical form") {
    const V v = V::from_entries({{3, Scalar(1)}, {1, Scalar(2)}, {3, Scalar(-1)}, {2, Scalar(0)}});
    REQUIRE(v.nnz() == 1);
    CHECK(v.entries()[0].index == 1);
    CHECK((V::unit(2) - V::unit(2)).is_zero());
    CHECK(primitive(V::from_dense({0, 0})).is_zero());
    const V p = primitive(Scalar(q(2, 3)) * V::from_dense({3, -6, 9}));
    CHECK(p == V::from_dense({1, -2, 3}));
    CHECK(to_string(q(-4, 6)) == "-2/3");
    CHECK(to_string(Scalar(5)) == "5/1");
    CHECK(scalar_from_string("-2/3") == q(-2, 3));
    CHECK(scalar_from_string("7") == 7);
    CHECK_THROWS_AS(scalar_from_string("1/0"), ParseError);
    CHECK_THROWS_AS(scalar_from_string("x"), ParseError);
}
