#include "mixedsys/defect_lab.hpp"
#include "mixedsys/errors.hpp"

#include "oracle.hpp"

#include <doctest.h>

using namespace mixedsys;

namespace {

SparseVector e(SparseVector::Index i) { return SparseVector::unit(i); }

} // namespace

TEST_CASE("mixed vectors") {
    const SystemFamily f = make_e1_plus_ek(2);
    CHECK(mixed_vectors(f, Set::all(), 2) == std::vector<SparseVector>{f.x(1), f.x(2)});
    CHECK(mixed_vectors(f, Set::none(), 2) == std::vector<SparseVector>{e(2), e(3)});
    CHECK(mixed_vectors(f, Set::finite({1}), 2) == std::vector<SparseVector>{f.x(1), e(3)});
    CHECK_THROWS_AS(mixed_vectors(f, Set::all(), 3), DimensionMismatch);
}

TEST_CASE("truncated defect") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SystemFamily basis = make_random_finite(4, 4, seed, false);
        CHECK(defect_truncated(basis, Set::residues(2, {1}), 4) == 0);
    }
    CHECK(defect_truncated(make_e1_plus_ek(7), Set::all(), 7) == 1);
    CHECK(defect_truncated(make_defect_pair(2, 5), Set::none(), 5, 7) == 2);

    // Against the oracle rank on random selections.
    std::mt19937_64 rng(5);
    const std::vector<SystemFamily> families{make_young(2, 6), make_finite_defect_set({0, 1, 3}, 8),
                                             make_infinite_defect_set({0, 2}, 6)};
    for (const auto& f : families) {
        for (int t = 0; t < 20; ++t) {
            const Set s = Set::finite({rng() % 8 + 1, rng() % 8 + 1});
            const std::size_t n = f.size();
            CHECK(defect_truncated(f, s, n) == f.ambient(n) - oracle::rank(mixed_vectors(f, s, n), f.ambient(n)));
        }
    }
}

TEST_CASE("witness check") {
    const SystemFamily dp = make_defect_pair(2, 10);
    const std::vector<SparseVector> w{e(1), e(2)};
    const WitnessCheck a = witness_check(dp, Set::none(), 10, w);
    CHECK(a.ok);
    CHECK(a.exceptional.empty());

    const WitnessCheck b = witness_check(dp, Set::finite({3}), 10, w);
    CHECK(b.exceptional == std::vector<SparseVector::Index>{3});
    CHECK(b.ok);

    // Witness e_1 against the superscript-0 class fails everywhere on σ.
    const SystemFamily fs = make_finite_defect_set({0, 1, 3}, 30);
    const std::vector<SparseVector> e1{e(1)};
    const WitnessCheck c = witness_check(fs, Set::residues(3, {2}), 30, e1);
    CHECK(c.ok);
    CHECK(c.exceptional.empty());
    const WitnessCheck d = witness_check(fs, Set::residues(3, {1}), 30, e1);
    CHECK_FALSE(d.ok);
    CHECK(d.exceptional.size() == 10);
}

TEST_CASE("distance profile") {
    const SystemFamily f = make_e1_plus_ek(99);
    const std::vector<SparseVector> probes{e(1)};
    const std::vector<std::size_t> ns{2, 9, 99};
    const auto rows = distance_profile(f, Set::all(), probes, ns);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].dist_sq == Scalar(1, 3));
    CHECK(rows[1].dist_sq == Scalar(1, 10));
    CHECK(rows[2].dist_sq == Scalar(1, 100));

    const std::vector<std::size_t> small{1, 3, 5, 8};
    for (const auto& row : distance_profile(make_defect_pair(2, 8), Set::none(), probes, small)) CHECK(row.dist_sq == 1);
    for (const auto& row : distance_profile(make_young(2, 8), Set::none(), probes, small)) CHECK(row.dist_sq == 1);

    // Parallel incremental kernel against the from-scratch reference, and monotone in n.
    const std::vector<SystemFamily> families{make_young(3, 12), make_defect_pair(3, 12),
                                             make_finite_defect_set({0, 1, 3}, 12), make_infinite_defect_set({0, 2}, 12)};
    const std::vector<Set> sigmas{Set::all(), Set::residues(3, {2}), Set::finite({2, 5}), Set::residues(2, {0}).with(1)};
    const std::vector<std::size_t> grid{2, 5, 7, 12};
    std::vector<SparseVector> many;
    for (SparseVector::Index c = 1; c <= 8; ++c) many.push_back(e(c));
    many.push_back(e(1) + 2 * e(3));
    const std::vector<SparseVector> base{e(2) - e(4)};
    for (const auto& fam : families) {
        for (const auto& s : sigmas) {
            const auto par = distance_profile(fam, s, many, grid, base);
            const auto ser = distance_profile_serial(fam, s, many, grid, base);
            REQUIRE(par.size() == ser.size());
            for (std::size_t i = 0; i < par.size(); ++i) {
                CHECK(par[i].dist_sq == ser[i].dist_sq);
                CHECK(par[i].n == ser[i].n);
                CHECK(par[i].probe == ser[i].probe);
                if (i >= many.size()) CHECK(par[i].dist_sq <= par[i - many.size()].dist_sq);
            }
        }
    }
    const std::vector<std::size_t> unsorted{5, 3};
    CHECK_THROWS_AS(distance_profile(f, Set::all(), probes, unsorted), ParseError);
}

TEST_CASE("classify examples") {
    const DefectReport a = classify_defect(make_e1_plus_ek(40), Set::none(), 40);
    CHECK(a.verdict == Verdict::finite(1));
    CHECK(a.certificate == "witness+decay");

    ClassifyOptions opts;
    opts.decay_threshold = Scalar(1, 50);
    const DefectReport b = classify_defect(make_e1_plus_ek(99), Set::all(), 99, opts);
    CHECK(b.verdict == Verdict::finite(0));
    CHECK(b.truncated_defect == 1);

    const DefectReport c = classify_defect(make_defect_pair(3, 40), Set::none(), 40);
    CHECK(c.verdict == Verdict::finite(3));
    CHECK(c.witness_dim == 3);

    const DefectReport d = classify_defect(make_defect_pair(2, 40), Set::finite({1, 4, 9}), 40);
    CHECK(d.verdict == Verdict::finite(2));
    CHECK(d.check.exceptional == std::vector<SparseVector::Index>{1, 4, 9});
    CHECK(d.moved == std::vector<SparseVector::Index>{1, 4, 9});

    const DefectReport g = classify_defect(make_infinite_defect_set({0}, 12), Set::finite({1, 2, 3}), 12);
    CHECK(g.verdict == Verdict::infinite());
    CHECK(g.certificate == "witness-growth");

    const DefectReport r = classify_defect(make_random_finite(5, 3, 4, true), Set::finite({2}), 3);
    CHECK(r.verdict == Verdict::finite(2));
    CHECK(r.certificate == "exact-finite");
    CHECK_FALSE(r.predicted.has_value());

    CHECK(Verdict::inconclusive().to_string() == "inconclusive");
    CHECK(Verdict::infinite().to_string() == "inf");
}

TEST_CASE("classify never contradicts predictions") {
    const std::vector<SystemFamily> families{make_e1_plus_ek(30),       make_young(2, 30),
                                             make_defect_pair(2, 30),   make_finite_defect_set({0, 1, 3}, 30),
                                             make_infinite_defect_set({0, 2}, 15)};
    const std::vector<Set> sigmas{Set::none(),           Set::all(),           Set::finite({1, 4, 9}), Set::residues(3, {0}),
                                  Set::residues(3, {1}), Set::residues(3, {2}), Set::residues(2, {1}).with(2)};
    for (const auto& f : families) {
        for (const auto& s : sigmas) {
            CAPTURE(f.descriptor());
            CAPTURE(s.to_string());
            const DefectReport r = classify_defect(f, s, f.size());
            CHECK(r.check.ok);
            if (r.verdict.kind == Verdict::Kind::Inconclusive) continue;
            const ExtCount p = *r.predicted;
            if (p.is_infinite())
                CHECK(r.verdict == Verdict::infinite());
            else
                CHECK(r.verdict == Verdict::finite(p.value()));
            if (r.verdict.is_finite()) CHECK(r.verdict.value >= r.witness_dim);
        }
    }
}

TEST_CASE("swap move") {
    CHECK(swap_move(Set::none(), 3, SwapDirection::In) == Set::finite({3}));
    CHECK(swap_move(Set::all(), 2, SwapDirection::Out) == Set::all().without(2));
    const Set s = Set::residues(3, {1});
    CHECK(swap_move(swap_move(s, 2, SwapDirection::In), 2, SwapDirection::Out) == s);
    CHECK_THROWS_AS(swap_move(Set::all(), 2, SwapDirection::In), WrongSide);
    CHECK_THROWS_AS(swap_move(Set::none(), 2, SwapDirection::Out), WrongSide);
}

TEST_CASE("hereditary scan") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(hereditary_scan(make_random_finite(4, 4, seed, false)).max_defect == 0);
    const HereditaryScan s = hereditary_scan(make_random_finite(4, 2, 1, false));
    CHECK(s.max_defect == 2);
    CHECK(s.subsets == 4);

    for (std::uint64_t seed = 0; seed < 100; ++seed) CHECK(hereditary_scan(make_random_finite(3, 3, seed, seed % 2)).max_defect == 0);

    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const SystemFamily f = make_random_finite(6, 4, seed, true);
        CHECK(defect_table(f) == defect_table_serial(f));
    }
    CHECK_THROWS_AS(defect_table(make_e1_plus_ek(21)), TooLarge);
}

TEST_CASE("swap and hereditary suites") {
    const SwapSuiteResult s = swap_suite(60, 7);
    CHECK(s.instances == 60);
    CHECK(s.checks > 0);
    CHECK(s.violations == 0);

    const HereditarySuiteResult h = hereditary_suite(30, 3);
    CHECK(h.nonzero == 0);
    CHECK(h.selections > 0);
}
