#include "mixedsys/defect_lab.hpp"

#include "mixedsys/errors.hpp"
#include "mixedsys/parallel.hpp"

#include <algorithm>
#include <random>

namespace mixedsys {

using Index = SparseVector::Index;

namespace {

void check_truncation(const SystemFamily& family, std::size_t n) {
    if (n > family.size())
        throw DimensionMismatch("truncation " + std::to_string(n) + " exceeds family size " + std::to_string(family.size()));
}

void check_n_list(const SystemFamily& family, std::span<const std::size_t> n_list) {
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (i && n_list[i] <= n_list[i - 1]) throw ParseError("truncation list must be strictly ascending");
        check_truncation(family, n_list[i]);
    }
}

std::vector<SparseVector> mixed_from_mask(const SystemFamily& family, std::uint64_t mask) {
    std::vector<SparseVector> out;
    out.reserve(family.size());
    for (std::size_t k = 1; k <= family.size(); ++k) out.push_back(mask >> (k - 1) & 1 ? family.x(k) : family.dual(k));
    return out;
}

std::uint64_t mask_of(const Set& sigma, std::size_t n) {
    std::uint64_t m = 0;
    for (Index k : sigma.truncate(n)) m |= std::uint64_t{1} << (k - 1);
    return m;
}

Set set_of(std::uint64_t mask) {
    std::vector<Index> members;
    for (Index k = 1; mask >> (k - 1); ++k)
        if (mask >> (k - 1) & 1) members.push_back(k);
    return Set::finite(members);
}

std::vector<std::size_t> default_n_list(std::size_t n) {
    constexpr std::size_t points = 8;
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i <= points; ++i) {
        const std::size_t v = std::max<std::size_t>(1, n * i / points);
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    return out;
}

std::size_t default_window(const SystemFamily& family) {
    std::size_t w = 5;
    const FamilySpec& s = family.spec();
    if (!s.defects.empty()) w = std::max<std::size_t>(w, static_cast<std::size_t>(s.defects.back()));
    w = std::max<std::size_t>(w, static_cast<std::size_t>(s.width));
    w = std::max<std::size_t>(w, static_cast<std::size_t>(s.m));
    return w;
}

bool probe_decays(const std::vector<Scalar>& series, const Scalar& threshold, std::size_t min_points) {
    if (series.empty()) return false;
    if (series.back() == 0) return true;
    if (series.back() >= threshold || series.size() < min_points) return false;
    for (std::size_t i = series.size() - min_points + 1; i < series.size(); ++i)
        if (series[i] >= series[i - 1]) return false;
    return true;
}

} // namespace

std::vector<SparseVector> mixed_vectors(const SystemFamily& family, const Set& sigma, std::size_t n) {
    check_truncation(family, n);
    std::vector<SparseVector> out;
    out.reserve(n);
    for (Index k = 1; k <= n; ++k) out.push_back(sigma.contains(k) ? family.x(k) : family.dual(k));
    return out;
}

std::size_t defect_truncated(const SystemFamily& family, const Set& sigma, std::size_t n, std::size_t ambient,
                             const ExactOptions& opts) {
    if (ambient == 0) ambient = family.ambient(n);
    const auto mixed = mixed_vectors(family, sigma, n);
    if (max_support(mixed) > ambient) throw DimensionMismatch("mixed vectors leave the ambient window");
    return ambient - span_rank(mixed, opts);
}

WitnessCheck witness_check(const SystemFamily& family, const Set& sigma, std::size_t n,
                           std::span<const SparseVector> witnesses) {
    const auto mixed = mixed_vectors(family, sigma, n);
    WitnessCheck out;
    for (Index k = 1; k <= n; ++k) {
        const bool orthogonal =
            std::all_of(witnesses.begin(), witnesses.end(), [&](const SparseVector& w) { return dot(w, mixed[k - 1]) == 0; });
        if (!orthogonal) out.exceptional.push_back(k);
    }
    const Set moved = normalize(family, sigma).moved;
    out.ok = std::all_of(out.exceptional.begin(), out.exceptional.end(), [&](Index k) { return moved.contains(k); });
    return out;
}

std::vector<DecayRow> distance_profile(const SystemFamily& family, const Set& sigma, std::span<const SparseVector> probes,
                                       std::span<const std::size_t> n_list, std::span<const SparseVector> base,
                                       const ExactOptions& opts) {
    check_n_list(family, n_list);
    std::vector<DecayRow> rows(probes.size() * n_list.size());
    if (n_list.empty()) return rows;

    GramEliminator g(opts);
    for (const auto& b : base) g.add(b);
    const auto mixed = mixed_vectors(family, sigma, n_list.back());
    std::size_t added = 0;

    for (std::size_t i = 0; i < n_list.size(); ++i) {
        while (added < n_list[i]) g.add(mixed[added++]);
        ExceptionSlot slot;
        const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(probes.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t p = 0; p < count; ++p) {
            slot.run([&] {
                const std::size_t pi = static_cast<std::size_t>(p);
                rows[i * probes.size() + pi] = {pi, n_list[i], g.dist_sq(probes[pi])};
            });
        }
        slot.rethrow();
    }
    return rows;
}

std::vector<DecayRow> distance_profile_serial(const SystemFamily& family, const Set& sigma,
                                              std::span<const SparseVector> probes,
                                              std::span<const std::size_t> n_list, std::span<const SparseVector> base,
                                              const ExactOptions& opts) {
    check_n_list(family, n_list);
    std::vector<DecayRow> rows;
    for (std::size_t n : n_list) {
        std::vector<SparseVector> gens(base.begin(), base.end());
        const auto mixed = mixed_vectors(family, sigma, n);
        gens.insert(gens.end(), mixed.begin(), mixed.end());
        for (std::size_t p = 0; p < probes.size(); ++p) rows.push_back({p, n, dist_sq(probes[p], gens, opts)});
    }
    return rows;
}

std::string Verdict::to_string() const {
    switch (kind) {
    case Kind::Finite: return std::to_string(value);
    case Kind::Infinite: return "inf";
    case Kind::Inconclusive: break;
    }
    return "inconclusive";
}

DefectReport classify_defect(const SystemFamily& family, const Set& sigma, std::size_t n, const ClassifyOptions& opts) {
    check_truncation(family, n);
    if (opts.decay_threshold <= 0) throw ParseError("decay threshold must be positive");

    DefectReport r;
    r.family = family.descriptor();
    r.sigma = sigma.to_string();
    r.n = n;
    r.options = opts;
    if (r.options.n_list.empty()) r.options.n_list = default_n_list(n);
    if (r.options.window == 0) r.options.window = default_window(family);
    const auto& n_list = r.options.n_list;
    check_n_list(family, n_list);
    if (n_list.back() != n) throw ParseError("truncation list must end at n");

    const Normalization norm = normalize(family, sigma);
    r.normalized_sigma = norm.sigma.to_string();
    r.moved = norm.moved.truncate(n);
    r.truncated_defect = defect_truncated(family, sigma, n, 0, opts.exact);

    if (family.kind() == FamilyKind::RandomFinite) {
        // The truncation is the whole space: the complement is the answer.
        r.witnesses = complement_basis(mixed_vectors(family, sigma, n), family.ambient(n), opts.exact);
        r.witness_dim = r.witnesses.size();
        r.check = witness_check(family, sigma, n, r.witnesses);
        r.verdict = Verdict::finite(r.witness_dim);
        r.certificate = "exact-finite";
        return r;
    }

    r.predicted = predicted_defect(family, sigma);
    WitnessSpace ws = witness_space(family, sigma, n);
    r.witnesses = std::move(ws.vectors);
    r.witnesses_unbounded = ws.unbounded;
    r.witness_dim = span_rank(r.witnesses, opts.exact);
    r.check = witness_check(family, sigma, n, r.witnesses);
    if (!r.check.ok || r.witness_dim != r.witnesses.size()) {
        r.verdict = Verdict::inconclusive();
        r.certificate = "none";
        return r;
    }

    if (r.witnesses_unbounded) {
        for (std::size_t m : n_list) r.witness_ranks.push_back(span_rank(witness_space(family, sigma, m).vectors, opts.exact));
        bool growing = r.witness_ranks.size() >= 2;
        for (std::size_t i = 1; i < r.witness_ranks.size(); ++i) growing = growing && r.witness_ranks[i] > r.witness_ranks[i - 1];
        r.verdict = growing ? Verdict::infinite() : Verdict::inconclusive();
        r.certificate = growing ? "witness-growth" : "none";
        return r;
    }

    for (Index c = 1; c <= r.options.window; ++c) {
        r.probes.push_back(SparseVector::unit(c));
        r.probe_labels.push_back(family.coordinate_label(c));
    }
    r.decay = distance_profile(family, sigma, r.probes, n_list, r.witnesses, opts.exact);

    bool all_decay = true;
    for (std::size_t p = 0; p < r.probes.size(); ++p) {
        std::vector<Scalar> series;
        for (const auto& row : r.decay)
            if (row.probe == p) series.push_back(row.dist_sq);
        all_decay = all_decay && probe_decays(series, opts.decay_threshold, opts.min_points);
    }
    r.verdict = all_decay ? Verdict::finite(r.witness_dim) : Verdict::inconclusive();
    r.certificate = all_decay ? "witness+decay" : "none";
    return r;
}

Set swap_move(const Set& sigma, Index k0, SwapDirection direction) {
    if (k0 == 0) throw ParseError("indices start at 1");
    const bool inside = sigma.contains(k0);
    if (direction == SwapDirection::In) {
        if (inside) throw WrongSide(std::to_string(k0) + " is already in the set");
        return sigma.with(k0);
    }
    if (!inside) throw WrongSide(std::to_string(k0) + " is not in the set");
    return sigma.without(k0);
}

std::vector<std::size_t> defect_table(const SystemFamily& family, const ExactOptions& opts) {
    const std::size_t n = family.size();
    if (n > max_scan_size) throw TooLarge("enumeration over 2^" + std::to_string(n) + " subsets");
    const std::size_t ambient = family.ambient();
    const std::ptrdiff_t total = std::ptrdiff_t{1} << n;
    std::vector<std::size_t> table(static_cast<std::size_t>(total));
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t mask = 0; mask < total; ++mask) {
        slot.run([&] {
            table[static_cast<std::size_t>(mask)] =
                ambient - span_rank(mixed_from_mask(family, static_cast<std::uint64_t>(mask)), opts);
        });
    }
    slot.rethrow();
    return table;
}

std::vector<std::size_t> defect_table_serial(const SystemFamily& family, const ExactOptions& opts) {
    const std::size_t n = family.size();
    if (n > max_scan_size) throw TooLarge("enumeration over 2^" + std::to_string(n) + " subsets");
    std::vector<std::size_t> table(std::size_t{1} << n);
    for (std::uint64_t mask = 0; mask < table.size(); ++mask)
        table[mask] = defect_truncated(family, set_of(mask), n, family.ambient(), opts);
    return table;
}

HereditaryScan hereditary_scan(const SystemFamily& family, const ExactOptions& opts) {
    const auto table = defect_table(family, opts);
    HereditaryScan s;
    s.subsets = table.size();
    for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
        if (table[mask] > s.max_defect) {
            s.max_defect = table[mask];
            s.worst_mask = mask;
        }
    }
    return s;
}

namespace {

struct RandomInstance {
    long dim;
    long count;
    std::uint64_t seed;
    bool perturb;
};

std::vector<RandomInstance> draw_instances(std::size_t instances, std::uint64_t seed, std::size_t max_dim, bool square) {
    std::mt19937_64 rng(seed);
    std::vector<RandomInstance> out;
    for (std::size_t i = 0; i < instances; ++i) {
        const long dim = static_cast<long>(rng() % max_dim) + 1;
        const long count = square ? dim : static_cast<long>(rng() % static_cast<std::uint64_t>(dim)) + 1;
        const std::uint64_t s = rng();
        out.push_back({dim, count, s, rng() % 2 == 1});
    }
    return out;
}

std::string describe(const RandomInstance& r) {
    FamilySpec spec;
    spec.kind = FamilyKind::RandomFinite;
    spec.dim = r.dim;
    spec.count = r.count;
    spec.seed = r.seed;
    spec.perturb = r.perturb;
    return spec.to_string();
}

} // namespace

SwapSuiteResult swap_suite(std::size_t instances, std::uint64_t seed, std::size_t max_dim, std::size_t max_chain) {
    const auto draws = draw_instances(instances, seed, max_dim, false);
    SwapSuiteResult result;
    result.instances = instances;
    std::vector<std::size_t> checks(instances), violations(instances);
    std::vector<std::string> first_failure(instances);

    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(instances);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        slot.run([&] {
            const std::size_t ii = static_cast<std::size_t>(i);
            const RandomInstance& inst = draws[ii];
            const SystemFamily f = make_random_finite(inst.dim, inst.count, inst.seed, inst.perturb);
            const std::size_t n = f.size();
            const auto table = defect_table_serial(f);
            auto record = [&](std::uint64_t from, std::uint64_t to) {
                ++checks[ii];
                if (table[from] != table[to]) {
                    ++violations[ii];
                    if (first_failure[ii].empty())
                        first_failure[ii] = describe(inst) + ": mask " + std::to_string(from) + " -> " + std::to_string(to);
                }
            };
            for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
                const Set sigma = set_of(mask);
                // Single swaps through swap_move itself.
                for (Index k0 = 1; k0 <= n; ++k0) {
                    const SwapDirection dir = sigma.contains(k0) ? SwapDirection::Out : SwapDirection::In;
                    record(mask, mask_of(swap_move(sigma, k0, dir), n));
                }
                // Chains: any set T of 2..max_chain indices, swapped one after another.
                for (std::uint64_t t = 1; t < table.size(); ++t) {
                    const int size = __builtin_popcountll(t);
                    if (size >= 2 && static_cast<std::size_t>(size) <= max_chain) record(mask, mask ^ t);
                }
            }
        });
    }
    slot.rethrow();

    for (std::size_t i = 0; i < instances; ++i) {
        result.checks += checks[i];
        result.violations += violations[i];
        if (!first_failure[i].empty() && result.failures.size() < 10) result.failures.push_back(first_failure[i]);
    }
    return result;
}

HereditarySuiteResult hereditary_suite(std::size_t instances, std::uint64_t seed, std::size_t max_dim) {
    const auto draws = draw_instances(instances, seed, max_dim, true);
    HereditarySuiteResult result;
    result.instances = instances;
    std::vector<std::size_t> selections(instances), nonzero(instances);
    std::vector<std::string> failure(instances);

    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(instances);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        slot.run([&] {
            const std::size_t ii = static_cast<std::size_t>(i);
            const RandomInstance& inst = draws[ii];
            const SystemFamily f = make_random_finite(inst.dim, inst.count, inst.seed, inst.perturb);
            const auto table = defect_table_serial(f);
            selections[ii] = table.size();
            for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
                if (table[mask] == 0) continue;
                ++nonzero[ii];
                if (failure[ii].empty()) failure[ii] = describe(inst) + ": mask " + std::to_string(mask);
            }
        });
    }
    slot.rethrow();

    for (std::size_t i = 0; i < instances; ++i) {
        result.selections += selections[i];
        result.nonzero += nonzero[i];
        if (!failure[i].empty() && result.failures.size() < 10) result.failures.push_back(failure[i]);
    }
    return result;
}

} // namespace mixedsys
