#ifndef MIXEDSYS_DEFECT_LAB_HPP
#define MIXEDSYS_DEFECT_LAB_HPP

#include "mixedsys/constructions.hpp"
#include "mixedsys/exact_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mixedsys {

using Set = EventuallyPeriodicSet;

/// {x_k : k ∈ σ ∩ [1:n]} ∪ {x_k* : k ∈ [1:n] \ σ}, in ascending k.
std::vector<SparseVector> mixed_vectors(const SystemFamily& family, const Set& sigma, std::size_t n);

/// ambient - rank(mixed_vectors). ambient 0 means family.ambient(n).
std::size_t defect_truncated(const SystemFamily& family, const Set& sigma, std::size_t n, std::size_t ambient = 0,
                             const ExactOptions& opts = {});

struct WitnessCheck {
    bool ok = false;
    /// k <= n whose mixed vector is not orthogonal to some witness.
    std::vector<SparseVector::Index> exceptional;
};

/// ok when every exceptional index is one the family's normalization moves.
WitnessCheck witness_check(const SystemFamily& family, const Set& sigma, std::size_t n,
                           std::span<const SparseVector> witnesses);

struct DecayRow {
    std::size_t probe = 0;  // position in the probe list
    std::size_t n = 0;
    Scalar dist_sq;
};

/// dist²(probe, span(base ∪ mixed_vectors(n))) for every probe and every n in
/// n_list (ascending). One incremental elimination walks n; probes at each
/// checkpoint run in parallel. Rows are ordered by n, then probe.
std::vector<DecayRow> distance_profile(const SystemFamily& family, const Set& sigma,
                                       std::span<const SparseVector> probes, std::span<const std::size_t> n_list,
                                       std::span<const SparseVector> base = {}, const ExactOptions& opts = {});
/// Reference: recomputes every cell from scratch, single-threaded.
std::vector<DecayRow> distance_profile_serial(const SystemFamily& family, const Set& sigma,
                                              std::span<const SparseVector> probes,
                                              std::span<const std::size_t> n_list,
                                              std::span<const SparseVector> base = {}, const ExactOptions& opts = {});

/// Defect value or "inconclusive".
struct Verdict {
    enum class Kind { Finite, Infinite, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::uint64_t value = 0;

    static Verdict finite(std::uint64_t v) { return {Kind::Finite, v}; }
    static Verdict infinite() { return {Kind::Infinite, 0}; }
    static Verdict inconclusive() { return {}; }

    bool is_finite() const { return kind == Kind::Finite; }
    /// "3", "inf" or "inconclusive".
    std::string to_string() const;
    bool operator==(const Verdict&) const = default;
};

struct ClassifyOptions {
    Scalar decay_threshold{1, 100};
    std::size_t min_points = 4;
    /// Probe directions are ambient coordinates 1..window. 0 picks
    /// max(k_s, W, m, 5) for the family.
    std::size_t window = 0;
    /// Ascending truncations; empty picks up to 8 evenly spaced values ending at n.
    std::vector<std::size_t> n_list;
    ExactOptions exact;
};

struct DefectReport {
    std::string family;
    std::string sigma;
    std::size_t n = 0;
    ClassifyOptions options;  // with defaults resolved

    std::string normalized_sigma;
    std::vector<SparseVector::Index> moved;  // σ ∩ [1:n] moved to σ^c
    std::vector<SparseVector> witnesses;
    bool witnesses_unbounded = false;
    std::size_t witness_dim = 0;
    WitnessCheck check;
    /// Witness ranks along n_list; filled when the generator is unbounded.
    std::vector<std::size_t> witness_ranks;

    std::vector<SparseVector> probes;
    std::vector<std::string> probe_labels;
    std::vector<DecayRow> decay;

    std::size_t truncated_defect = 0;
    std::optional<ExtCount> predicted;
    Verdict verdict;
    /// How the verdict was reached: "witness+decay", "witness-growth",
    /// "exact-finite" (random families, where truncation is the whole space)
    /// or "none".
    std::string certificate;
};

/// Two-sided certification: exact witnesses bound the defect from below;
/// decay of dist²(probe, span(witnesses ∪ mixed_n)) to zero for every probe
/// in the window is the evidence that nothing else is missing.
DefectReport classify_defect(const SystemFamily& family, const Set& sigma, std::size_t n,
                             const ClassifyOptions& opts = {});

enum class SwapDirection { In, Out };

/// Moves k0 into σ (In) or out of it (Out). Throws WrongSide when k0 already
/// sits on the target side.
Set swap_move(const Set& sigma, SparseVector::Index k0, SwapDirection direction);

/// Largest supported enumeration, 2^20 subsets.
inline constexpr std::size_t max_scan_size = 20;

/// table[mask] = defect_truncated for σ = {k : bit k-1 of mask}, ambient D.
/// Parallel over masks. Throws TooLarge for n > max_scan_size.
std::vector<std::size_t> defect_table(const SystemFamily& family, const ExactOptions& opts = {});
std::vector<std::size_t> defect_table_serial(const SystemFamily& family, const ExactOptions& opts = {});

struct HereditaryScan {
    std::size_t max_defect = 0;
    std::uint64_t worst_mask = 0;
    std::size_t subsets = 0;
};

/// Max defect over all 2^n mixed selections; 0 iff the truncated system is
/// hereditarily complete.
HereditaryScan hereditary_scan(const SystemFamily& family, const ExactOptions& opts = {});

struct SwapSuiteResult {
    std::size_t instances = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::vector<std::string> failures;  // first few, for the report
};

/// Random families (D <= max_dim, n <= D, perturbed and plain duals): every
/// single swap and every chain of at most max_chain swaps keeps the
/// truncated defect. Instances run in parallel.
SwapSuiteResult swap_suite(std::size_t instances, std::uint64_t seed, std::size_t max_dim = 8, std::size_t max_chain = 3);

struct HereditarySuiteResult {
    std::size_t instances = 0;
    std::size_t selections = 0;
    std::size_t nonzero = 0;
    std::vector<std::string> failures;
};

/// Random bases (D = n <= max_dim): every one of the 2^D mixed selections has defect 0.
HereditarySuiteResult hereditary_suite(std::size_t instances, std::uint64_t seed, std::size_t max_dim = 6);

} // namespace mixedsys

#endif
