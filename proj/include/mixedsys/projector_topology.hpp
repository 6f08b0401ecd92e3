#ifndef MIXEDSYS_PROJECTOR_TOPOLOGY_HPP
#define MIXEDSYS_PROJECTOR_TOPOLOGY_HPP

#include "mixedsys/constructions.hpp"
#include "mixedsys/exact_core.hpp"
#include "mixedsys/interval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mixedsys {

using Set = EventuallyPeriodicSet;

/// The family seen through x̂_k = x_k / ||x_k||. Only squared norms are
/// stored; the family data is untouched.
class NormalizedFamilyView {
public:
    /// Throws ZeroVector if one of x_1..x_count vanishes.
    NormalizedFamilyView(const SystemFamily& family, std::size_t count);

    const SystemFamily& family() const { return *family_; }
    std::size_t size() const { return norm_sq_.size(); }
    const Scalar& norm_sq(SparseVector::Index k) const { return norm_sq_.at(k - 1); }

private:
    const SystemFamily* family_;
    std::vector<Scalar> norm_sq_;
};

/// Generators of the truncated H_σ: x_k for k ∈ σ ∩ [1:n].
std::vector<SparseVector> h_sigma(const SystemFamily& family, const Set& sigma, std::size_t n);

/// P_σ v, with P_σ the orthogonal projection onto the truncated H_σ.
/// Throws DependentGenerators when those generators are dependent.
SparseVector project_sigma(const SystemFamily& family, const Set& sigma, const SparseVector& v, std::size_t n,
                           const ExactOptions& opts = {});

struct MetricOptions {
    std::size_t terms = 10;      // K: explicit terms before the tail bound
    unsigned precision = 64;     // square roots to 2^{-precision}
    ExactOptions exact;
};

/// d_s(P_σ, P_τ) = Σ_k ||(P_σ - P_τ) x̂_k|| / 2^k.
/// K exact terms plus tail [0, 2^{1-K}]. Width <= 2^{1-K} + 2^{-precision}.
Interval metric_ds(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                   const MetricOptions& opts = {});
Interval metric_ds_serial(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                          const MetricOptions& opts = {});

/// d_w(P_σ, P_τ) = Σ_{k,j} |<(P_σ - P_τ) x̂_k, x̂_j>| / 2^{k+j}.
/// K² exact terms plus tail [0, 2^{1-K}]: each term is at most 1 because
/// ||P_σ - P_τ|| <= 1 for orthogonal projections, and the weights outside
/// [1:K]² sum to 2^{1-K} - 4^{-K}.
Interval metric_dw(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                   const MetricOptions& opts = {});
Interval metric_dw_serial(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                          const MetricOptions& opts = {});

/// dist²(x̂_p, span{x̂_k : k <= n, k != p}) / 4^p, exactly.
Scalar separation_bound(const SystemFamily& family, SparseVector::Index p, std::size_t n,
                        const ExactOptions& opts = {});

struct ChainReport {
    std::vector<std::size_t> h_dims;      // dim H_{σ_m}, m = 1..M
    std::vector<std::size_t> dims;        // dim of the running intersection
    std::vector<SparseVector> intersection;
    std::size_t h_sigma_dim = 0;
    bool equal_to_h_sigma = false;
    /// dist²(probe, H_{σ_m}) per m, when a probe is given.
    std::vector<Scalar> probe_dist_sq;
};

/// ∩_{m=1}^{M} H_{σ_m} inside the truncation, compared with H_σ.
ChainReport intersection_chain(const SystemFamily& family, const Set& sigma, std::size_t depth, std::size_t n,
                               const std::optional<SparseVector>& probe = std::nullopt, const ExactOptions& opts = {});

/// How σ^m is produced for m = 1..M.
struct SequenceRule {
    enum class Kind { TailFill, Prefix, Constant, Explicit };
    Kind kind = Kind::TailFill;
    std::vector<Set> explicit_sets;  // Explicit: σ^m = explicit_sets[m-1]

    Set at(const Set& sigma, std::size_t m) const;
    std::size_t length(std::size_t depth) const;
    std::string name() const;
};

/// Throws ParseError. "tail", "prefix", "constant", or a list of set
/// expressions separated by ';' wrapped in brackets: "[fin(1);all]".
SequenceRule parse_sequence_rule(std::string_view text);

struct ConvergenceRow {
    std::size_t m = 0;
    std::string sigma_m;
    Scalar rho;
    ExtCount prefix;
    Interval ds_to_zero;               // d_s(P_{σ^m}, 0)
    std::vector<Interval> proxies;     // ||(P_{σ^m} - P_σ) x̂_j||, j = 1..window
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    Interval ds_limit_to_zero;         // d_s(P_σ, 0)
};

/// Per m: ρ(σ^m, σ), prefix agreement, the d_s enclosure of P_{σ^m} against
/// 0, and pointwise proxies. Rows are computed in parallel.
ConvergenceReport convergence_probe(const SystemFamily& family, const Set& sigma, const SequenceRule& rule,
                                    std::size_t depth, std::size_t n, std::size_t window,
                                    const MetricOptions& opts = {});

struct SemicontinuityReport {
    ConvergenceReport convergence;
    std::size_t tail_from = 0;         // first m of the observation window
    Interval tail_range;               // [min lo, max hi] of d_s(P_{σ^m}, 0) over the window
    Scalar margin;
    /// Certified: every tail enclosure lies below lo(d_s(P_σ, 0)) - margin.
    bool violation = false;
    /// Tail lower bound exceeds hi(d_s(P_σ, 0)): a jump up at σ.
    bool jump_up = false;
};

/// Lower semicontinuity of σ ↦ d_s(P_σ, 0) along the sequence. The last
/// half of the rows (at least one) forms the observation window.
SemicontinuityReport semicontinuity_probe(const SystemFamily& family, const Set& sigma, const SequenceRule& rule,
                                          std::size_t depth, std::size_t n, const MetricOptions& opts = {},
                                          const Scalar& margin = 0);

} // namespace mixedsys

#endif
