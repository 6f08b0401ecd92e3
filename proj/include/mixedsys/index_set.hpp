#ifndef MIXEDSYS_INDEX_SET_HPP
#define MIXEDSYS_INDEX_SET_HPP

#include "mixedsys/scalar.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixedsys {

/// A subset of N = {1, 2, ...} that is a union of residue classes modulo a
/// period, up to finitely many exceptions.
///
/// Canonical form (kept after every operation, so equality is structural):
///   * the period is the smallest one for the residue pattern;
///   * `added` holds members outside the pattern, `removed` non-members inside it.
class EventuallyPeriodicSet {
public:
    using Index = std::uint64_t;

    /// Upper bound on periods produced by union/intersection.
    static constexpr Index max_period = Index{1} << 20;

    EventuallyPeriodicSet() : EventuallyPeriodicSet(none()) {}

    static EventuallyPeriodicSet all();
    static EventuallyPeriodicSet none();
    /// {k >= 1 : k mod period ∈ residues}. Residues must be < period.
    static EventuallyPeriodicSet residues(Index period, std::initializer_list<Index> rs);
    static EventuallyPeriodicSet residues(Index period, const std::vector<Index>& rs);
    static EventuallyPeriodicSet finite(const std::vector<Index>& members);
    static EventuallyPeriodicSet finite(std::initializer_list<Index> members);
    /// [from, ∞)
    static EventuallyPeriodicSet tail(Index from);

    bool contains(Index k) const;

    Index period() const { return period_; }
    /// pattern()[r] is the eventual membership of k with k mod period == r.
    const std::vector<bool>& pattern() const { return pattern_; }
    const std::vector<Index>& added() const { return added_; }
    const std::vector<Index>& removed() const { return removed_; }

    bool is_finite() const;
    bool is_cofinite() const;
    bool empty() const { return is_finite() && added_.empty(); }
    std::optional<Index> min_element() const;
    /// Largest exception (0 if none). Beyond it membership follows the pattern.
    Index exception_bound() const;

    /// Sorted σ ∩ [1:n].
    std::vector<Index> truncate(Index n) const;

    EventuallyPeriodicSet with(Index k) const;
    EventuallyPeriodicSet without(Index k) const;

    /// Canonical text form, parseable by parse_index_set().
    std::string to_string() const;

    bool operator==(const EventuallyPeriodicSet&) const = default;

private:
    EventuallyPeriodicSet(Index period, std::vector<bool> pattern) : period_(period), pattern_(std::move(pattern)) {}

    bool pattern_at(Index k) const { return pattern_[k % period_]; }
    // Rebuilds exceptions from explicit (k, membership) pairs and minimizes the period.
    void canonicalize(const std::vector<std::pair<Index, bool>>& overrides);

    friend EventuallyPeriodicSet complement(const EventuallyPeriodicSet& a);
    friend EventuallyPeriodicSet set_union(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
    friend EventuallyPeriodicSet set_intersection(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
    friend EventuallyPeriodicSet sigma_m(const EventuallyPeriodicSet& s, Index m);

    Index period_ = 1;
    std::vector<bool> pattern_{false};
    std::vector<Index> added_;
    std::vector<Index> removed_;
};

enum class SetOp { Complement, Union, Intersection };

EventuallyPeriodicSet complement(const EventuallyPeriodicSet& a);
EventuallyPeriodicSet set_union(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
EventuallyPeriodicSet set_intersection(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
EventuallyPeriodicSet set_difference(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
EventuallyPeriodicSet symmetric_difference(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);
/// Dispatching form; b is ignored for Complement.
EventuallyPeriodicSet set_algebra(SetOp op, const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b = {});

/// σ ∪ [m+1, ∞)
EventuallyPeriodicSet sigma_m(const EventuallyPeriodicSet& s, EventuallyPeriodicSet::Index m);

/// Sum over k ∈ s of 2^{-k}, in closed form.
Scalar dyadic_weight(const EventuallyPeriodicSet& s);

/// ρ(a, b) = Σ |1_a(k) - 1_b(k)| / 2^k, exactly.
Scalar rho(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);

/// Largest m with a ∩ [1:m] == b ∩ [1:m]; infinite when a == b.
ExtCount prefix_agreement(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b);

/// Parses the set expression syntax (docs/set_grammar.ebnf). Throws ParseError.
EventuallyPeriodicSet parse_index_set(std::string_view text);

} // namespace mixedsys

#endif
