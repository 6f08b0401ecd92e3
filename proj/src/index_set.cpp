#include "mixedsys/index_set.hpp"

#include "mixedsys/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace mixedsys {

using Index = EventuallyPeriodicSet::Index;

EventuallyPeriodicSet EventuallyPeriodicSet::all() { return {1, {true}}; }
EventuallyPeriodicSet EventuallyPeriodicSet::none() { return {1, {false}}; }

EventuallyPeriodicSet EventuallyPeriodicSet::residues(Index period, const std::vector<Index>& rs) {
    if (period == 0) throw ParseError("period must be positive");
    if (period > max_period) throw TooLarge("period " + std::to_string(period) + " exceeds limit");
    std::vector<bool> pat(period, false);
    for (Index r : rs) {
        if (r >= period) throw ParseError("residue " + std::to_string(r) + " not below period " + std::to_string(period));
        pat[r] = true;
    }
    EventuallyPeriodicSet s(period, std::move(pat));
    s.canonicalize({});
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::residues(Index period, std::initializer_list<Index> rs) {
    return residues(period, std::vector<Index>(rs));
}

EventuallyPeriodicSet EventuallyPeriodicSet::finite(const std::vector<Index>& members) {
    EventuallyPeriodicSet s = none();
    std::vector<std::pair<Index, bool>> ov;
    for (Index k : members) {
        if (k == 0) throw ParseError("set members are positive integers");
        ov.emplace_back(k, true);
    }
    s.canonicalize(ov);
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::finite(std::initializer_list<Index> members) {
    return finite(std::vector<Index>(members));
}

EventuallyPeriodicSet EventuallyPeriodicSet::tail(Index from) {
    EventuallyPeriodicSet s = all();
    std::vector<std::pair<Index, bool>> ov;
    for (Index k = 1; k < from; ++k) ov.emplace_back(k, false);
    s.canonicalize(ov);
    return s;
}

bool EventuallyPeriodicSet::contains(Index k) const {
    if (k == 0) return false;
    if (std::binary_search(added_.begin(), added_.end(), k)) return true;
    if (std::binary_search(removed_.begin(), removed_.end(), k)) return false;
    return pattern_at(k);
}

bool EventuallyPeriodicSet::is_finite() const {
    return std::none_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; });
}

bool EventuallyPeriodicSet::is_cofinite() const {
    return std::all_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; });
}

Index EventuallyPeriodicSet::exception_bound() const {
    Index b = 0;
    if (!added_.empty()) b = std::max(b, added_.back());
    if (!removed_.empty()) b = std::max(b, removed_.back());
    return b;
}

std::optional<Index> EventuallyPeriodicSet::min_element() const {
    const Index limit = exception_bound() + period_;
    for (Index k = 1; k <= limit; ++k)
        if (contains(k)) return k;
    return std::nullopt;
}

std::vector<Index> EventuallyPeriodicSet::truncate(Index n) const {
    std::vector<Index> out;
    for (Index k = 1; k <= n; ++k)
        if (contains(k)) out.push_back(k);
    return out;
}

EventuallyPeriodicSet EventuallyPeriodicSet::with(Index k) const {
    if (k == 0) throw ParseError("set members are positive integers");
    EventuallyPeriodicSet s = *this;
    s.canonicalize({{k, true}});
    return s;
}

EventuallyPeriodicSet EventuallyPeriodicSet::without(Index k) const {
    if (k == 0) throw ParseError("set members are positive integers");
    EventuallyPeriodicSet s = *this;
    s.canonicalize({{k, false}});
    return s;
}

void EventuallyPeriodicSet::canonicalize(const std::vector<std::pair<Index, bool>>& overrides) {
    // Explicit membership for every exception, current or requested.
    std::map<Index, bool> member;
    for (Index k : added_) member[k] = true;
    for (Index k : removed_) member[k] = false;
    for (const auto& [k, m] : overrides) member[k] = m;

    // Smallest period d | period_ reproducing the pattern.
    for (Index d = 1; d <= period_; ++d) {
        if (period_ % d != 0) continue;
        bool ok = true;
        for (Index r = d; r < period_ && ok; ++r) ok = pattern_[r] == pattern_[r % d];
        if (ok) {
            pattern_.resize(d);
            period_ = d;
            break;
        }
    }

    added_.clear();
    removed_.clear();
    for (const auto& [k, m] : member) {
        if (m == pattern_at(k)) continue;
        (m ? added_ : removed_).push_back(k);
    }
}

EventuallyPeriodicSet complement(const EventuallyPeriodicSet& a) {
    EventuallyPeriodicSet s = a;
    s.pattern_.flip();
    std::swap(s.added_, s.removed_);
    return s;
}

EventuallyPeriodicSet set_union(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    const Index l = std::lcm(a.period_, b.period_);
    if (l > EventuallyPeriodicSet::max_period) throw TooLarge("combined period " + std::to_string(l) + " exceeds limit");
    std::vector<bool> pat(l);
    for (Index r = 0; r < l; ++r) pat[r] = a.pattern_[r % a.period_] || b.pattern_[r % b.period_];
    EventuallyPeriodicSet s(l, std::move(pat));
    std::vector<std::pair<Index, bool>> ov;
    for (const auto* src : {&a.added_, &a.removed_, &b.added_, &b.removed_})
        for (Index k : *src) ov.emplace_back(k, a.contains(k) || b.contains(k));
    s.canonicalize(ov);
    return s;
}

EventuallyPeriodicSet set_intersection(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    // De Morgan keeps one code path for the period/exception bookkeeping.
    return complement(set_union(complement(a), complement(b)));
}

EventuallyPeriodicSet set_difference(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return set_intersection(a, complement(b));
}

EventuallyPeriodicSet symmetric_difference(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return set_union(set_difference(a, b), set_difference(b, a));
}

EventuallyPeriodicSet set_algebra(SetOp op, const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    switch (op) {
    case SetOp::Complement: return complement(a);
    case SetOp::Union: return set_union(a, b);
    case SetOp::Intersection: return set_intersection(a, b);
    }
    throw InvariantViolation("unknown set operation");
}

EventuallyPeriodicSet sigma_m(const EventuallyPeriodicSet& s, Index m) {
    EventuallyPeriodicSet out = EventuallyPeriodicSet::all();
    std::vector<std::pair<Index, bool>> ov;
    for (Index k = 1; k <= m; ++k)
        if (!s.contains(k)) ov.emplace_back(k, false);
    out.canonicalize(ov);
    return out;
}

Scalar dyadic_weight(const EventuallyPeriodicSet& s) {
    const Index p = s.period();
    // Σ_{k ≡ r (mod p), k >= 1} 2^{-k} = 2^{-k0} / (1 - 2^{-p}), k0 = r or p when r = 0.
    Scalar per_class_factor = 1 / (1 - pow2(-static_cast<long>(p)));
    Scalar acc = 0;
    for (Index r = 0; r < p; ++r)
        if (s.pattern()[r]) acc += pow2(-static_cast<long>(r == 0 ? p : r));
    acc *= per_class_factor;
    for (Index k : s.added()) acc += pow2(-static_cast<long>(k));
    for (Index k : s.removed()) acc -= pow2(-static_cast<long>(k));
    return acc;
}

Scalar rho(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    return dyadic_weight(symmetric_difference(a, b));
}

ExtCount prefix_agreement(const EventuallyPeriodicSet& a, const EventuallyPeriodicSet& b) {
    const auto first = symmetric_difference(a, b).min_element();
    return first ? ExtCount::finite(*first - 1) : ExtCount::infinite();
}

std::string EventuallyPeriodicSet::to_string() const {
    std::string out;
    if (is_cofinite()) {
        out = "all";
    } else if (is_finite()) {
        if (!added_.empty()) {
            out = "fin(";
            for (std::size_t i = 0; i < added_.size(); ++i) out += (i ? "," : "") + std::to_string(added_[i]);
            return out + ")";
        }
        return "none";
    } else {
        out = "res(" + std::to_string(period_) + ";";
        bool first = true;
        for (Index r = 0; r < period_; ++r) {
            if (!pattern_[r]) continue;
            out += (first ? "" : ",") + std::to_string(r);
            first = false;
        }
        out += ")";
    }
    for (Index k : added_) out += "+" + std::to_string(k);
    for (Index k : removed_) out += "-" + std::to_string(k);
    return out;
}

} // namespace mixedsys
