#include "mixedsys/projector_topology.hpp"

#include "mixedsys/errors.hpp"
#include "mixedsys/parallel.hpp"

#include <algorithm>

namespace mixedsys {

using Index = SparseVector::Index;

namespace {

void check_sizes(const SystemFamily& family, std::size_t n, std::size_t terms) {
    if (n > family.size()) throw DimensionMismatch("truncation exceeds family size");
    if (terms == 0) throw ParseError("at least one explicit term is needed");
    if (terms > family.size()) throw DimensionMismatch("term count exceeds family size");
}

Interval tail(std::size_t terms) { return {0, pow2(1 - static_cast<long>(terms))}; }

// P_σ x_k - P_τ x_k for k = 1..count, one Gram solve per side.
std::vector<SparseVector> projector_differences(const SystemFamily& family, const Set& sigma, const Set& tau,
                                                std::size_t n, std::size_t count, const ExactOptions& opts) {
    const std::span<const SparseVector> xs = family.primal().subspan(0, count);
    std::vector<SparseVector> sides[2];
    const Set* sets[2] = {&sigma, &tau};
    ExceptionSlot slot;
#pragma omp parallel for
    for (int s = 0; s < 2; ++s) {
        slot.run([&] {
            const auto gens = h_sigma(family, *sets[s], n);
            sides[s] = gens.empty() ? std::vector<SparseVector>(count) : project_many(xs, gens, opts);
        });
    }
    slot.rethrow();
    std::vector<SparseVector> diff(count);
    for (std::size_t k = 0; k < count; ++k) diff[k] = sides[0][k] - sides[1][k];
    return diff;
}

// Same differences, one projection call per vector.
std::vector<SparseVector> projector_differences_serial(const SystemFamily& family, const Set& sigma, const Set& tau,
                                                       std::size_t n, std::size_t count, const ExactOptions& opts) {
    const auto gs = h_sigma(family, sigma, n);
    const auto gt = h_sigma(family, tau, n);
    std::vector<SparseVector> diff;
    for (Index k = 1; k <= count; ++k) {
        SparseVector a = gs.empty() ? SparseVector{} : project(family.x(k), gs, opts);
        SparseVector b = gt.empty() ? SparseVector{} : project(family.x(k), gt, opts);
        diff.push_back(a - b);
    }
    return diff;
}

Interval sum_in_order(const std::vector<Interval>& terms, Interval acc) {
    for (const auto& t : terms) acc += t;
    return acc;
}

} // namespace

NormalizedFamilyView::NormalizedFamilyView(const SystemFamily& family, std::size_t count) : family_(&family) {
    if (count > family.size()) throw DimensionMismatch("view exceeds family size");
    for (Index k = 1; k <= count; ++k) {
        norm_sq_.push_back(mixedsys::norm_sq(family.x(k)));
        if (norm_sq_.back() == 0) throw ZeroVector("x_" + std::to_string(k) + " is zero");
    }
}

std::vector<SparseVector> h_sigma(const SystemFamily& family, const Set& sigma, std::size_t n) {
    if (n > family.size()) throw DimensionMismatch("truncation exceeds family size");
    std::vector<SparseVector> out;
    for (Index k : sigma.truncate(n)) out.push_back(family.x(k));
    return out;
}

SparseVector project_sigma(const SystemFamily& family, const Set& sigma, const SparseVector& v, std::size_t n,
                           const ExactOptions& opts) {
    const auto gens = h_sigma(family, sigma, n);
    if (gens.empty()) return {};
    return project(v, gens, opts);
}

Interval metric_ds(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n, const MetricOptions& opts) {
    check_sizes(family, n, opts.terms);
    const NormalizedFamilyView view(family, opts.terms);
    const auto diff = projector_differences(family, sigma, tau, n, opts.terms, opts.exact);
    std::vector<Interval> terms(opts.terms);
    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(opts.terms);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        slot.run([&] {
            const Index k = static_cast<Index>(i) + 1;
            terms[k - 1] = pow2(-static_cast<long>(k)) * sqrt_enclosure(norm_sq(diff[k - 1]) / view.norm_sq(k), opts.precision);
        });
    }
    slot.rethrow();
    return sum_in_order(terms, tail(opts.terms));
}

Interval metric_ds_serial(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                          const MetricOptions& opts) {
    check_sizes(family, n, opts.terms);
    const NormalizedFamilyView view(family, opts.terms);
    const auto diff = projector_differences_serial(family, sigma, tau, n, opts.terms, opts.exact);
    Interval acc = tail(opts.terms);
    for (Index k = 1; k <= opts.terms; ++k)
        acc += pow2(-static_cast<long>(k)) * sqrt_enclosure(norm_sq(diff[k - 1]) / view.norm_sq(k), opts.precision);
    return acc;
}

namespace {

// |<d_k, x_j>| / (||x_k|| ||x_j||) = sqrt(<d_k, x_j>^2 / (N_k N_j)), weighted.
Interval dw_term(const SystemFamily& family, const NormalizedFamilyView& view, const std::vector<SparseVector>& diff,
                 Index k, Index j, unsigned precision) {
    const Scalar r = dot(diff[k - 1], family.x(j));
    return pow2(-static_cast<long>(k + j)) * sqrt_enclosure(r * r / (view.norm_sq(k) * view.norm_sq(j)), precision);
}

} // namespace

Interval metric_dw(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n, const MetricOptions& opts) {
    check_sizes(family, n, opts.terms);
    const NormalizedFamilyView view(family, opts.terms);
    const auto diff = projector_differences(family, sigma, tau, n, opts.terms, opts.exact);
    const std::size_t K = opts.terms;
    std::vector<Interval> terms(K * K);
    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(K);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        slot.run([&] {
            const Index k = static_cast<Index>(i) + 1;
            for (Index j = 1; j <= K; ++j) terms[(k - 1) * K + (j - 1)] = dw_term(family, view, diff, k, j, opts.precision);
        });
    }
    slot.rethrow();
    return sum_in_order(terms, tail(K));
}

Interval metric_dw_serial(const SystemFamily& family, const Set& sigma, const Set& tau, std::size_t n,
                          const MetricOptions& opts) {
    check_sizes(family, n, opts.terms);
    const NormalizedFamilyView view(family, opts.terms);
    const auto diff = projector_differences_serial(family, sigma, tau, n, opts.terms, opts.exact);
    Interval acc = tail(opts.terms);
    for (Index k = 1; k <= opts.terms; ++k)
        for (Index j = 1; j <= opts.terms; ++j) acc += dw_term(family, view, diff, k, j, opts.precision);
    return acc;
}

Scalar separation_bound(const SystemFamily& family, Index p, std::size_t n, const ExactOptions& opts) {
    if (p == 0 || p > n) throw ParseError("separation index must lie in [1:n]");
    if (n > family.size()) throw DimensionMismatch("truncation exceeds family size");
    std::vector<SparseVector> others;
    for (Index k = 1; k <= n; ++k)
        if (k != p) others.push_back(family.x(k));
    const Scalar np = norm_sq(family.x(p));
    if (np == 0) throw ZeroVector("x_" + std::to_string(p) + " is zero");
    return dist_sq(family.x(p), others, opts) / np * pow2(-2 * static_cast<long>(p));
}

ChainReport intersection_chain(const SystemFamily& family, const Set& sigma, std::size_t depth, std::size_t n,
                               const std::optional<SparseVector>& probe, const ExactOptions& opts) {
    if (depth == 0 || depth > n) throw ParseError("chain depth must lie in [1:n]");
    const std::size_t ambient = family.ambient(n);
    ChainReport r;
    std::vector<SparseVector> running;
    for (std::size_t m = 1; m <= depth; ++m) {
        const auto hm = independent_subset(h_sigma(family, sigma_m(sigma, m), n), opts);
        r.h_dims.push_back(hm.size());
        running = m == 1 ? hm : intersect(running, hm, ambient, opts);
        r.dims.push_back(running.size());
        if (probe) r.probe_dist_sq.push_back(dist_sq(*probe, hm, opts));
    }
    const auto hs = h_sigma(family, sigma, n);
    r.h_sigma_dim = span_rank(hs, opts);
    r.equal_to_h_sigma = same_span(running, hs, opts);
    r.intersection = std::move(running);
    return r;
}

Set SequenceRule::at(const Set& sigma, std::size_t m) const {
    switch (kind) {
    case Kind::TailFill: return sigma_m(sigma, m);
    case Kind::Prefix: return Set::finite(sigma.truncate(m));
    case Kind::Constant: return sigma;
    case Kind::Explicit: return explicit_sets.at(m - 1);
    }
    return sigma;
}

std::size_t SequenceRule::length(std::size_t depth) const {
    return kind == Kind::Explicit ? explicit_sets.size() : depth;
}

std::string SequenceRule::name() const {
    switch (kind) {
    case Kind::TailFill: return "tail";
    case Kind::Prefix: return "prefix";
    case Kind::Constant: return "constant";
    case Kind::Explicit: break;
    }
    std::string out = "[";
    for (std::size_t i = 0; i < explicit_sets.size(); ++i) out += (i ? ";" : "") + explicit_sets[i].to_string();
    return out + "]";
}

SequenceRule parse_sequence_rule(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    SequenceRule r;
    if (text == "tail") return r;
    if (text == "prefix") {
        r.kind = SequenceRule::Kind::Prefix;
        return r;
    }
    if (text == "constant") {
        r.kind = SequenceRule::Kind::Constant;
        return r;
    }
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ParseError("sequence rule must be tail, prefix, constant or [set;set;...]");
    r.kind = SequenceRule::Kind::Explicit;
    std::string_view inner = text.substr(1, text.size() - 2);
    // ';' inside parentheses belongs to res(p;r).
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
        const char c = i < inner.size() ? inner[i] : ';';
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == ';' && depth == 0) {
            r.explicit_sets.push_back(parse_index_set(inner.substr(start, i - start)));
            start = i + 1;
        }
    }
    return r;
}

ConvergenceReport convergence_probe(const SystemFamily& family, const Set& sigma, const SequenceRule& rule,
                                    std::size_t depth, std::size_t n, std::size_t window, const MetricOptions& opts) {
    check_sizes(family, n, opts.terms);
    if (window > family.size()) throw DimensionMismatch("proxy window exceeds family size");
    const std::size_t length = rule.length(depth);
    if (length == 0) throw ParseError("empty sequence");
    const NormalizedFamilyView view(family, std::max(window, opts.terms));

    ConvergenceReport report;
    report.ds_limit_to_zero = metric_ds(family, sigma, Set::none(), n, opts);
    report.rows.resize(length);
    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(length);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        slot.run([&] {
            const std::size_t m = static_cast<std::size_t>(i) + 1;
            ConvergenceRow& row = report.rows[m - 1];
            const Set sm = rule.at(sigma, m);
            row.m = m;
            row.sigma_m = sm.to_string();
            row.rho = rho(sm, sigma);
            row.prefix = prefix_agreement(sm, sigma);
            row.ds_to_zero = metric_ds_serial(family, sm, Set::none(), n, opts);
            if (window > 0) {
                const auto diff = projector_differences_serial(family, sm, sigma, n, window, opts.exact);
                for (Index j = 1; j <= window; ++j)
                    row.proxies.push_back(sqrt_enclosure(norm_sq(diff[j - 1]) / view.norm_sq(j), opts.precision));
            }
        });
    }
    slot.rethrow();
    return report;
}

SemicontinuityReport semicontinuity_probe(const SystemFamily& family, const Set& sigma, const SequenceRule& rule,
                                          std::size_t depth, std::size_t n, const MetricOptions& opts,
                                          const Scalar& margin) {
    SemicontinuityReport r;
    r.convergence = convergence_probe(family, sigma, rule, depth, n, 0, opts);
    r.margin = margin;
    const auto& rows = r.convergence.rows;
    const std::size_t keep = std::max<std::size_t>(1, rows.size() / 2);
    const std::size_t from = rows.size() - keep;
    r.tail_from = rows[from].m;
    r.tail_range = rows[from].ds_to_zero;
    for (std::size_t i = from + 1; i < rows.size(); ++i) {
        r.tail_range.lo = std::min(r.tail_range.lo, rows[i].ds_to_zero.lo);
        r.tail_range.hi = std::max(r.tail_range.hi, rows[i].ds_to_zero.hi);
    }
    const Interval& limit = r.convergence.ds_limit_to_zero;
    r.violation = r.tail_range.hi < limit.lo - margin;
    r.jump_up = r.tail_range.lo > limit.hi;
    return r;
}

} // namespace mixedsys
