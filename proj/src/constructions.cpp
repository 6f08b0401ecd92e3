#include "mixedsys/constructions.hpp"

#include "mixedsys/errors.hpp"
#include "mixedsys/exact_core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <random>

namespace mixedsys {

using Index = SystemFamily::Index;
using Set = EventuallyPeriodicSet;

namespace {

constexpr long max_param = 4096;

// 2^n / n^(j-1)
Scalar young_coefficient(Index n, Index j) {
    Scalar q(ipow(2, n), ipow(n, j - 1));
    q.canonicalize();
    return q;
}

Index triangular(Index m) { return m * (m + 1) / 2; }

// Superscript of x_n in the infinite-set family: position inside the block
// T_m + 1 .. T_{m+1}, counted from 0.
std::size_t block_superscript(Index n) {
    Index m = 0;
    while (triangular(m + 1) < n) ++m;
    return static_cast<std::size_t>(n - triangular(m) - 1);
}

void check_defect_set(const std::vector<long>& d) {
    if (d.empty() || d.front() != 0) throw MalformedDefectSet("defect set must start with 0");
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i] <= d[i - 1]) throw MalformedDefectSet("defect set must be strictly increasing");
    if (d.back() > max_param) throw TooLarge("defect value exceeds " + std::to_string(max_param));
}

void check_range(const char* what, long v, long lo) {
    if (v < lo) throw ParseError(std::string(what) + " must be at least " + std::to_string(lo));
    if (v > max_param) throw TooLarge(std::string(what) + " exceeds " + std::to_string(max_param));
}

// σ meets the superscript-j positions T_m + j + 1 (m >= j) infinitely often.
// T_m mod p has period 2p in m, so one window of m decides it.
bool meets_block_class(const Set& sigma, std::size_t j) {
    const Index p = sigma.period();
    for (Index m = j; m < j + 2 * p; ++m)
        if (sigma.pattern()[(triangular(m) + j + 1) % p]) return true;
    return false;
}

Set finite_set_class(const SystemFamily& f, std::size_t j) {
    const Index period = f.spec().defects.size();
    return Set::residues(period, {(j + 1) % period});
}

// Smallest superscript class with infinitely many members in σ, for the
// defect-set families; classes at or past s count as one (k_j = k_s there).
std::optional<std::size_t> first_infinite_class(const SystemFamily& f, const Set& sigma) {
    const std::size_t s = f.spec().defects.size() - 1;
    for (std::size_t j = 0; j < s; ++j) {
        const bool infinite = f.kind() == FamilyKind::FiniteDefectSet
                                  ? !set_intersection(sigma, finite_set_class(f, j)).is_finite()
                                  : meets_block_class(sigma, j);
        if (infinite) return j;
    }
    if (!sigma.is_finite()) return s;
    return std::nullopt;
}

} // namespace

std::string_view kind_name(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::E1PlusEk: return "e1-plus-ek";
    case FamilyKind::Young: return "young";
    case FamilyKind::DefectPair: return "defect-pair";
    case FamilyKind::FiniteDefectSet: return "finite-set";
    case FamilyKind::InfiniteDefectSet: return "infinite-set";
    case FamilyKind::RandomFinite: return "random";
    }
    return "?";
}

std::string FamilySpec::to_string() const {
    std::string out(kind_name(kind));
    auto list = [&](bool with_inf) {
        out += "(";
        for (std::size_t i = 0; i < defects.size(); ++i) out += (i ? "," : "") + std::to_string(defects[i]);
        if (with_inf) out += ",inf";
        out += ")";
    };
    switch (kind) {
    case FamilyKind::E1PlusEk: break;
    case FamilyKind::Young: out += "(W=" + std::to_string(width) + ")"; break;
    case FamilyKind::DefectPair: out += "(m=" + std::to_string(m) + ")"; break;
    case FamilyKind::FiniteDefectSet: list(false); break;
    case FamilyKind::InfiniteDefectSet: list(true); break;
    case FamilyKind::RandomFinite:
        out += "(D=" + std::to_string(dim) + ",n=" + std::to_string(count) + ",seed=" + std::to_string(seed) +
               ",perturb=" + (perturb ? "1" : "0") + ")";
        break;
    }
    return out;
}

FamilySpec parse_family(std::string_view text) {
    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError("family '" + std::string(text) + "': " + msg);
    };
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    auto to_long = [&](std::string_view s) {
        s = trim(s);
        long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw fail("bad integer '" + std::string(s) + "'");
        return v;
    };

    const std::string_view t = trim(text);
    const std::size_t open = t.find('(');
    const std::string_view name = trim(t.substr(0, open));
    std::vector<std::string_view> args;
    if (open != std::string_view::npos) {
        if (t.back() != ')') throw fail("missing ')'");
        std::string_view inner = t.substr(open + 1, t.size() - open - 2);
        if (!trim(inner).empty()) {
            for (;;) {
                const std::size_t comma = inner.find(',');
                args.push_back(trim(inner.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                inner.remove_prefix(comma + 1);
            }
        }
    }

    // Named arguments key=value; every key must be known and appear once.
    auto named = [&](std::initializer_list<std::string_view> required, std::initializer_list<std::string_view> optional) {
        std::map<std::string, long, std::less<>> out;
        for (auto a : args) {
            const std::size_t eq = a.find('=');
            if (eq == std::string_view::npos) throw fail("expected key=value, got '" + std::string(a) + "'");
            const std::string key(trim(a.substr(0, eq)));
            const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                               std::find(optional.begin(), optional.end(), key) != optional.end();
            if (!known) throw fail("unknown parameter '" + key + "'");
            if (!out.emplace(key, to_long(a.substr(eq + 1))).second) throw fail("repeated parameter '" + key + "'");
        }
        for (auto r : required)
            if (!out.count(r)) throw fail("missing parameter '" + std::string(r) + "'");
        return out;
    };

    FamilySpec spec;
    if (name == "e1-plus-ek") {
        spec.kind = FamilyKind::E1PlusEk;
        if (!args.empty()) throw fail("takes no parameters");
    } else if (name == "young") {
        spec.kind = FamilyKind::Young;
        spec.width = named({"W"}, {}).at("W");
        check_range("W", spec.width, 0);
    } else if (name == "defect-pair") {
        spec.kind = FamilyKind::DefectPair;
        spec.m = named({"m"}, {}).at("m");
        check_range("m", spec.m, 1);
    } else if (name == "finite-set" || name == "infinite-set") {
        const bool infinite = name == "infinite-set";
        spec.kind = infinite ? FamilyKind::InfiniteDefectSet : FamilyKind::FiniteDefectSet;
        if (args.empty()) throw MalformedDefectSet("empty defect set");
        const bool ends_inf = args.back() == "inf";
        if (infinite && !ends_inf) throw MalformedDefectSet("infinite-set must end with inf");
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "inf") {
                if (!infinite || i + 1 != args.size()) throw MalformedDefectSet("inf is only allowed last, in infinite-set");
                continue;
            }
            spec.defects.push_back(to_long(args[i]));
        }
        check_defect_set(spec.defects);
    } else if (name == "random") {
        spec.kind = FamilyKind::RandomFinite;
        const auto p = named({"D", "n"}, {"seed", "perturb"});
        spec.dim = p.at("D");
        spec.count = p.at("n");
        check_range("D", spec.dim, 1);
        check_range("n", spec.count, 1);
        if (spec.count > spec.dim) throw fail("n must not exceed D");
        if (p.count("seed")) {
            if (p.at("seed") < 0) throw fail("seed must be non-negative");
            spec.seed = static_cast<std::uint64_t>(p.at("seed"));
        }
        if (p.count("perturb")) {
            if (p.at("perturb") != 0 && p.at("perturb") != 1) throw fail("perturb is 0 or 1");
            spec.perturb = p.at("perturb") == 1;
        }
    } else {
        throw fail("unknown family '" + std::string(name) + "'");
    }
    return spec;
}

std::size_t SystemFamily::ambient(std::size_t n) const {
    switch (kind()) {
    case FamilyKind::E1PlusEk: return n + 1;
    case FamilyKind::Young: return static_cast<std::size_t>(spec_.width) + n;
    case FamilyKind::DefectPair: return static_cast<std::size_t>(spec_.m) + n;
    case FamilyKind::FiniteDefectSet: return static_cast<std::size_t>(spec_.defects.back()) + n;
    case FamilyKind::InfiniteDefectSet: return 2 * n;
    case FamilyKind::RandomFinite: return static_cast<std::size_t>(spec_.dim);
    }
    return 0;
}

Index SystemFamily::coordinate(char block, Index j) const {
    if (j == 0) throw ParseError("basis labels start at 1");
    if (block == 'e') {
        switch (kind()) {
        case FamilyKind::Young: return static_cast<Index>(spec_.width) + j;
        case FamilyKind::InfiniteDefectSet: return 2 * j;
        default: return j;
        }
    }
    if (block == 'f') {
        if (kind() == FamilyKind::Young) {
            if (j > static_cast<Index>(spec_.width)) throw UnsupportedFamily("f_" + std::to_string(j) + " is zero here");
            return j;
        }
        if (kind() == FamilyKind::InfiniteDefectSet) return 2 * j - 1;
    }
    throw UnsupportedFamily(std::string(kind_name(kind())) + " has no " + block + "-block");
}

std::string SystemFamily::coordinate_label(Index c) const {
    if (kind() == FamilyKind::Young) {
        const Index w = static_cast<Index>(spec_.width);
        return c <= w ? "f" + std::to_string(c) : "e" + std::to_string(c - w);
    }
    if (kind() == FamilyKind::InfiniteDefectSet)
        return c % 2 ? "f" + std::to_string((c + 1) / 2) : "e" + std::to_string(c / 2);
    return "e" + std::to_string(c);
}

std::optional<std::size_t> SystemFamily::superscript(Index k) const {
    if (kind() == FamilyKind::FiniteDefectSet) return static_cast<std::size_t>((k - 1) % spec_.defects.size());
    if (kind() == FamilyKind::InfiniteDefectSet) return block_superscript(k);
    return std::nullopt;
}

long SystemFamily::defect_number(std::size_t j) const {
    const auto& d = spec_.defects;
    if (d.empty()) throw UnsupportedFamily(std::string(kind_name(kind())) + " has no defect set");
    return j < d.size() ? d[j] : d.back();
}

SystemFamily make_family(const FamilySpec& spec, std::size_t n) {
    SystemFamily f;
    f.spec_ = spec;
    auto unit = [](Index c) { return SparseVector::unit(c); };

    switch (spec.kind) {
    case FamilyKind::E1PlusEk:
        for (Index i = 1; i <= n; ++i) {
            f.primal_.push_back(unit(1) + unit(i + 1));
            f.duals_.push_back(unit(i + 1));
        }
        break;
    case FamilyKind::Young: {
        check_range("W", spec.width, 0);
        const Index w = static_cast<Index>(spec.width);
        for (Index k = 1; k <= n; ++k) {
            std::vector<SparseVector::Entry> e;
            for (Index j = 1; j <= std::min(k, w); ++j) e.push_back({j, young_coefficient(k, j)});
            e.push_back({w + k, 1});
            f.primal_.push_back(SparseVector::from_entries(std::move(e)));
            f.duals_.push_back(unit(w + k));
        }
        break;
    }
    case FamilyKind::DefectPair: {
        check_range("m", spec.m, 1);
        const Index m = static_cast<Index>(spec.m);
        for (Index k = 1; k <= n; ++k) {
            std::vector<SparseVector::Entry> e;
            for (Index i = 1; i <= m; ++i) e.push_back({i, Scalar(ipow(k, i - 1))});
            e.push_back({m + k, 1});
            f.primal_.push_back(SparseVector::from_entries(std::move(e)));
            f.duals_.push_back(unit(m + k));
        }
        break;
    }
    case FamilyKind::FiniteDefectSet: {
        check_defect_set(spec.defects);
        const Index ks = static_cast<Index>(spec.defects.back());
        for (Index k = 1; k <= n; ++k) {
            const Index kj = static_cast<Index>(f.defect_number(*f.superscript(k)));
            std::vector<SparseVector::Entry> e;
            for (Index l = kj + 1; l <= ks; ++l) e.push_back({l, Scalar(ipow(k, l - 1))});
            e.push_back({k + ks, 1});
            f.primal_.push_back(SparseVector::from_entries(std::move(e)));
            f.duals_.push_back(unit(k + ks));
        }
        break;
    }
    case FamilyKind::InfiniteDefectSet: {
        check_defect_set(spec.defects);
        for (Index k = 1; k <= n; ++k) {
            const Index kj = static_cast<Index>(f.defect_number(*f.superscript(k)));
            std::vector<SparseVector::Entry> e;
            for (Index j = kj + 1; j <= k; ++j) e.push_back({2 * j - 1, young_coefficient(k, j)});
            e.push_back({2 * k, 1});
            f.primal_.push_back(SparseVector::from_entries(std::move(e)));
            f.duals_.push_back(unit(2 * k));
        }
        break;
    }
    case FamilyKind::RandomFinite: {
        check_range("D", spec.dim, 1);
        check_range("n", spec.count, 1);
        if (spec.count > spec.dim) throw DimensionMismatch("random family needs n <= D");
        const std::size_t dim = static_cast<std::size_t>(spec.dim);
        const std::size_t count = static_cast<std::size_t>(spec.count);
        std::mt19937_64 rng(spec.seed);
        auto small = [&](unsigned radius) { return static_cast<long>(rng() % (2 * radius + 1)) - static_cast<long>(radius); };

        constexpr int max_attempts = 100;
        for (int attempt = 0; attempt < max_attempts && f.primal_.size() != count; ++attempt) {
            f.primal_.clear();
            for (std::size_t i = 0; i < count; ++i) {
                std::vector<Scalar> d(dim);
                for (auto& x : d) x = small(3);
                f.primal_.push_back(SparseVector::from_dense(std::span<const Scalar>(d)));
            }
            if (span_rank(f.primal_) != count) f.primal_.clear();
        }
        if (f.primal_.empty()) throw InvariantViolation("no independent random draw in " + std::to_string(max_attempts) + " attempts");

        // Dual basis inside the span: x_k* = sum_i (G^{-1})_{ik} x_i.
        const ExactMatrix ginv = solve(gram(f.primal_), ExactMatrix::identity(count));
        const std::vector<SparseVector> comp = spec.perturb ? complement_basis(f.primal_, dim) : std::vector<SparseVector>{};
        for (std::size_t k = 0; k < count; ++k) {
            SparseVector d;
            for (std::size_t i = 0; i < count; ++i) d.axpy(ginv(i, k), f.primal_[i]);
            for (const auto& c : comp) d.axpy(Scalar(small(2)), c);
            f.duals_.push_back(std::move(d));
        }
        break;
    }
    }
    return f;
}

SystemFamily make_e1_plus_ek(std::size_t n) { return make_family(FamilySpec{}, n); }

SystemFamily make_young(long width, std::size_t n) {
    FamilySpec spec;
    spec.kind = FamilyKind::Young;
    spec.width = width;
    return make_family(spec, n);
}

SystemFamily make_defect_pair(long m, std::size_t n) {
    FamilySpec spec;
    spec.kind = FamilyKind::DefectPair;
    spec.m = m;
    return make_family(spec, n);
}

SystemFamily make_finite_defect_set(const std::vector<long>& defects, std::size_t n) {
    FamilySpec spec;
    spec.kind = FamilyKind::FiniteDefectSet;
    spec.defects = defects;
    return make_family(spec, n);
}

SystemFamily make_infinite_defect_set(const std::vector<long>& defects, std::size_t n) {
    FamilySpec spec;
    spec.kind = FamilyKind::InfiniteDefectSet;
    spec.defects = defects;
    return make_family(spec, n);
}

SystemFamily make_random_finite(long dim, long count, std::uint64_t seed, bool perturb) {
    FamilySpec spec;
    spec.kind = FamilyKind::RandomFinite;
    spec.dim = dim;
    spec.count = count;
    spec.seed = seed;
    spec.perturb = perturb;
    return make_family(spec, 0);
}

ExactMatrix biorthogonality(const SystemFamily& family, std::size_t n) {
    if (n > family.size()) throw DimensionMismatch("truncation exceeds family size");
    ExactMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) m(j, k) = dot(family.primal()[j], family.duals()[k]);
    return m;
}

Normalization normalize(const SystemFamily& family, const Set& sigma) {
    switch (family.kind()) {
    case FamilyKind::E1PlusEk:
    case FamilyKind::DefectPair:
        if (sigma.is_finite()) return {Set::none(), sigma};
        return {sigma, Set::none()};
    case FamilyKind::FiniteDefectSet: {
        Set moved = Set::none();
        for (std::size_t j = 0; j < family.spec().defects.size(); ++j) {
            const Set part = set_intersection(sigma, finite_set_class(family, j));
            if (part.is_finite()) moved = set_union(moved, part);
        }
        return {set_difference(sigma, moved), moved};
    }
    case FamilyKind::InfiniteDefectSet: {
        const auto j1 = first_infinite_class(family, sigma);
        if (!j1) return {sigma, Set::none()};
        // Members of the finite classes all lie at or below the exception bound.
        std::vector<Index> moved;
        for (Index k = 1; k <= sigma.exception_bound(); ++k)
            if (sigma.contains(k) && block_superscript(k) < *j1) moved.push_back(k);
        const Set m = Set::finite(moved);
        return {set_difference(sigma, m), m};
    }
    case FamilyKind::Young:
    case FamilyKind::RandomFinite: return {sigma, Set::none()};
    }
    return {sigma, Set::none()};
}

ExtCount predicted_defect(const SystemFamily& family, const Set& sigma) {
    switch (family.kind()) {
    case FamilyKind::E1PlusEk: return ExtCount::finite(sigma.is_finite() ? 1 : 0);
    case FamilyKind::DefectPair:
        return ExtCount::finite(sigma.is_finite() ? static_cast<std::uint64_t>(family.spec().m) : 0);
    case FamilyKind::Young:
        return ExtCount::finite(sigma.is_finite() ? static_cast<std::uint64_t>(family.spec().width) : 0);
    case FamilyKind::FiniteDefectSet:
    case FamilyKind::InfiniteDefectSet: {
        const auto j1 = first_infinite_class(family, sigma);
        if (!j1) {
            if (family.kind() == FamilyKind::InfiniteDefectSet) return ExtCount::infinite();
            return ExtCount::finite(static_cast<std::uint64_t>(family.spec().defects.back()));
        }
        return ExtCount::finite(static_cast<std::uint64_t>(family.defect_number(*j1)));
    }
    case FamilyKind::RandomFinite: break;
    }
    throw UnsupportedFamily("no limiting prediction for random families");
}

WitnessSpace witness_space(const SystemFamily& family, const Set& sigma, std::size_t n) {
    if (n > family.size()) throw DimensionMismatch("truncation exceeds family size");
    WitnessSpace w;
    const ExtCount predicted = predicted_defect(family, sigma);
    auto units = [&](char block, std::uint64_t count) {
        for (Index j = 1; j <= count; ++j) w.vectors.push_back(SparseVector::unit(family.coordinate(block, j)));
    };

    switch (family.kind()) {
    case FamilyKind::E1PlusEk:
    case FamilyKind::DefectPair:
    case FamilyKind::FiniteDefectSet: units('e', predicted.value()); break;
    case FamilyKind::Young: {
        if (predicted.value() == 0) break;
        // f_j - sum over k in σ, k >= j, of (2^k / k^(j-1)) e_k
        for (Index j = 1; j <= predicted.value(); ++j) {
            SparseVector v = SparseVector::unit(family.coordinate('f', j));
            for (Index k : sigma.truncate(n))
                if (k >= j) v.axpy(-young_coefficient(k, j), SparseVector::unit(family.coordinate('e', k)));
            w.vectors.push_back(std::move(v));
        }
        break;
    }
    case FamilyKind::InfiniteDefectSet: {
        if (!predicted.is_infinite()) {
            units('f', predicted.value());
            break;
        }
        // f_j + x' with x' = -sum (2^k / k^(j-1)) e_k over the k in σ whose x_k involves f_j.
        w.unbounded = true;
        const std::vector<Index> members = sigma.truncate(n);
        for (Index j = 1; j <= n; ++j) {
            SparseVector v = SparseVector::unit(family.coordinate('f', j));
            for (Index k : members) {
                const Index kj = static_cast<Index>(family.defect_number(*family.superscript(k)));
                if (kj + 1 <= j && j <= k) v.axpy(-young_coefficient(k, j), SparseVector::unit(family.coordinate('e', k)));
            }
            w.vectors.push_back(std::move(v));
        }
        break;
    }
    case FamilyKind::RandomFinite: break;
    }
    return w;
}

} // namespace mixedsys
