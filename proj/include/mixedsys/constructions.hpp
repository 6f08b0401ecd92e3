#ifndef MIXEDSYS_CONSTRUCTIONS_HPP
#define MIXEDSYS_CONSTRUCTIONS_HPP

#include "mixedsys/exact_matrix.hpp"
#include "mixedsys/index_set.hpp"
#include "mixedsys/sparse_vector.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixedsys {

enum class FamilyKind { E1PlusEk, Young, DefectPair, FiniteDefectSet, InfiniteDefectSet, RandomFinite };

std::string_view kind_name(FamilyKind kind);

/// Kind plus named parameters. The truncation count is not stored here
/// except for RandomFinite, whose size is intrinsic.
///
/// Descriptor text (docs/family_grammar.md):
///   e1-plus-ek | young(W=2) | defect-pair(m=3) | finite-set(0,1,3)
///   infinite-set(0,2,inf) | random(D=4,n=2,seed=7,perturb=1)
struct FamilySpec {
    FamilyKind kind = FamilyKind::E1PlusEk;
    long width = 0;                   // Young W
    long m = 0;                       // DefectPair
    std::vector<long> defects;        // finite part of S, starting with 0
    long dim = 0;                     // RandomFinite D
    long count = 0;                   // RandomFinite n
    std::uint64_t seed = 0;
    bool perturb = false;

    std::string to_string() const;
    bool operator==(const FamilySpec&) const = default;
};

/// Throws ParseError, MalformedDefectSet.
FamilySpec parse_family(std::string_view text);

/// A family truncated to its first size() vectors, with an exact biorthogonal
/// system. Indices are 1-based. Vector k has the same coordinates at every
/// truncation, so a family built at n also serves every n' <= n.
///
/// Coordinate layouts:
///   e1-plus-ek     e_c at c; internal x_i is e_1 + e_{i+1}, usually indexed as x_{i+1}
///   young          f_j at j (j <= W), e_k at W + k
///   defect-pair    e_c at c
///   finite-set     e_c at c
///   infinite-set   f_j at 2j - 1, e_n at 2n
///   random         e_c at c, ambient D
class SystemFamily {
public:
    using Index = SparseVector::Index;

    const FamilySpec& spec() const { return spec_; }
    FamilyKind kind() const { return spec_.kind; }
    std::string descriptor() const { return spec_.to_string(); }

    std::size_t size() const { return primal_.size(); }
    /// Coordinates used by the first n vectors and their duals.
    std::size_t ambient(std::size_t n) const;
    std::size_t ambient() const { return ambient(size()); }
    /// Conventional index minus internal index.
    int index_offset() const { return spec_.kind == FamilyKind::E1PlusEk ? 1 : 0; }

    const SparseVector& x(Index k) const { return primal_.at(k - 1); }
    const SparseVector& dual(Index k) const { return duals_.at(k - 1); }
    std::span<const SparseVector> primal() const { return primal_; }
    std::span<const SparseVector> duals() const { return duals_; }

    /// Coordinate of f_j (block 'f') or e_j (block 'e'). Throws UnsupportedFamily
    /// when the family has no such block.
    Index coordinate(char block, Index j) const;
    /// "e3", "f2".
    std::string coordinate_label(Index c) const;

    /// Superscript j of x_k = x_k^j for the defect-set families; nullopt otherwise.
    std::optional<std::size_t> superscript(Index k) const;

    /// The number k_j, with k_j = k_s past the finite part.
    long defect_number(std::size_t j) const;

private:
    friend SystemFamily make_family(const FamilySpec& spec, std::size_t n);

    FamilySpec spec_;
    std::vector<SparseVector> primal_;
    std::vector<SparseVector> duals_;
};

SystemFamily make_e1_plus_ek(std::size_t n);
SystemFamily make_young(long width, std::size_t n);
SystemFamily make_defect_pair(long m, std::size_t n);
SystemFamily make_finite_defect_set(const std::vector<long>& defects, std::size_t n);
/// defects is the finite part of S; infinity is implied.
SystemFamily make_infinite_defect_set(const std::vector<long>& defects, std::size_t n);
SystemFamily make_random_finite(long dim, long count, std::uint64_t seed, bool perturb);
/// n is ignored for RandomFinite.
SystemFamily make_family(const FamilySpec& spec, std::size_t n);

/// result(j, k) = <x_j, x_k*> for j, k <= n.
ExactMatrix biorthogonality(const SystemFamily& family, std::size_t n);

/// Mixed index split after dropping from σ the members that the defect
/// argument may move to σ^c without changing the defect: all of σ when σ
/// is finite (e1-plus-ek, defect-pair), the finite superscript classes
/// (finite-set), the finite classes below the first infinite one (infinite-set).
struct Normalization {
    EventuallyPeriodicSet sigma;
    EventuallyPeriodicSet moved;  // always finite
};

Normalization normalize(const SystemFamily& family, const EventuallyPeriodicSet& sigma);

/// Limiting defect of the infinite family for σ. Throws UnsupportedFamily for random.
ExtCount predicted_defect(const SystemFamily& family, const EventuallyPeriodicSet& sigma);

struct WitnessSpace {
    std::vector<SparseVector> vectors;
    /// The family supplies a new independent witness for every f_j; only the
    /// first n fit in the truncation.
    bool unbounded = false;
};

/// Vectors spanning the limiting orthogonal complement of the normalized mixed
/// system, realized at truncation n (n <= family.size()). Throws UnsupportedFamily.
WitnessSpace witness_space(const SystemFamily& family, const EventuallyPeriodicSet& sigma, std::size_t n);

} // namespace mixedsys

#endif
