#ifndef MIXEDSYS_SPARSE_VECTOR_HPP
#define MIXEDSYS_SPARSE_VECTOR_HPP

#include "mixedsys/scalar.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mixedsys {

/// Finitely supported vector over the ambient orthonormal basis e_1, e_2, ...
///
/// Indices are 1-based and strictly increasing; stored values are never zero,
/// so the zero vector is the empty entry list and equality is structural.
class SparseVector {
public:
    using Index = std::size_t;

    struct Entry {
        Index index;
        Scalar value;
        bool operator==(const Entry&) const = default;
    };

    SparseVector() = default;

    /// Sorts, merges duplicate indices by summing, drops zeros. Index 0 is rejected.
    static SparseVector from_entries(std::vector<Entry> entries);
    /// dense[i] becomes the coordinate of e_{i+1}.
    static SparseVector from_dense(std::span<const Scalar> dense);
    static SparseVector from_dense(std::initializer_list<long> dense);
    static SparseVector unit(Index i);

    const std::vector<Entry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    std::size_t nnz() const { return entries_.size(); }
    /// 0 for the zero vector.
    Index max_index() const { return entries_.empty() ? 0 : entries_.back().index; }
    Scalar at(Index i) const;

    std::vector<Scalar> to_dense(std::size_t ambient) const;

    SparseVector& operator+=(const SparseVector& other);
    SparseVector& operator-=(const SparseVector& other);
    SparseVector& operator*=(const Scalar& s);
    /// this += s * other
    SparseVector& axpy(const Scalar& s, const SparseVector& other);

    bool operator==(const SparseVector&) const = default;

private:
    std::vector<Entry> entries_;
};

SparseVector operator+(SparseVector a, const SparseVector& b);
SparseVector operator-(SparseVector a, const SparseVector& b);
SparseVector operator*(const Scalar& s, SparseVector v);

Scalar dot(const SparseVector& a, const SparseVector& b);
Scalar norm_sq(const SparseVector& v);

/// Largest support index across a list (0 if all are zero).
SparseVector::Index max_support(std::span<const SparseVector> vs);

/// Integer vector proportional to a nonzero rational one: v = scale * w with w
/// primitive (content 1) and scale > 0.
struct IntegerForm {
    std::vector<std::pair<SparseVector::Index, BigInt>> entries;
    Scalar scale;
};
IntegerForm integer_form(const SparseVector& v);
BigInt dot(const IntegerForm& a, const IntegerForm& b);

/// Scales a nonzero vector to its primitive integer representative.
SparseVector primitive(const SparseVector& v);

} // namespace mixedsys

#endif
