#ifndef MIXEDSYS_EXACT_CORE_HPP
#define MIXEDSYS_EXACT_CORE_HPP

#include "mixedsys/exact_matrix.hpp"
#include "mixedsys/sparse_vector.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mixedsys {

/// Limits on intermediate integer size. max_bits == 0 means unlimited.
/// Exceeding the limit throws BudgetExceeded.
struct ExactOptions {
    std::size_t max_bits = 0;
};

/// result(i, j) = <v_i, v_j>. OpenMP over rows.
ExactMatrix gram(std::span<const SparseVector> vectors);
/// Single-threaded reference for gram().
ExactMatrix gram_serial(std::span<const SparseVector> vectors);

/// Exact rank over Q by fraction-free (Bareiss) elimination. Rows are first
/// scaled to integers; pivot is the first nonzero entry of each column.
std::size_t rank(const ExactMatrix& m, const ExactOptions& opts = {});

/// dim span(vectors), computed on the coefficient matrix directly.
std::size_t span_rank(std::span<const SparseVector> vectors, const ExactOptions& opts = {});

/// Leading principal minors d_1..d_n. For a PSD matrix every minor after the
/// first zero one is zero too, which is what is returned in that case.
std::vector<Scalar> leading_principal_minors(const ExactMatrix& m);

/// Solves a x = b for square nonsingular a. Throws DependentGenerators when a
/// is singular.
std::vector<Scalar> solve(const ExactMatrix& a, std::span<const Scalar> b, const ExactOptions& opts = {});
/// Multiple right-hand sides; b has a.rows() rows. Returns x with the same shape as b.
ExactMatrix solve(const ExactMatrix& a, const ExactMatrix& b, const ExactOptions& opts = {});

/// Coefficients c with sum c_i g_i = orthogonal projection of v onto
/// span(generators). Requires independent generators (DependentGenerators otherwise).
std::vector<Scalar> project_coefficients(const SparseVector& v, std::span<const SparseVector> generators,
                                         const ExactOptions& opts = {});

/// The projection itself.
SparseVector project(const SparseVector& v, std::span<const SparseVector> generators, const ExactOptions& opts = {});

/// Projects every vector of vs with one elimination of the Gram system.
std::vector<SparseVector> project_many(std::span<const SparseVector> vs, std::span<const SparseVector> generators,
                                       const ExactOptions& opts = {});

/// ||v - P v||^2 for the projection onto span(generators). Dependent
/// generators are pruned.
Scalar dist_sq(const SparseVector& v, std::span<const SparseVector> generators, const ExactOptions& opts = {});

/// Basis (primitive integer vectors) of the orthogonal complement of
/// span(generators) inside coordinates 1..ambient.
std::vector<SparseVector> complement_basis(std::span<const SparseVector> generators, std::size_t ambient,
                                           const ExactOptions& opts = {});

/// Basis of span(a) ∩ span(b) inside coordinates 1..ambient.
std::vector<SparseVector> intersect(std::span<const SparseVector> a, std::span<const SparseVector> b,
                                    std::size_t ambient, const ExactOptions& opts = {});

/// Basis of span(vectors): the independent subset, first-come order.
std::vector<SparseVector> independent_subset(std::span<const SparseVector> vectors, const ExactOptions& opts = {});

/// span(a) == span(b).
bool same_span(std::span<const SparseVector> a, std::span<const SparseVector> b, const ExactOptions& opts = {});

/// Incremental symmetric fraction-free elimination of a growing Gram matrix.
///
/// Generators are kept as primitive integer vectors. For the kept list
/// g_0..g_{r-1}, row k stores the Bareiss stage-k entries A^(k)(k, j), j >= k,
/// where A^(k)(i, j) is the minor over rows {0..k-1, i} and columns
/// {0..k-1, j}. Adding or probing a vector costs O(r^2) integer updates; a
/// generator whose final diagonal entry is zero lies in the current span and
/// is dropped.
class GramEliminator {
public:
    explicit GramEliminator(ExactOptions opts = {}) : opts_(opts) {}

    /// Returns true when v was independent and has been kept.
    bool add(const SparseVector& v);
    /// Squared distance from v to the current span.
    Scalar dist_sq(const SparseVector& v) const;

    std::size_t rank() const { return kept_.size(); }
    /// Gram determinant of the kept primitive integer generators.
    BigInt determinant() const { return pivots_.empty() ? BigInt(1) : pivots_.back(); }

private:
    // Reduced row of w against all pivots. Returns the final diagonal entry
    // and, when store is non-null, the stage-k values needed to extend rows_.
    BigInt reduce(const IntegerForm& w, std::vector<BigInt>* column) const;
    void check_budget(const BigInt& x) const;

    ExactOptions opts_;
    std::vector<IntegerForm> kept_;
    std::vector<std::vector<BigInt>> rows_;  // rows_[k][j - k]
    std::vector<BigInt> pivots_;             // pivots_[k] = rows_[k][0]
};

} // namespace mixedsys

#endif
