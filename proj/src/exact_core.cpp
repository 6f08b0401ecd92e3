#include "mixedsys/exact_core.hpp"

#include "mixedsys/errors.hpp"
#include "mixedsys/parallel.hpp"

#include <algorithm>
#include <string>

namespace mixedsys {

namespace {

using IntRow = std::vector<BigInt>;

void check_bits(const BigInt& x, const ExactOptions& opts) {
    if (opts.max_bits != 0 && mpz_sizeinbase(x.get_mpz_t(), 2) > opts.max_bits)
        throw BudgetExceeded("intermediate integer exceeds " + std::to_string(opts.max_bits) + " bits");
}

// Scales a rational row by the lcm of its denominators.
IntRow integer_row(std::span<const Scalar> row) {
    BigInt l = 1;
    for (const auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    IntRow out;
    out.reserve(row.size());
    for (const auto& q : row) out.push_back(q.get_num() * (l / q.get_den()));
    return out;
}

struct Echelon {
    std::vector<IntRow> rows;
    std::vector<std::size_t> pivot_cols;
};

// Fraction-free row echelon form. Pivots are searched only in columns
// [0, pivot_limit); all columns are updated. After step r every entry below
// the pivot rows is a minor of the original matrix, so each division by the
// previous pivot is exact.
Echelon fraction_free_echelon(std::vector<IntRow> a, std::size_t pivot_limit, const ExactOptions& opts) {
    Echelon out;
    const std::size_t n = a.size();
    const std::size_t cols = n == 0 ? 0 : a.front().size();
    if (opts.max_bits != 0)
        for (const auto& row : a)
            for (const auto& x : row) check_bits(x, opts);
    std::size_t r = 0;
    BigInt prev = 1;
    BigInt tmp;
    for (std::size_t c = 0; c < pivot_limit && r < n; ++c) {
        std::size_t p = r;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) continue;
        std::swap(a[r], a[p]);
        const BigInt& piv = a[r][c];
        for (std::size_t i = r + 1; i < n; ++i) {
            const BigInt lead = a[i][c];
            for (std::size_t j = c + 1; j < cols; ++j) {
                // a[i][j] = (piv * a[i][j] - lead * a[r][j]) / prev
                mpz_mul(tmp.get_mpz_t(), piv.get_mpz_t(), a[i][j].get_mpz_t());
                mpz_submul(tmp.get_mpz_t(), lead.get_mpz_t(), a[r][j].get_mpz_t());
                mpz_divexact(a[i][j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
                check_bits(a[i][j], opts);
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        out.pivot_cols.push_back(c);
        ++r;
    }
    a.resize(r);
    out.rows = std::move(a);
    return out;
}

std::vector<IntRow> integer_rows(const ExactMatrix& m) {
    std::vector<IntRow> rows;
    rows.reserve(m.rows());
    std::vector<Scalar> buf(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) buf[j] = m(i, j);
        rows.push_back(integer_row(buf));
    }
    return rows;
}

std::vector<IntRow> integer_rows(std::span<const SparseVector> vectors, std::size_t ambient) {
    std::vector<IntRow> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.max_index() > ambient) throw DimensionMismatch("generator support exceeds ambient window");
        IntRow row(ambient);
        if (!v.is_zero()) {
            const IntegerForm f = integer_form(v);
            for (const auto& [idx, n] : f.entries) row[idx - 1] = n;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Nullspace of an echelon form over `cols` columns, as primitive vectors.
std::vector<SparseVector> nullspace(const Echelon& e, std::size_t cols) {
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
    std::vector<SparseVector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Scalar> x(cols);
        x[f] = 1;
        for (std::size_t r = e.rows.size(); r-- > 0;) {
            const std::size_t c = e.pivot_cols[r];
            Scalar acc = 0;
            for (std::size_t j = c + 1; j < cols; ++j)
                if (x[j] != 0 && e.rows[r][j] != 0) acc += Scalar(e.rows[r][j]) * x[j];
            x[c] = -acc / Scalar(e.rows[r][c]);
        }
        basis.push_back(primitive(SparseVector::from_dense(std::span<const Scalar>(x))));
    }
    return basis;
}

} // namespace

ExactMatrix gram_serial(std::span<const SparseVector> vectors) {
    const std::size_t n = vectors.size();
    ExactMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            g(i, j) = dot(vectors[i], vectors[j]);
            if (j != i) g(j, i) = g(i, j);
        }
    return g;
}

ExactMatrix gram(std::span<const SparseVector> vectors) {
    const long n = static_cast<long>(vectors.size());
    ExactMatrix g(vectors.size(), vectors.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
        for (long j = i; j < n; ++j) g(i, j) = dot(vectors[i], vectors[j]);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

std::size_t rank(const ExactMatrix& m, const ExactOptions& opts) {
    return fraction_free_echelon(integer_rows(m), m.cols(), opts).pivot_cols.size();
}

std::size_t span_rank(std::span<const SparseVector> vectors, const ExactOptions& opts) {
    const std::size_t ambient = max_support(vectors);
    return fraction_free_echelon(integer_rows(vectors, ambient), ambient, opts).pivot_cols.size();
}

std::vector<Scalar> leading_principal_minors(const ExactMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("leading minors need a square matrix");
    const std::size_t n = m.rows();
    std::vector<IntRow> a = integer_rows(m);
    // Row scaling factors, to undo at the end: minor_k(original) = minor_k(scaled) / prod_{i<k} l_i.
    std::vector<Scalar> row_scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        BigInt l = 1;
        for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
        row_scale[i] = Scalar(l);
    }
    std::vector<Scalar> minors(n, Scalar(0));
    BigInt prev = 1;
    Scalar scale = 1;
    BigInt tmp;
    for (std::size_t k = 0; k < n; ++k) {
        scale *= row_scale[k];
        if (a[k][k] == 0) break;
        minors[k] = Scalar(a[k][k]) / scale;
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_mul(tmp.get_mpz_t(), a[k][k].get_mpz_t(), a[i][j].get_mpz_t());
                mpz_submul(tmp.get_mpz_t(), a[i][k].get_mpz_t(), a[k][j].get_mpz_t());
                mpz_divexact(a[i][j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    return minors;
}

ExactMatrix solve(const ExactMatrix& a, const ExactMatrix& b, const ExactOptions& opts) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n) throw DimensionMismatch("solve: shape mismatch");
    const std::size_t m = b.cols();
    ExactMatrix aug(n, n + m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        for (std::size_t j = 0; j < m; ++j) aug(i, n + j) = b(i, j);
    }
    const Echelon e = fraction_free_echelon(integer_rows(aug), n, opts);
    if (e.pivot_cols.size() != n) throw DependentGenerators("singular system (rank " + std::to_string(e.pivot_cols.size()) + " < " + std::to_string(n) + ")");
    ExactMatrix x(n, m);
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t i = n; i-- > 0;) {
            Scalar acc(e.rows[i][n + t]);
            for (std::size_t j = i + 1; j < n; ++j)
                if (e.rows[i][j] != 0) acc -= Scalar(e.rows[i][j]) * x(j, t);
            x(i, t) = acc / Scalar(e.rows[i][i]);
        }
    }
    return x;
}

std::vector<Scalar> solve(const ExactMatrix& a, std::span<const Scalar> b, const ExactOptions& opts) {
    ExactMatrix rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    const ExactMatrix x = solve(a, rhs, opts);
    std::vector<Scalar> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x(i, 0);
    return out;
}

std::vector<Scalar> project_coefficients(const SparseVector& v, std::span<const SparseVector> generators,
                                         const ExactOptions& opts) {
    if (generators.empty()) return {};
    const ExactMatrix g = gram(generators);
    std::vector<Scalar> rhs(generators.size());
    for (std::size_t i = 0; i < generators.size(); ++i) rhs[i] = dot(generators[i], v);
    return solve(g, rhs, opts);
}

SparseVector project(const SparseVector& v, std::span<const SparseVector> generators, const ExactOptions& opts) {
    const auto c = project_coefficients(v, generators, opts);
    SparseVector p;
    for (std::size_t i = 0; i < c.size(); ++i) p.axpy(c[i], generators[i]);
    return p;
}

std::vector<SparseVector> project_many(std::span<const SparseVector> vs, std::span<const SparseVector> generators,
                                       const ExactOptions& opts) {
    std::vector<SparseVector> out(vs.size());
    if (generators.empty() || vs.empty()) return out;
    const ExactMatrix g = gram(generators);
    ExactMatrix rhs(generators.size(), vs.size());
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t t = 0; t < vs.size(); ++t) rhs(i, t) = dot(generators[i], vs[t]);
    const ExactMatrix c = solve(g, rhs, opts);
    for (std::size_t t = 0; t < vs.size(); ++t)
        for (std::size_t i = 0; i < generators.size(); ++i) out[t].axpy(c(i, t), generators[i]);
    return out;
}

Scalar dist_sq(const SparseVector& v, std::span<const SparseVector> generators, const ExactOptions& opts) {
    GramEliminator elim(opts);
    for (const auto& g : generators) elim.add(g);
    return elim.dist_sq(v);
}

std::vector<SparseVector> complement_basis(std::span<const SparseVector> generators, std::size_t ambient,
                                           const ExactOptions& opts) {
    const Echelon e = fraction_free_echelon(integer_rows(generators, ambient), ambient, opts);
    return nullspace(e, ambient);
}

std::vector<SparseVector> intersect(std::span<const SparseVector> a, std::span<const SparseVector> b,
                                    std::size_t ambient, const ExactOptions& opts) {
    // span(a) ∩ span(b) = (a^⊥ + b^⊥)^⊥ inside the ambient window.
    std::vector<SparseVector> both = complement_basis(a, ambient, opts);
    auto cb = complement_basis(b, ambient, opts);
    both.insert(both.end(), cb.begin(), cb.end());
    return complement_basis(both, ambient, opts);
}

std::vector<SparseVector> independent_subset(std::span<const SparseVector> vectors, const ExactOptions& opts) {
    GramEliminator elim(opts);
    std::vector<SparseVector> out;
    for (const auto& v : vectors)
        if (elim.add(v)) out.push_back(v);
    return out;
}

bool same_span(std::span<const SparseVector> a, std::span<const SparseVector> b, const ExactOptions& opts) {
    const std::size_t ra = span_rank(a, opts);
    if (ra != span_rank(b, opts)) return false;
    std::vector<SparseVector> both(a.begin(), a.end());
    both.insert(both.end(), b.begin(), b.end());
    return span_rank(both, opts) == ra;
}

// --- GramEliminator -------------------------------------------------------

void GramEliminator::check_budget(const BigInt& x) const { check_bits(x, opts_); }

BigInt GramEliminator::reduce(const IntegerForm& w, std::vector<BigInt>* column) const {
    const std::size_t r = kept_.size();
    std::vector<BigInt> t(r + 1);
    for (std::size_t j = 0; j < r; ++j) t[j] = mixedsys::dot(w, kept_[j]);
    t[r] = mixedsys::dot(w, w);
    if (column) column->reserve(r);
    static const BigInt one = 1;
    BigInt tmp;
    for (std::size_t k = 0; k < r; ++k) {
        const BigInt& prev = k == 0 ? one : pivots_[k - 1];
        const BigInt& pk = pivots_[k];
        const BigInt tk = t[k];
        if (column) column->push_back(tk);
        const auto& row = rows_[k];
        for (std::size_t j = k + 1; j < r; ++j) {
            mpz_mul(tmp.get_mpz_t(), pk.get_mpz_t(), t[j].get_mpz_t());
            mpz_submul(tmp.get_mpz_t(), tk.get_mpz_t(), row[j - k].get_mpz_t());
            mpz_divexact(t[j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
            check_budget(t[j]);
        }
        mpz_mul(tmp.get_mpz_t(), pk.get_mpz_t(), t[r].get_mpz_t());
        mpz_submul(tmp.get_mpz_t(), tk.get_mpz_t(), tk.get_mpz_t());
        mpz_divexact(t[r].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
        check_budget(t[r]);
    }
    return t[r];
}

bool GramEliminator::add(const SparseVector& v) {
    if (v.is_zero()) return false;
    IntegerForm w = integer_form(v);
    std::vector<BigInt> column;
    BigInt d = reduce(w, &column);
    if (d < 0) throw InvariantViolation("Gram elimination produced a negative Schur complement");
    if (d == 0) return false;
    for (std::size_t k = 0; k < rows_.size(); ++k) rows_[k].push_back(std::move(column[k]));
    rows_.push_back({d});
    pivots_.push_back(std::move(d));
    kept_.push_back(std::move(w));
    return true;
}

Scalar GramEliminator::dist_sq(const SparseVector& v) const {
    if (v.is_zero()) return 0;
    const IntegerForm w = integer_form(v);
    const BigInt d = reduce(w, nullptr);
    Scalar out(d, determinant());
    out.canonicalize();
    return out * w.scale * w.scale;
}

} // namespace mixedsys
