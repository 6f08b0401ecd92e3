#include "mixedsys/sparse_vector.hpp"

#include "mixedsys/errors.hpp"

#include <algorithm>

namespace mixedsys {

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.index < b.index; });
    SparseVector v;
    for (auto& e : entries) {
        if (e.index == 0) throw DimensionMismatch("basis indices are 1-based");
        if (!v.entries_.empty() && v.entries_.back().index == e.index) {
            v.entries_.back().value += e.value;
            if (v.entries_.back().value == 0) v.entries_.pop_back();
        } else if (e.value != 0) {
            e.value.canonicalize();
            v.entries_.push_back(std::move(e));
        }
    }
    return v;
}

SparseVector SparseVector::from_dense(std::span<const Scalar> dense) {
    SparseVector v;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0) v.entries_.push_back({i + 1, dense[i]});
    return v;
}

SparseVector SparseVector::from_dense(std::initializer_list<long> dense) {
    std::vector<Scalar> d(dense.begin(), dense.end());
    return from_dense(std::span<const Scalar>(d));
}

SparseVector SparseVector::unit(Index i) {
    if (i == 0) throw DimensionMismatch("basis indices are 1-based");
    SparseVector v;
    v.entries_.push_back({i, Scalar(1)});
    return v;
}

Scalar SparseVector::at(Index i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index idx) { return e.index < idx; });
    return (it != entries_.end() && it->index == i) ? it->value : Scalar(0);
}

std::vector<Scalar> SparseVector::to_dense(std::size_t ambient) const {
    if (max_index() > ambient) throw DimensionMismatch("vector support exceeds ambient window");
    std::vector<Scalar> d(ambient);
    for (const auto& e : entries_) d[e.index - 1] = e.value;
    return d;
}

SparseVector& SparseVector::axpy(const Scalar& s, const SparseVector& other) {
    if (s == 0 || other.is_zero()) return *this;
    std::vector<Entry> out;
    out.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->index < b->index)) {
            out.push_back(std::move(*a++));
        } else if (a == entries_.end() || b->index < a->index) {
            out.push_back({b->index, s * b->value});
            ++b;
        } else {
            Scalar v = a->value + s * b->value;
            if (v != 0) out.push_back({a->index, std::move(v)});
            ++a;
            ++b;
        }
    }
    entries_ = std::move(out);
    return *this;
}

SparseVector& SparseVector::operator+=(const SparseVector& other) { return axpy(Scalar(1), other); }
SparseVector& SparseVector::operator-=(const SparseVector& other) { return axpy(Scalar(-1), other); }

SparseVector& SparseVector::operator*=(const Scalar& s) {
    if (s == 0) {
        entries_.clear();
        return *this;
    }
    for (auto& e : entries_) e.value *= s;
    return *this;
}

SparseVector operator+(SparseVector a, const SparseVector& b) { return a += b; }
SparseVector operator-(SparseVector a, const SparseVector& b) { return a -= b; }
SparseVector operator*(const Scalar& s, SparseVector v) { return v *= s; }

Scalar dot(const SparseVector& a, const SparseVector& b) {
    Scalar acc = 0;
    auto i = a.entries().begin();
    auto j = b.entries().begin();
    while (i != a.entries().end() && j != b.entries().end()) {
        if (i->index < j->index) {
            ++i;
        } else if (j->index < i->index) {
            ++j;
        } else {
            acc += i->value * j->value;
            ++i;
            ++j;
        }
    }
    return acc;
}

Scalar norm_sq(const SparseVector& v) { return dot(v, v); }

SparseVector::Index max_support(std::span<const SparseVector> vs) {
    SparseVector::Index m = 0;
    for (const auto& v : vs) m = std::max(m, v.max_index());
    return m;
}

IntegerForm integer_form(const SparseVector& v) {
    IntegerForm f;
    if (v.is_zero()) {
        f.scale = 0;
        return f;
    }
    BigInt l = 1;
    for (const auto& e : v.entries()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.value.get_den_mpz_t());
    BigInt g = 0;
    f.entries.reserve(v.nnz());
    for (const auto& e : v.entries()) {
        BigInt n = e.value.get_num() * (l / e.value.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        f.entries.emplace_back(e.index, std::move(n));
    }
    for (auto& [idx, n] : f.entries) mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), g.get_mpz_t());
    f.scale = Scalar(g, l);
    f.scale.canonicalize();
    return f;
}

BigInt dot(const IntegerForm& a, const IntegerForm& b) {
    BigInt acc = 0;
    auto i = a.entries.begin();
    auto j = b.entries.begin();
    while (i != a.entries.end() && j != b.entries.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            mpz_addmul(acc.get_mpz_t(), i->second.get_mpz_t(), j->second.get_mpz_t());
            ++i;
            ++j;
        }
    }
    return acc;
}

SparseVector primitive(const SparseVector& v) {
    if (v.is_zero()) return v;
    const IntegerForm f = integer_form(v);
    std::vector<SparseVector::Entry> e;
    e.reserve(f.entries.size());
    for (const auto& [idx, n] : f.entries) e.push_back({idx, Scalar(n)});
    return SparseVector::from_entries(std::move(e));
}

} // namespace mixedsys
