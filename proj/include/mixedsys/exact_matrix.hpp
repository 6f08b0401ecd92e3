#ifndef MIXEDSYS_EXACT_MATRIX_HPP
#define MIXEDSYS_EXACT_MATRIX_HPP

#include "mixedsys/scalar.hpp"

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mixedsys {

/// Dense row-major matrix of exact rationals.
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    ExactMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static ExactMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_symmetric() const;
    bool operator==(const ExactMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

} // namespace mixedsys

#endif
