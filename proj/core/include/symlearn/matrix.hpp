#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace symlearn {

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit floats.
///
/// Every operation that produces a Matrix or Vector validates that the result
/// is finite and throws NumericError otherwise; shape mismatches throw
/// ShapeError naming both operand shapes.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar);

    /// Entrywise max-norm, max |a_ij|.
    double max_abs() const;
    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b. Throws ShapeError on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T; both operands are traversed row-major.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// m * x.
Vector matvec(const Matrix& m, std::span<const double> x);
/// m^T * x.
Vector matvec_t(const Matrix& m, std::span<const double> x);

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double scalar);

/// Column sums, a length-cols vector.
Vector column_sums(const Matrix& m);

/// Rows of `m` selected by `indices`, in order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);

double max_abs_diff(const Matrix& a, const Matrix& b);

/// Throws NumericError naming `what` if any entry is not finite.
void require_finite(const Matrix& m, const char* what);

}  // namespace symlearn
