#include "symlearn/matrix.hpp"

#include <cmath>
#include <string>

#include "symlearn/errors.hpp"

namespace symlearn {

namespace {

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " +
                         shape_str(b) + " differ");
    }
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) {
        throw NumericError(std::string(what) + ": result contains NaN or Inf");
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "sub");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double scalar) {
    for (double& v : data_) v *= scalar;
    return *this;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions of " + shape_str(a) + " and " +
                         shape_str(b) + " do not match");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.data() + i * c.cols();
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double ail = a(i, l);
            const double* brow = b.data() + l * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += ail * brow[j];
        }
    }
    require_finite(c, "matmul");
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: column counts of " + shape_str(a) + " and " +
                         shape_str(b) + " do not match");
    }
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * b.cols();
            double s = 0.0;
            for (std::size_t l = 0; l < a.cols(); ++l) s += arow[l] * brow[l];
            c(i, j) = s;
        }
    }
    require_finite(c, "matmul_nt");
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: row counts of " + shape_str(a) + " and " +
                         shape_str(b) + " do not match");
    }
    Matrix c(a.cols(), b.cols());
    for (std::size_t l = 0; l < a.rows(); ++l) {
        const double* arow = a.data() + l * a.cols();
        const double* brow = b.data() + l * b.cols();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ali = arow[i];
            double* crow = c.data() + i * c.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += ali * brow[j];
        }
    }
    require_finite(c, "matmul_tn");
    return c;
}

Vector matvec(const Matrix& m, std::span<const double> x) {
    if (m.cols() != x.size()) {
        throw ShapeError("matvec: matrix " + shape_str(m) + " against vector of length " +
                         std::to_string(x.size()));
    }
    Vector y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.data() + i * m.cols();
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Vector matvec_t(const Matrix& m, std::span<const double> x) {
    if (m.rows() != x.size()) {
        throw ShapeError("matvec_t: matrix " + shape_str(m) + " against vector of length " +
                         std::to_string(x.size()));
    }
    Vector y(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double xi = x[i];
        const double* row = m.data() + i * m.cols();
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += xi * row[j];
    }
    return y;
}

Matrix operator+(Matrix a, const Matrix& b) {
    a += b;
    return a;
}

Matrix operator-(Matrix a, const Matrix& b) {
    a -= b;
    return a;
}

Matrix operator*(Matrix a, double scalar) {
    a *= scalar;
    return a;
}

Vector column_sums(const Matrix& m) {
    Vector s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.data() + i * m.cols();
        for (std::size_t j = 0; j < m.cols(); ++j) s[j] += row[j];
    }
    return s;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), m.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= m.rows()) {
            throw DomainError("gather_rows: index " + std::to_string(indices[i]) +
                              " out of range for " + shape_str(m));
        }
        const auto src = m.row(indices[i]);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace symlearn
