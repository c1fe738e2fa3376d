#include "doctest.h"

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/matrix.hpp"

using namespace symlearn;
using test::random_matrix;

TEST_SUITE("matrix") {

TEST_CASE("construction and element access") {
    Matrix m(2, 3, 1.5);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m.size() == 6);
    CHECK(!m.empty());
    CHECK(m(1, 2) == 1.5);
    m(0, 1) = -2.0;
    CHECK(m.row(0)[1] == -2.0);

    Matrix empty;
    CHECK(empty.empty());
    CHECK(empty.rows() == 0);
}

TEST_CASE("identity and from_rows") {
    Matrix eye = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(eye(i, j) == (i == j ? 1.0 : 0.0));

    Matrix m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(m.rows() == 2);
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 3.0);
}

TEST_CASE("matmul matches a worked example") {
    // [[1,2],[3,4]] * [[5,6],[7,8]] = [[19,22],[43,50]], by hand.
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
    Matrix c = matmul(a, b);
    CHECK(c == Matrix::from_rows({{19, 22}, {43, 50}}));
}

TEST_CASE("matmul is neutral against the identity") {
    RngState rng(11);
    Matrix a = random_matrix(rng, 4, 4);
    CHECK(max_abs_diff(matmul(a, Matrix::identity(4)), a) == 0.0);
    CHECK(max_abs_diff(matmul(Matrix::identity(4), a), a) == 0.0);
}

TEST_CASE("transposed variants agree with explicit transposition") {
    RngState rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t p = 1 + rng.next_below(5);
        std::size_t q = 1 + rng.next_below(5);
        std::size_t r = 1 + rng.next_below(5);
        Matrix a = random_matrix(rng, p, q);
        Matrix b = random_matrix(rng, r, q);   // for a * b^T
        Matrix c = random_matrix(rng, p, r);   // for a^T * c
        CHECK(max_abs_diff(matmul_nt(a, b), matmul(a, b.transposed())) < 1e-14);
        CHECK(max_abs_diff(matmul_tn(a, c), matmul(a.transposed(), c)) < 1e-14);
    }
}

TEST_CASE("transpose of a product reverses the factors") {
    RngState rng(5);
    Matrix a = random_matrix(rng, 3, 5);
    Matrix b = random_matrix(rng, 5, 2);
    Matrix lhs = matmul(a, b).transposed();
    Matrix rhs = matmul(b.transposed(), a.transposed());
    CHECK(max_abs_diff(lhs, rhs) < 1e-14);
}

TEST_CASE("transposition is an involution") {
    RngState rng(9);
    Matrix a = random_matrix(rng, 4, 7);
    CHECK(a.transposed().transposed() == a);
}

TEST_CASE("matvec and matvec_t") {
    Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    Vector x{1, 1, 1};
    Vector y = matvec(m, x);
    REQUIRE(y.size() == 2);
    CHECK(y[0] == 6.0);
    CHECK(y[1] == 15.0);

    Vector u{1, 10};
    Vector v = matvec_t(m, u);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 41.0);
    CHECK(v[1] == 52.0);
    CHECK(v[2] == 63.0);
}

TEST_CASE("elementwise operators") {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix b = Matrix::from_rows({{10, 20}, {30, 40}});
    CHECK(a + b == Matrix::from_rows({{11, 22}, {33, 44}}));
    CHECK(b - a == Matrix::from_rows({{9, 18}, {27, 36}}));
    CHECK(a * 2.0 == Matrix::from_rows({{2, 4}, {6, 8}}));

    Matrix c = a;
    c += b;
    c -= a;
    c *= 0.5;
    CHECK(c == b * 0.5);
}

TEST_CASE("column_sums, gather_rows, max_abs, max_abs_diff") {
    Matrix m = Matrix::from_rows({{1, -2}, {3, 4}, {-5, 6}});
    Vector cs = column_sums(m);
    CHECK(cs[0] == -1.0);
    CHECK(cs[1] == 8.0);
    CHECK(m.max_abs() == 6.0);

    std::vector<std::size_t> idx{2, 0};
    Matrix g = gather_rows(m, idx);
    CHECK(g == Matrix::from_rows({{-5, 6}, {1, -2}}));

    Matrix m2 = m;
    m2(1, 1) = 4.25;
    CHECK(max_abs_diff(m, m2) == doctest::Approx(0.25));
}

TEST_CASE("shape mismatches throw ShapeError") {
    Matrix a(2, 3);
    Matrix b(2, 3);
    CHECK_THROWS_AS(matmul(a, b), ShapeError);
    CHECK_THROWS_AS(matmul_nt(a, Matrix(2, 4)), ShapeError);
    CHECK_THROWS_AS(matmul_tn(a, Matrix(3, 2)), ShapeError);
    CHECK_THROWS_AS(a += Matrix(3, 2), ShapeError);
    Vector x{1.0, 2.0};
    CHECK_THROWS_AS(matvec(a, x), ShapeError);
    std::vector<std::size_t> bad{5};
    CHECK_THROWS_AS(gather_rows(a, bad), DomainError);
}

TEST_CASE("non-finite values are rejected") {
    Matrix m(2, 2, 1.0);
    CHECK(m.all_finite());
    CHECK_NOTHROW(require_finite(m, "test"));
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(!m.all_finite());
    CHECK_THROWS_AS(require_finite(m, "test"), NumericError);

    // Overflowing products surface as NumericError rather than silent inf.
    Matrix huge(1, 1, std::numeric_limits<double>::max());
    CHECK_THROWS_AS(matmul(huge, huge), NumericError);
}

}  // TEST_SUITE
