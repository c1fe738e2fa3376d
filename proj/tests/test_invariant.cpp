#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/invariant.hpp"

using namespace symlearn;

namespace {

// Independent orbit oracle: union-find over indices, merging s with p(s).
std::vector<std::vector<std::size_t>> orbits_by_union_find(const SymmetryGroup& g) {
    std::vector<std::size_t> parent(g.dim);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Permutation& p : g.elements)
        for (std::size_t s = 0; s < g.dim; ++s) parent[find(s)] = find(p(s));

    std::vector<std::vector<std::size_t>> buckets(g.dim);
    for (std::size_t s = 0; s < g.dim; ++s) buckets[find(s)].push_back(s);
    std::vector<std::vector<std::size_t>> result;
    for (auto& b : buckets)
        if (!b.empty()) result.push_back(std::move(b));  // members already ascending
    // A class's root is an arbitrary member; normalize to smallest-member order.
    std::sort(result.begin(), result.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return result;
}

const std::vector<SymmetryGroup>& sample_groups() {
    static const std::vector<SymmetryGroup> groups = [] {
        std::vector<SymmetryGroup> gs;
        for (std::size_t n : {2u, 3u, 4u}) {
            gs.push_back(rotation_group(n));
            gs.push_back(flip_group(n));
        }
        gs.push_back(identity_group(9));
        return gs;
    }();
    return groups;
}

}  // namespace

TEST_SUITE("invariant") {

TEST_CASE("worked 2x2 rotation example: averaged operator and basis") {
    // For the quarter-turn group on the 2x2 grid every cell reaches every
    // other, so the element average is the rank-one all-(1/4) matrix and the
    // invariant space is spanned by the constant vector.
    SymmetryGroup g = rotation_group(2);
    ReynoldsOperator rey = reynolds_operator(g);
    Matrix quarter(4, 4, 0.25);
    CHECK(max_abs_diff(rey.matrix, quarter) < 1e-15);

    InvariantBasis basis = invariant_basis(g);
    REQUIRE(basis.count() == 1);
    REQUIRE(basis.dim() == 4);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(basis.rows()(0, j) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(basis.orbit_sizes() == std::vector<std::size_t>{4});
}

TEST_CASE("averaged operator is symmetric, doubly stochastic, idempotent") {
    for (const SymmetryGroup& g : sample_groups()) {
        CAPTURE(g.name);
        CAPTURE(g.dim);
        Matrix t = reynolds_operator(g).matrix;
        REQUIRE(t.rows() == g.dim);
        REQUIRE(t.cols() == g.dim);

        CHECK(max_abs_diff(t, t.transposed()) < 1e-12);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            double rowsum = 0.0;
            for (std::size_t c = 0; c < t.cols(); ++c) rowsum += t(r, c);
            CHECK(rowsum == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(max_abs_diff(matmul(t, t), t) < 1e-12);

        // Averaging absorbs any single element: P T = T P = T.
        for (const Permutation& p : g.elements) {
            Matrix pm = p.to_matrix();
            CHECK(max_abs_diff(matmul(pm, t), t) < 1e-12);
            CHECK(max_abs_diff(matmul(t, pm), t) < 1e-12);
        }
    }
}

TEST_CASE("reynolds_operator rejects a non-closed element set") {
    SymmetryGroup g = rotation_group(2);
    g.elements.pop_back();
    CHECK_THROWS_AS(reynolds_operator(g), DomainError);
}

TEST_CASE("orbits match an independent union-find") {
    for (const SymmetryGroup& g : sample_groups()) {
        CAPTURE(g.name);
        CAPTURE(g.dim);
        CHECK(orbits(g) == orbits_by_union_find(g));
    }
}

TEST_CASE("known orbit sizes") {
    // 3x3 quarter turns: corners, edge midpoints, fixed center.
    CHECK(invariant_basis(rotation_group(3)).orbit_sizes() ==
          std::vector<std::size_t>{4, 4, 1});
    // 2x2 flips: a single orbit.
    CHECK(invariant_basis(flip_group(2)).orbit_sizes() == std::vector<std::size_t>{4});
    // 4x4 quarter turns: 16 cells in four orbits of 4.
    CHECK(invariant_basis(rotation_group(4)).orbit_sizes() ==
          std::vector<std::size_t>{4, 4, 4, 4});
    // Trivial group: every index is its own orbit.
    CHECK(invariant_basis(identity_group(5)).orbit_sizes() ==
          std::vector<std::size_t>(5, 1));
}

TEST_CASE("basis rows are orthonormal and reproduce the averaged operator") {
    for (const SymmetryGroup& g : sample_groups()) {
        CAPTURE(g.name);
        CAPTURE(g.dim);
        InvariantBasis basis = invariant_basis(g);
        const Matrix& v = basis.rows();

        // V V^T = I_d.
        CHECK(max_abs_diff(matmul_nt(v, v), Matrix::identity(basis.count())) < 1e-12);
        // V^T V equals the element average exactly: both put 1/|orbit| on
        // every same-orbit pair.
        CHECK(max_abs_diff(matmul_tn(v, v), reynolds_operator(g).matrix) < 1e-12);
        // Rows are fixed points: V T = V.
        CHECK(max_abs_diff(matmul(v, reynolds_operator(g).matrix), v) < 1e-12);
    }
}

TEST_CASE("apply agrees with dense multiplication and apply_batch with apply") {
    RngState rng(41);
    for (const SymmetryGroup& g : sample_groups()) {
        CAPTURE(g.name);
        InvariantBasis basis = invariant_basis(g);
        Matrix x = test::random_matrix(rng, 5, g.dim);
        Matrix u = basis.apply_batch(x);
        REQUIRE(u.rows() == 5);
        REQUIRE(u.cols() == basis.count());
        for (std::size_t r = 0; r < 5; ++r) {
            Vector direct = basis.apply(x.row(r));
            Vector dense = matvec(basis.rows(), x.row(r));
            for (std::size_t k = 0; k < basis.count(); ++k) {
                CHECK(u(r, k) == direct[k]);
                CHECK(direct[k] == doctest::Approx(dense[k]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("orbit features are bit-identical under every group element") {
    // The per-orbit sum runs over members in ascending value order, so the
    // result is the same double, not merely a close one, when the input is
    // permuted within orbits.
    RngState rng(43);
    for (const SymmetryGroup& g : sample_groups()) {
        CAPTURE(g.name);
        InvariantBasis basis = invariant_basis(g);
        for (int trial = 0; trial < 20; ++trial) {
            Vector x = test::random_vector(rng, g.dim);
            Vector base = basis.apply(x);
            for (const Permutation& p : g.elements) {
                Vector moved = basis.apply(p.apply(x));
                REQUIRE(moved.size() == base.size());
                for (std::size_t k = 0; k < base.size(); ++k) CHECK(moved[k] == base[k]);
            }
        }
    }
}

TEST_CASE("apply_transpose_add scatters V^T with scaling and accumulation") {
    RngState rng(47);
    InvariantBasis basis = invariant_basis(rotation_group(3));
    Vector u = test::random_vector(rng, basis.count());

    Vector expected = matvec_t(basis.rows(), u);
    Vector out(basis.dim(), 0.0);
    basis.apply_transpose_add(u, out);
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-12));

    // Accumulates into existing content with a scale factor.
    Vector acc(basis.dim(), 1.0);
    basis.apply_transpose_add(u, acc, -2.0);
    for (std::size_t i = 0; i < acc.size(); ++i)
        CHECK(acc[i] == doctest::Approx(1.0 - 2.0 * expected[i]).epsilon(1e-12));
}

TEST_CASE("verify_layer_invariance passes genuine bases and flags corrupted ones") {
    SymmetryGroup g = rotation_group(4);
    InvariantBasis basis = invariant_basis(g);

    RngState rng(53);
    InvarianceReport ok = verify_layer_invariance(basis, g, 100, rng);
    CHECK(ok.passed);
    CHECK(ok.trials == 100);
    CHECK(ok.max_deviation < 1e-9);

    Matrix corrupted = basis.rows();
    corrupted(0, 0) += 0.1;  // no longer constant on its orbit
    RngState rng2(53);
    InvarianceReport bad = verify_layer_invariance(corrupted, g, 100, rng2);
    CHECK(!bad.passed);
    CHECK(bad.max_deviation > 1e-3);
}

}  // TEST_SUITE
