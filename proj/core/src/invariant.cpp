#include "symlearn/invariant.hpp"

#include <algorithm>
#include <cmath>

#include "symlearn/errors.hpp"
#include "symlearn/numeric.hpp"

namespace symlearn {

namespace {

void require_closed(const SymmetryGroup& g, const char* op) {
    const auto report = closure_check(g);
    if (!report.closed) {
        std::string msg = std::string(op) + ": group \"" + g.name + "\" is not closed";
        if (!report.violations.empty()) msg += " (" + report.violations.front() + ")";
        throw DomainError(msg);
    }
}

}  // namespace

ReynoldsOperator reynolds_operator(const SymmetryGroup& g) {
    require_closed(g, "reynolds_operator");
    Matrix m(g.dim, g.dim);
    const double w = 1.0 / static_cast<double>(g.elements.size());
    for (const auto& e : g.elements) {
        for (std::size_t s = 0; s < g.dim; ++s) m(e(s), s) += w;
    }
    return ReynoldsOperator{std::move(m)};
}

std::vector<std::vector<std::size_t>> orbits(const SymmetryGroup& g) {
    require_closed(g, "orbits");
    std::vector<bool> visited(g.dim, false);
    std::vector<std::vector<std::size_t>> result;
    for (std::size_t start = 0; start < g.dim; ++start) {
        if (visited[start]) continue;
        // Grow the orbit of `start` by applying every element to the frontier.
        std::vector<std::size_t> orbit{start};
        visited[start] = true;
        for (std::size_t head = 0; head < orbit.size(); ++head) {
            for (const auto& e : g.elements) {
                const std::size_t image = e(orbit[head]);
                if (!visited[image]) {
                    visited[image] = true;
                    orbit.push_back(image);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        result.push_back(std::move(orbit));
    }
    return result;  // starts ascend, so orbits are already ordered by smallest member
}

InvariantBasis InvariantBasis::from_group(const SymmetryGroup& g) {
    InvariantBasis basis;
    basis.group_name_ = g.name;
    basis.orbits_ = orbits(g);
    basis.rows_ = Matrix(basis.orbits_.size(), g.dim);
    basis.inv_sqrt_size_.reserve(basis.orbits_.size());
    for (std::size_t r = 0; r < basis.orbits_.size(); ++r) {
        const double v = 1.0 / std::sqrt(static_cast<double>(basis.orbits_[r].size()));
        basis.inv_sqrt_size_.push_back(v);
        for (std::size_t idx : basis.orbits_[r]) basis.rows_(r, idx) = v;
    }
    return basis;
}

std::vector<std::size_t> InvariantBasis::orbit_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(orbits_.size());
    for (const auto& o : orbits_) sizes.push_back(o.size());
    return sizes;
}

void InvariantBasis::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != dim() || out.size() != count()) {
        throw ShapeError("InvariantBasis::apply: expected input length " +
                         std::to_string(dim()) + " and output length " +
                         std::to_string(count()));
    }
    double scratch[8];
    for (std::size_t r = 0; r < orbits_.size(); ++r) {
        const auto& orbit = orbits_[r];
        double sum = 0.0;
        if (orbit.size() <= 8) {
            for (std::size_t k = 0; k < orbit.size(); ++k) scratch[k] = x[orbit[k]];
            std::sort(scratch, scratch + orbit.size());
            for (std::size_t k = 0; k < orbit.size(); ++k) sum += scratch[k];
        } else {
            std::vector<double> values;
            values.reserve(orbit.size());
            for (std::size_t idx : orbit) values.push_back(x[idx]);
            std::sort(values.begin(), values.end());
            for (double v : values) sum += v;
        }
        out[r] = sum * inv_sqrt_size_[r];
    }
}

Vector InvariantBasis::apply(std::span<const double> x) const {
    Vector out(count());
    apply(x, out);
    return out;
}

Matrix InvariantBasis::apply_batch(const Matrix& x) const {
    if (x.cols() != dim()) {
        throw ShapeError("InvariantBasis::apply_batch: input has " + std::to_string(x.cols()) +
                         " columns, basis dimension is " + std::to_string(dim()));
    }
    Matrix out(x.rows(), count());
    for (std::size_t i = 0; i < x.rows(); ++i) apply(x.row(i), out.row(i));
    return out;
}

void InvariantBasis::apply_transpose_add(std::span<const double> u, std::span<double> out,
                                         double scale) const {
    if (u.size() != count() || out.size() != dim()) {
        throw ShapeError("InvariantBasis::apply_transpose_add: expected input length " +
                         std::to_string(count()) + " and output length " +
                         std::to_string(dim()));
    }
    for (std::size_t r = 0; r < orbits_.size(); ++r) {
        const double v = scale * u[r] * inv_sqrt_size_[r];
        for (std::size_t idx : orbits_[r]) out[idx] += v;
    }
}

InvariantBasis invariant_basis(const SymmetryGroup& g) {
    return InvariantBasis::from_group(g);
}

InvarianceReport verify_layer_invariance(const InvariantBasis& basis, const SymmetryGroup& g,
                                         std::size_t trials, RngState& rng, double tolerance) {
    return verify_layer_invariance(basis.rows(), g, trials, rng, tolerance);
}

InvarianceReport verify_layer_invariance(const Matrix& basis_rows, const SymmetryGroup& g,
                                         std::size_t trials, RngState& rng, double tolerance) {
    if (basis_rows.cols() != g.dim) {
        throw ShapeError("verify_layer_invariance: basis dimension " +
                         std::to_string(basis_rows.cols()) + " does not match group dimension " +
                         std::to_string(g.dim));
    }
    InvarianceReport report;
    report.trials = trials;
    report.tolerance = tolerance;
    for (std::size_t t = 0; t < trials; ++t) {
        Vector c(basis_rows.rows());
        for (double& v : c) v = rng.next_gaussian();
        Vector x(g.dim);
        for (double& v : x) v = rng.next_gaussian();

        const Vector w = matvec_t(basis_rows, c);
        const double base = dot(w, x);
        for (const auto& e : g.elements) {
            const Vector tx = e.apply(x);
            const double deviation = std::abs(dot(w, tx) - base);
            report.max_deviation = std::max(report.max_deviation, deviation);
        }
    }
    report.passed = report.max_deviation < tolerance;
    return report;
}

}  // namespace symlearn
