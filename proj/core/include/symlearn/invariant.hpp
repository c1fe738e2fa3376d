#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "symlearn/group.hpp"
#include "symlearn/matrix.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

/// Average of the matrix representations of all group elements. Symmetric,
/// doubly stochastic, and idempotent; its eigenvalue-1 eigenspace is exactly
/// the space of weight vectors that make a first-layer neuron invariant to
/// the group.
struct ReynoldsOperator {
    Matrix matrix;
};

/// Requires a closed group (throws DomainError otherwise).
ReynoldsOperator reynolds_operator(const SymmetryGroup& g);

/// Partition of {0, ..., D-1} into orbits of the group action. Orbits are
/// ordered by smallest member; members are ascending.
std::vector<std::vector<std::size_t>> orbits(const SymmetryGroup& g);

/// Orthonormal basis of the eigenvalue-1 eigenspace of the group's Reynolds
/// operator: one row per orbit, with value 1/sqrt(|orbit|) on the orbit's
/// members and zero elsewhere.
class InvariantBasis {
public:
    static InvariantBasis from_group(const SymmetryGroup& g);

    const std::string& group_name() const { return group_name_; }
    /// The basis matrix V, one orbit indicator per row (d x D).
    const Matrix& rows() const { return rows_; }
    const std::vector<std::vector<std::size_t>>& orbit_list() const { return orbits_; }
    std::vector<std::size_t> orbit_sizes() const;

    /// Input dimension D.
    std::size_t dim() const { return rows_.cols(); }
    /// Number of basis vectors d (= number of orbits).
    std::size_t count() const { return rows_.rows(); }

    /// Orbit features u = V x. Each orbit's members are summed in ascending
    /// value order, which makes the result bit-identical for x and T x for
    /// every group element T, not merely close.
    void apply(std::span<const double> x, std::span<double> out) const;
    Vector apply(std::span<const double> x) const;

    /// One feature row per input row (count x d output for a count x D input).
    Matrix apply_batch(const Matrix& x) const;

    /// out += scale * V^T u (scatter of orbit coefficients back to inputs).
    void apply_transpose_add(std::span<const double> u, std::span<double> out,
                             double scale = 1.0) const;

private:
    std::string group_name_;
    Matrix rows_;
    std::vector<std::vector<std::size_t>> orbits_;
    std::vector<double> inv_sqrt_size_;
};

/// Spec-level alias for InvariantBasis::from_group.
InvariantBasis invariant_basis(const SymmetryGroup& g);

struct InvarianceReport {
    double max_deviation = 0.0;
    std::size_t trials = 0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Draws `trials` random coefficient vectors c and inputs x and checks that
/// the linear functional (c^T V) x is unchanged when x is replaced by T x for
/// every element T of the group.
InvarianceReport verify_layer_invariance(const InvariantBasis& basis, const SymmetryGroup& g,
                                         std::size_t trials, RngState& rng,
                                         double tolerance = 1e-9);

/// Same check against an arbitrary candidate basis matrix.
InvarianceReport verify_layer_invariance(const Matrix& basis_rows, const SymmetryGroup& g,
                                         std::size_t trials, RngState& rng,
                                         double tolerance = 1e-9);

}  // namespace symlearn
