#pragma once

#include <string>
#include <vector>

#include "symlearn/permutation.hpp"

namespace symlearn {

/// Finite permutation group acting on a flattened n x n grid (or on an
/// arbitrary index set for the trivial group).
struct SymmetryGroup {
    std::size_t dim = 0;
    std::vector<Permutation> elements;
    std::string name;
};

/// Quarter-turn rotations of an n x n grid. The generator sends grid cell
/// (i, j) to (j, n-1-i); the group is cyclic of order 4 (order 1 for n = 1).
SymmetryGroup rotation_group(std::size_t n);

/// Horizontal flip (i, j) -> (i, n-1-j), vertical flip (i, j) -> (n-1-i, j),
/// their product, and the identity. Closed as the Klein four-group; collapses
/// to the identity alone for n = 1.
SymmetryGroup flip_group(std::size_t n);

/// Trivial group {identity} on `dim` indices.
SymmetryGroup identity_group(std::size_t dim);

/// Group named "rot90", "flip", or "identity" on an n x n grid.
SymmetryGroup group_by_name(const std::string& name, std::size_t n);

struct ClosureReport {
    bool closed = true;
    std::vector<std::string> violations;
};

/// Checks that the identity is present and that the element set is closed
/// under composition and inverse, listing any missing elements.
ClosureReport closure_check(const SymmetryGroup& g);

}  // namespace symlearn
