#include "symlearn/group.hpp"

#include <algorithm>
#include <functional>

#include "symlearn/errors.hpp"

namespace symlearn {

namespace {

// Permutation of the flattened n x n grid induced by a cell map.
Permutation grid_permutation(std::size_t n,
                             const std::function<std::pair<std::size_t, std::size_t>(
                                 std::size_t, std::size_t)>& cell_map) {
    std::vector<std::size_t> image(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto [ti, tj] = cell_map(i, j);
            image[i * n + j] = ti * n + tj;
        }
    }
    return Permutation(std::move(image));
}

void push_unique(std::vector<Permutation>& elements, Permutation p) {
    if (std::find(elements.begin(), elements.end(), p) == elements.end()) {
        elements.push_back(std::move(p));
    }
}

}  // namespace

SymmetryGroup rotation_group(std::size_t n) {
    if (n == 0) throw DomainError("rotation_group: grid side must be positive");
    const auto quarter_turn = grid_permutation(
        n, [n](std::size_t i, std::size_t j) { return std::make_pair(j, n - 1 - i); });
    SymmetryGroup g{n * n, {}, "rot90"};
    Permutation e = Permutation::identity(n * n);
    for (int k = 0; k < 4; ++k) {
        push_unique(g.elements, e);
        e = quarter_turn.compose(e);
    }
    return g;
}

SymmetryGroup flip_group(std::size_t n) {
    if (n == 0) throw DomainError("flip_group: grid side must be positive");
    const auto horizontal = grid_permutation(
        n, [n](std::size_t i, std::size_t j) { return std::make_pair(i, n - 1 - j); });
    const auto vertical = grid_permutation(
        n, [n](std::size_t i, std::size_t j) { return std::make_pair(n - 1 - i, j); });
    SymmetryGroup g{n * n, {}, "flip"};
    push_unique(g.elements, Permutation::identity(n * n));
    push_unique(g.elements, horizontal);
    push_unique(g.elements, vertical);
    push_unique(g.elements, horizontal.compose(vertical));
    return g;
}

SymmetryGroup identity_group(std::size_t dim) {
    if (dim == 0) throw DomainError("identity_group: dimension must be positive");
    return SymmetryGroup{dim, {Permutation::identity(dim)}, "identity"};
}

SymmetryGroup group_by_name(const std::string& name, std::size_t n) {
    if (name == "rot90") return rotation_group(n);
    if (name == "flip") return flip_group(n);
    if (name == "identity") return identity_group(n * n);
    throw ConfigError("unknown group name \"" + name + "\" (expected rot90, flip, or identity)");
}

ClosureReport closure_check(const SymmetryGroup& g) {
    ClosureReport report;
    auto contains = [&](const Permutation& p) {
        return std::find(g.elements.begin(), g.elements.end(), p) != g.elements.end();
    };

    bool has_identity = false;
    for (const auto& e : g.elements) {
        if (e.dim() != g.dim) {
            report.closed = false;
            report.violations.push_back("element dimension " + std::to_string(e.dim()) +
                                        " does not match group dimension " +
                                        std::to_string(g.dim));
            return report;
        }
        if (e.is_identity()) has_identity = true;
    }
    if (!has_identity) {
        report.closed = false;
        report.violations.push_back("identity element missing");
    }
    for (std::size_t a = 0; a < g.elements.size(); ++a) {
        for (std::size_t b = 0; b < g.elements.size(); ++b) {
            if (!contains(g.elements[a].compose(g.elements[b]))) {
                report.closed = false;
                report.violations.push_back("composition of elements " + std::to_string(a) +
                                            " and " + std::to_string(b) + " is missing");
            }
        }
    }
    for (std::size_t a = 0; a < g.elements.size(); ++a) {
        if (!contains(g.elements[a].inverse())) {
            report.closed = false;
            report.violations.push_back("inverse of element " + std::to_string(a) +
                                        " is missing");
        }
    }
    for (std::size_t a = 0; a < g.elements.size(); ++a) {
        for (std::size_t b = a + 1; b < g.elements.size(); ++b) {
            if (g.elements[a] == g.elements[b]) {
                report.closed = false;
                report.violations.push_back("elements " + std::to_string(a) + " and " +
                                            std::to_string(b) + " are duplicates");
            }
        }
    }
    return report;
}

}  // namespace symlearn
