#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "symlearn/matrix.hpp"

namespace symlearn {

/// Permutation of {0, ..., D-1}, stored as the image of each index.
/// Construction validates bijectivity.
class Permutation {
public:
    explicit Permutation(std::vector<std::size_t> image);

    static Permutation identity(std::size_t dim);

    std::size_t dim() const { return image_.size(); }

    /// Image of index i.
    std::size_t operator()(std::size_t i) const { return image_[i]; }

    const std::vector<std::size_t>& image() const { return image_; }

    /// this after other: i -> this(other(i)).
    Permutation compose(const Permutation& other) const;

    Permutation inverse() const;

    bool is_identity() const;

    /// Matrix representation A with A[image(s)][s] = 1, so that applying the
    /// permutation to a vector x equals A * x.
    Matrix to_matrix() const;

    /// Permuted copy of x: out[image(s)] = x[s].
    Vector apply(std::span<const double> x) const;

    /// In-place variant writing into `out` (must not alias x).
    void apply(std::span<const double> x, std::span<double> out) const;

    bool operator==(const Permutation& other) const = default;

private:
    std::vector<std::size_t> image_;
};

}  // namespace symlearn
