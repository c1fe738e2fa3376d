#include "symlearn/permutation.hpp"

#include <numeric>
#include <string>

#include "symlearn/errors.hpp"

namespace symlearn {

Permutation::Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (std::size_t v : image_) {
        if (v >= image_.size() || seen[v]) {
            throw DomainError("Permutation: image is not a bijection on [0, " +
                              std::to_string(image_.size()) + ")");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t dim) {
    std::vector<std::size_t> image(dim);
    std::iota(image.begin(), image.end(), std::size_t{0});
    return Permutation(std::move(image));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (dim() != other.dim()) {
        throw ShapeError("Permutation::compose: dimensions " + std::to_string(dim()) +
                         " and " + std::to_string(other.dim()) + " differ");
    }
    std::vector<std::size_t> image(dim());
    for (std::size_t i = 0; i < dim(); ++i) image[i] = image_[other.image_[i]];
    return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
    std::vector<std::size_t> image(dim());
    for (std::size_t i = 0; i < dim(); ++i) image[image_[i]] = i;
    return Permutation(std::move(image));
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < dim(); ++i) {
        if (image_[i] != i) return false;
    }
    return true;
}

Matrix Permutation::to_matrix() const {
    Matrix m(dim(), dim());
    for (std::size_t s = 0; s < dim(); ++s) m(image_[s], s) = 1.0;
    return m;
}

Vector Permutation::apply(std::span<const double> x) const {
    if (x.size() != dim()) {
        throw ShapeError("Permutation::apply: vector length " + std::to_string(x.size()) +
                         " does not match dimension " + std::to_string(dim()));
    }
    Vector out(dim());
    for (std::size_t s = 0; s < dim(); ++s) out[image_[s]] = x[s];
    return out;
}

void Permutation::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != dim() || out.size() != dim()) {
        throw ShapeError("Permutation::apply: vector length " + std::to_string(x.size()) +
                         "/" + std::to_string(out.size()) + " does not match dimension " +
                         std::to_string(dim()));
    }
    for (std::size_t s = 0; s < dim(); ++s) out[image_[s]] = x[s];
}

}  // namespace symlearn
