#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "symlearn/dataset.hpp"
#include "symlearn/matrix.hpp"
#include "symlearn/rng.hpp"

namespace symlearn::test {

/// Self-deleting temporary directory.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "symlearn-test-XXXXXX";
        std::string tmpl = base.string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Central finite difference of `loss` with respect to one scalar slot.
template <typename LossFn>
double fd_slope(LossFn&& loss, double& slot, double h = 1e-5) {
    const double saved = slot;
    slot = saved + h;
    const double up = loss();
    slot = saved - h;
    const double down = loss();
    slot = saved;
    return (up - down) / (2.0 * h);
}

inline Matrix random_matrix(RngState& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0, n = m.size(); i < n; ++i) m.data()[i] = scale * rng.next_gaussian();
    return m;
}

inline Vector random_vector(RngState& rng, std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (double& x : v) x = scale * rng.next_gaussian();
    return v;
}

/// Random point in the interior of the probability simplex.
inline Vector random_simplex(RngState& rng, std::size_t n) {
    Vector v(n);
    double sum = 0.0;
    for (double& x : v) {
        x = 0.05 + rng.next_uniform();
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

/// Tiny linearly separable grid dataset: class c's images put most of their
/// mass on pixel c, plus noise. Pixels stay in [0, 1].
inline ImageDataset blob_dataset(std::size_t per_class, int classes, std::size_t grid_side,
                                 std::uint64_t seed) {
    ImageDataset ds;
    ds.grid_side = grid_side;
    ds.class_count = classes;
    const std::size_t dim = grid_side * grid_side;
    ds.images = Matrix(per_class * static_cast<std::size_t>(classes), dim);
    RngState rng(seed);
    std::size_t row = 0;
    for (int c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i, ++row) {
            for (std::size_t p = 0; p < dim; ++p) {
                double v = 0.1 * rng.next_uniform();
                if (p == static_cast<std::size_t>(c) % dim) v += 0.8;
                ds.images(row, p) = std::min(1.0, v);
            }
            ds.labels.push_back(c);
        }
    }
    return ds;
}

}  // namespace symlearn::test
