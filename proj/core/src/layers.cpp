#include "symlearn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "symlearn/errors.hpp"

namespace symlearn {
namespace {

void apply_activation(Matrix& z, Activation act) {
    if (act == Activation::none) return;
    double* p = z.data();
    for (std::size_t i = 0, n = z.size(); i < n; ++i) p[i] = p[i] > 0.0 ? p[i] : 0.0;
}

/// upstream masked by relu'(z); relu'(0) = 0.
Matrix masked_upstream(const Matrix& z, const Matrix& upstream, Activation act) {
    if (upstream.rows() != z.rows() || upstream.cols() != z.cols()) {
        throw ShapeError("layer backward: upstream is " + std::to_string(upstream.rows()) + "x" +
                         std::to_string(upstream.cols()) + " but cached pre-activations are " +
                         std::to_string(z.rows()) + "x" + std::to_string(z.cols()));
    }
    Matrix dz = upstream;
    if (act == Activation::relu) {
        const double* zp = z.data();
        double* dp = dz.data();
        for (std::size_t i = 0, n = z.size(); i < n; ++i) {
            if (!(zp[i] > 0.0)) dp[i] = 0.0;
        }
    }
    require_finite(dz, "layer backward dz");
    return dz;
}

Matrix affine_rows(const Matrix& x, const Matrix& weight, const Vector& bias,
                   const char* what) {
    if (x.cols() != weight.cols()) {
        throw ShapeError(std::string(what) + ": input has " + std::to_string(x.cols()) +
                         " columns but weights expect " + std::to_string(weight.cols()));
    }
    Matrix z = matmul_nt(x, weight);
    for (std::size_t r = 0; r < z.rows(); ++r) {
        double* row = z.data() + r * z.cols();
        for (std::size_t c = 0; c < z.cols(); ++c) row[c] += bias[c];
    }
    require_finite(z, what);
    return z;
}

Matrix row_matrix(std::span<const double> x) {
    Matrix m(1, x.size());
    std::copy(x.begin(), x.end(), m.data());
    return m;
}

void check_simplex(std::span<const double> pi, std::size_t expected, const char* what) {
    if (pi.size() != expected) {
        throw ShapeError(std::string(what) + ": pi has " + std::to_string(pi.size()) +
                         " entries, expected " + std::to_string(expected));
    }
    double sum = 0.0;
    for (double p : pi) {
        if (!std::isfinite(p) || p < -1e-9) {
            throw DomainError(std::string(what) + ": pi entry " + std::to_string(p) +
                              " is not a probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError(std::string(what) + ": pi sums to " + std::to_string(sum) +
                          ", off the simplex by more than 1e-9");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense layer
// ---------------------------------------------------------------------------

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache) {
    Matrix z = affine_rows(x, layer.W, layer.b, "dense_forward");
    if (cache != nullptr) {
        cache->x = x;
        cache->z = z;
    }
    apply_activation(z, layer.activation);
    return z;
}

GradientBundle dense_backward(const DenseLayer& layer, const DenseCache& cache,
                              const Matrix& upstream) {
    if (cache.z.cols() != layer.W.rows() || cache.x.cols() != layer.W.cols() ||
        cache.x.rows() != cache.z.rows()) {
        throw ContractError("dense_backward: cache does not match this layer; "
                            "run dense_forward with a cache first");
    }
    Matrix dz = masked_upstream(cache.z, upstream, layer.activation);
    GradientBundle g;
    g.db = column_sums(dz);
    g.dW = matmul_tn(dz, cache.x);
    g.dx = matmul(dz, layer.W);
    return g;
}

Vector dense_forward(const DenseLayer& layer, std::span<const double> x, DenseCache* cache) {
    Matrix out = dense_forward(layer, row_matrix(x), cache);
    return Vector(out.data(), out.data() + out.size());
}

GradientBundle dense_backward(const DenseLayer& layer, const DenseCache& cache,
                              std::span<const double> upstream) {
    return dense_backward(layer, cache, row_matrix(upstream));
}

// ---------------------------------------------------------------------------
// Fixed-scheme invariant layer
// ---------------------------------------------------------------------------

Matrix fixed_forward(const FixedInvariantLayer& layer, const Matrix& x, FixedCache* cache) {
    return fixed_forward_features(layer, layer.basis.apply_batch(x), cache);
}

Matrix fixed_forward_features(const FixedInvariantLayer& layer, const Matrix& u,
                              FixedCache* cache) {
    if (u.cols() != layer.basis.count()) {
        throw ShapeError("fixed_forward: features have " + std::to_string(u.cols()) +
                         " columns but the basis has " + std::to_string(layer.basis.count()) +
                         " orbits");
    }
    Matrix z = affine_rows(u, layer.A, layer.b, "fixed_forward");
    if (cache != nullptr) {
        cache->u = u;
        cache->z = z;
    }
    apply_activation(z, layer.activation);
    return z;
}

GradientBundle fixed_backward(const FixedInvariantLayer& layer, const FixedCache& cache,
                              const Matrix& upstream) {
    if (cache.z.cols() != layer.A.rows() || cache.u.cols() != layer.A.cols() ||
        cache.u.rows() != cache.z.rows()) {
        throw ContractError("fixed_backward: cache does not match this layer; "
                            "run fixed_forward with a cache first");
    }
    Matrix dz = masked_upstream(cache.z, upstream, layer.activation);
    GradientBundle g;
    g.db = column_sums(dz);
    g.dW = matmul_tn(dz, cache.u);
    Matrix du = matmul(dz, layer.A);
    g.dx = Matrix(du.rows(), layer.basis.dim());
    for (std::size_t r = 0; r < du.rows(); ++r) {
        layer.basis.apply_transpose_add(du.row(r), g.dx.row(r), 1.0);
    }
    return g;
}

Vector fixed_layer_forward(const FixedInvariantLayer& layer, std::span<const double> x,
                           FixedCache* cache) {
    Matrix out = fixed_forward(layer, row_matrix(x), cache);
    return Vector(out.data(), out.data() + out.size());
}

GradientBundle fixed_layer_backward(const FixedInvariantLayer& layer, const FixedCache& cache,
                                    std::span<const double> upstream) {
    return fixed_backward(layer, cache, row_matrix(upstream));
}

// ---------------------------------------------------------------------------
// Probabilistic invariant layer
// ---------------------------------------------------------------------------

std::size_t ProbInvariantLayer::basis_rows() const {
    std::size_t d = 0;
    for (const auto& b : bases) d += b.count();
    return d;
}

std::size_t ProbInvariantLayer::coeff_cols() const {
    std::size_t d = basis_rows();
    return identity_mode == IdentityMode::augmented ? d + input_dim : d;
}

ProbInvariantLayer make_prob_layer(std::vector<InvariantBasis> bases, std::size_t hidden_width,
                                   std::size_t input_dim, IdentityMode mode,
                                   Activation activation) {
    if (hidden_width == 0 || input_dim == 0) {
        throw DomainError("make_prob_layer: hidden width and input dim must be positive");
    }
    for (const auto& b : bases) {
        if (b.dim() != input_dim) {
            throw ShapeError("make_prob_layer: basis \"" + b.group_name() + "\" acts on dim " +
                             std::to_string(b.dim()) + " but the layer input dim is " +
                             std::to_string(input_dim));
        }
    }
    ProbInvariantLayer layer;
    layer.bases = std::move(bases);
    layer.identity_mode = mode;
    layer.activation = activation;
    layer.input_dim = input_dim;
    layer.logits.assign(layer.scheme_count(), 0.0);
    layer.A = Matrix(hidden_width, layer.coeff_cols());
    layer.b.assign(hidden_width, 0.0);
    return layer;
}

Matrix assemble_weights(const ProbInvariantLayer& layer, std::span<const double> pi) {
    check_simplex(pi, layer.scheme_count(), "assemble_weights");
    const std::size_t D = layer.input_dim;
    const std::size_t d = layer.basis_rows();
    const std::size_t cols = layer.coeff_cols();
    if (layer.A.cols() != cols) {
        throw ShapeError("assemble_weights: A has " + std::to_string(layer.A.cols()) +
                         " columns, expected " + std::to_string(cols));
    }
    const std::size_t q = layer.bases.size();
    Matrix S(cols, D);
    std::size_t row = 0;
    for (std::size_t k = 0; k < q; ++k) {
        const Matrix& v = layer.bases[k].rows();
        for (std::size_t r = 0; r < v.rows(); ++r, ++row) {
            const double* src = v.data() + r * D;
            double* dst = S.data() + row * D;
            for (std::size_t c = 0; c < D; ++c) dst[c] = pi[k] * src[c];
        }
    }
    const double p_id = pi[q];
    if (layer.identity_mode == IdentityMode::paper_literal) {
        for (std::size_t i = 0; i < std::min(d, D); ++i) S(i, i) += p_id;
    } else {
        for (std::size_t s = 0; s < D; ++s) S(d + s, s) = p_id;
    }
    return matmul(layer.A, S);
}

Matrix prob_features(const ProbInvariantLayer& layer, const Matrix& x) {
    if (x.cols() != layer.input_dim) {
        throw ShapeError("prob_features: input has " + std::to_string(x.cols()) +
                         " columns, expected " + std::to_string(layer.input_dim));
    }
    Matrix u(x.rows(), layer.basis_rows());
    std::size_t off = 0;
    for (const auto& basis : layer.bases) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            basis.apply(x.row(r), u.row(r).subspan(off, basis.count()));
        }
        off += basis.count();
    }
    return u;
}

Matrix prob_forward(const ProbInvariantLayer& layer, std::span<const double> pi, const Matrix& x,
                    ProbCache* cache) {
    return prob_forward_features(layer, pi, prob_features(layer, x), x, cache);
}

Matrix prob_forward_features(const ProbInvariantLayer& layer, std::span<const double> pi,
                             const Matrix& u, const Matrix& x, ProbCache* cache) {
    check_simplex(pi, layer.scheme_count(), "prob_forward");
    const std::size_t d = layer.basis_rows();
    const std::size_t D = layer.input_dim;
    if (x.cols() != D || u.cols() != d || u.rows() != x.rows()) {
        throw ShapeError("prob_forward: got features " + std::to_string(u.rows()) + "x" +
                         std::to_string(u.cols()) + " and input " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()) + ", expected widths " +
                         std::to_string(d) + " and " + std::to_string(D));
    }
    const std::size_t q = layer.bases.size();
    const double p_id = pi[q];
    Matrix ueff(x.rows(), layer.coeff_cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* ur = u.data() + r * d;
        const double* xr = x.data() + r * D;
        double* er = ueff.data() + r * ueff.cols();
        std::size_t off = 0;
        for (std::size_t k = 0; k < q; ++k) {
            const std::size_t dk = layer.bases[k].count();
            for (std::size_t i = 0; i < dk; ++i) er[off + i] = pi[k] * ur[off + i];
            off += dk;
        }
        if (layer.identity_mode == IdentityMode::paper_literal) {
            for (std::size_t i = 0; i < std::min(d, D); ++i) er[i] += p_id * xr[i];
        } else {
            for (std::size_t s = 0; s < D; ++s) er[d + s] = p_id * xr[s];
        }
    }
    Matrix z = affine_rows(ueff, layer.A, layer.b, "prob_forward");
    if (cache != nullptr) {
        cache->x = x;
        cache->u = u;
        cache->ueff = std::move(ueff);
        cache->z = z;
        cache->pi.assign(pi.begin(), pi.end());
    }
    apply_activation(z, layer.activation);
    return z;
}

GradientBundle prob_backward(const ProbInvariantLayer& layer, const ProbCache& cache,
                             const Matrix& upstream) {
    const std::size_t d = layer.basis_rows();
    const std::size_t D = layer.input_dim;
    const std::size_t q = layer.bases.size();
    if (cache.z.cols() != layer.A.rows() || cache.ueff.cols() != layer.A.cols() ||
        cache.u.cols() != d || cache.x.cols() != D || cache.pi.size() != q + 1 ||
        cache.x.rows() != cache.z.rows()) {
        throw ContractError("prob_backward: cache does not match this layer; "
                            "run prob_forward with a cache first");
    }
    Matrix dz = masked_upstream(cache.z, upstream, layer.activation);
    GradientBundle g;
    g.db = column_sums(dz);
    g.dW = matmul_tn(dz, cache.ueff);
    Matrix dueff = matmul(dz, layer.A);

    g.dpi.assign(q + 1, 0.0);
    g.dx = Matrix(cache.x.rows(), D);
    const double p_id = cache.pi[q];
    for (std::size_t r = 0; r < dueff.rows(); ++r) {
        const double* de = dueff.data() + r * dueff.cols();
        const double* ur = cache.u.data() + r * d;
        const double* xr = cache.x.data() + r * D;
        double* dxr = g.dx.data() + r * D;
        std::size_t off = 0;
        for (std::size_t k = 0; k < q; ++k) {
            const auto& basis = layer.bases[k];
            const std::size_t dk = basis.count();
            double acc = 0.0;
            for (std::size_t i = 0; i < dk; ++i) acc += de[off + i] * ur[off + i];
            g.dpi[k] += acc;
            basis.apply_transpose_add(std::span<const double>(de + off, dk),
                                      std::span<double>(dxr, D), cache.pi[k]);
            off += dk;
        }
        if (layer.identity_mode == IdentityMode::paper_literal) {
            double acc = 0.0;
            for (std::size_t i = 0; i < std::min(d, D); ++i) {
                acc += de[i] * xr[i];
                dxr[i] += p_id * de[i];
            }
            g.dpi[q] += acc;
        } else {
            double acc = 0.0;
            for (std::size_t s = 0; s < D; ++s) {
                acc += de[d + s] * xr[s];
                dxr[s] += p_id * de[d + s];
            }
            g.dpi[q] += acc;
        }
    }
    return g;
}

Vector prob_layer_forward(const ProbInvariantLayer& layer, std::span<const double> pi,
                          std::span<const double> x, ProbCache* cache) {
    Matrix out = prob_forward(layer, pi, row_matrix(x), cache);
    return Vector(out.data(), out.data() + out.size());
}

GradientBundle prob_layer_backward(const ProbInvariantLayer& layer, const ProbCache& cache,
                                   std::span<const double> upstream) {
    return prob_backward(layer, cache, row_matrix(upstream));
}

}  // namespace symlearn
