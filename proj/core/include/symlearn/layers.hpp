#pragma once

#include <span>
#include <vector>

#include "symlearn/invariant.hpp"
#include "symlearn/matrix.hpp"

namespace symlearn {

enum class Activation { relu, none };

/// Gradients of one layer. `dW` mirrors the layer's weight or coefficient
/// matrix, `db` the bias, `dpi` the scheme probabilities (probabilistic layer
/// only), and `dx` the layer input.
struct GradientBundle {
    Matrix dW;
    Vector db;
    Vector dpi;
    Matrix dx;
};

// ---------------------------------------------------------------------------
// Dense layer
// ---------------------------------------------------------------------------

struct DenseLayer {
    Matrix W;  // m x D
    Vector b;  // m
    Activation activation = Activation::relu;
};

struct DenseCache {
    Matrix x;  // B x D
    Matrix z;  // B x m pre-activations
};

/// activation(x W^T + b), one input per row.
Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache = nullptr);
GradientBundle dense_backward(const DenseLayer& layer, const DenseCache& cache,
                              const Matrix& upstream);

/// Single-input convenience wrappers.
Vector dense_forward(const DenseLayer& layer, std::span<const double> x,
                     DenseCache* cache = nullptr);
GradientBundle dense_backward(const DenseLayer& layer, const DenseCache& cache,
                              std::span<const double> upstream);

// ---------------------------------------------------------------------------
// Fixed-scheme invariant layer
// ---------------------------------------------------------------------------

/// First layer whose effective weights A V lie in the span of an invariant
/// basis by construction, so its outputs are unchanged under the basis's
/// group acting on the input.
struct FixedInvariantLayer {
    InvariantBasis basis;  // d x D
    Matrix A;              // m x d
    Vector b;              // m
    Activation activation = Activation::relu;
};

struct FixedCache {
    Matrix u;  // B x d orbit features
    Matrix z;  // B x m
};

Matrix fixed_forward(const FixedInvariantLayer& layer, const Matrix& x,
                     FixedCache* cache = nullptr);
/// Forward from precomputed orbit features u = basis.apply_batch(x).
Matrix fixed_forward_features(const FixedInvariantLayer& layer, const Matrix& u,
                              FixedCache* cache = nullptr);
GradientBundle fixed_backward(const FixedInvariantLayer& layer, const FixedCache& cache,
                              const Matrix& upstream);

Vector fixed_layer_forward(const FixedInvariantLayer& layer, std::span<const double> x,
                           FixedCache* cache = nullptr);
GradientBundle fixed_layer_backward(const FixedInvariantLayer& layer, const FixedCache& cache,
                                    std::span<const double> upstream);

// ---------------------------------------------------------------------------
// Probabilistic invariant layer
// ---------------------------------------------------------------------------

/// How the no-sharing option enters the weight assembly.
///
/// paper_literal adds a d x D generalized identity (ones on the main
/// diagonal) to the stacked basis rows, so when d < D the no-sharing option
/// only reaches the first d input coordinates. augmented appends a full
/// D x D identity block with its own coefficient columns instead.
enum class IdentityMode { paper_literal, augmented };

/// Input layer carrying a relaxed categorical choice over q invariance
/// schemes plus a no-sharing option. Given scheme probabilities pi, the
/// effective weights are A S(pi) where S stacks the probability-scaled
/// bases and the identity contribution.
struct ProbInvariantLayer {
    std::vector<InvariantBasis> bases;  // q bases, all on the same input dim
    Vector logits;                      // q+1 learnable scheme logits
    Matrix A;                           // m x coeff_cols()
    Vector b;                           // m
    IdentityMode identity_mode = IdentityMode::paper_literal;
    Activation activation = Activation::relu;
    std::size_t input_dim = 0;

    std::size_t hidden() const { return A.rows(); }
    std::size_t scheme_count() const { return bases.size() + 1; }
    /// Total stacked basis rows d.
    std::size_t basis_rows() const;
    /// Columns of A: d in paper_literal mode, d + D in augmented mode.
    std::size_t coeff_cols() const;
};

/// Zero-parameter layer with validated, consistent shapes.
ProbInvariantLayer make_prob_layer(std::vector<InvariantBasis> bases, std::size_t hidden_width,
                                   std::size_t input_dim,
                                   IdentityMode mode = IdentityMode::paper_literal,
                                   Activation activation = Activation::relu);

/// Effective first-layer weight matrix (m x D) for the given scheme
/// probabilities. Throws DomainError if pi is off the simplex by more
/// than 1e-9.
Matrix assemble_weights(const ProbInvariantLayer& layer, std::span<const double> pi);

struct ProbCache {
    Matrix x;     // B x D
    Matrix u;     // B x d unscaled orbit features (all bases concatenated)
    Matrix ueff;  // B x coeff_cols effective features
    Matrix z;     // B x m
    Vector pi;
};

Matrix prob_forward(const ProbInvariantLayer& layer, std::span<const double> pi, const Matrix& x,
                    ProbCache* cache = nullptr);
/// Forward from precomputed unscaled orbit features (concatenation of every
/// basis applied to x).
Matrix prob_forward_features(const ProbInvariantLayer& layer, std::span<const double> pi,
                             const Matrix& u, const Matrix& x, ProbCache* cache = nullptr);
/// Unscaled orbit features for a batch, one basis after another (B x d).
Matrix prob_features(const ProbInvariantLayer& layer, const Matrix& x);
GradientBundle prob_backward(const ProbInvariantLayer& layer, const ProbCache& cache,
                             const Matrix& upstream);

Vector prob_layer_forward(const ProbInvariantLayer& layer, std::span<const double> pi,
                          std::span<const double> x, ProbCache* cache = nullptr);
GradientBundle prob_layer_backward(const ProbInvariantLayer& layer, const ProbCache& cache,
                                   std::span<const double> upstream);

}  // namespace symlearn
