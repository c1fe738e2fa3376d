#pragma once

#include <span>

#include "symlearn/matrix.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

/// Dirichlet prior over scheme probabilities. A two-component Dirichlet is a
/// Beta prior; alpha = (1/2, ..., 1/2) is the Jeffreys prior.
struct DirichletPrior {
    Vector alpha;
};

DirichletPrior jeffreys_prior(std::size_t dim);

/// Relaxed categorical over sharing schemes: logits phi with a fixed
/// softmax temperature.
struct SchemeDistribution {
    Vector logits;
    double temperature = 1.0;
};

/// Deterministic scheme probabilities softmax(phi), used at inference.
Vector mean_probabilities(const SchemeDistribution& dist);

struct GumbelSample {
    Vector pi;     // softmax((phi + noise) / temperature)
    Vector noise;  // the standard Gumbel draws, kept for the backward pass
};

/// One relaxed draw; consumes dist.logits.size() Gumbel variates from rng.
GumbelSample gumbel_softmax_sample(const SchemeDistribution& dist, RngState& rng);

/// Relaxed probabilities for given noise (the differentiable reparameterized
/// map from logits to the simplex).
Vector gumbel_softmax_pi(const SchemeDistribution& dist, std::span<const double> noise);

/// d loss / d phi given d loss / d pi. `pi` must be the output of
/// gumbel_softmax_pi for this noise; a mismatch throws ContractError.
Vector gumbel_softmax_backward(const SchemeDistribution& dist, std::span<const double> noise,
                               std::span<const double> pi, std::span<const double> upstream);

/// Log density of Dirichlet(alpha) at pi, with pi entries clamped to
/// [1e-6, 1 - 1e-6] so boundary samples stay finite. Throws DomainError if
/// any alpha <= 0.
double dirichlet_log_density(std::span<const double> pi, const DirichletPrior& prior);

/// Gradient of dirichlet_log_density in pi; zero where the clamp is active.
Vector dirichlet_log_density_grad(std::span<const double> pi, const DirichletPrior& prior);

/// Log density of Beta(a, b) at p (p clamped like the Dirichlet).
double beta_log_density(double p, double a, double b);

/// Sum of per-example cross-entropies  sum_i [logsumexp(z_i) - z_i[y_i]].
double cross_entropy_sum(const Matrix& logits, std::span<const int> labels);

/// d cross_entropy_sum / d logits = softmax(z_i) - onehot(y_i), row-wise.
Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels);

/// Minibatch MAP objective: summed cross-entropy plus the negative log prior
/// on the sampled scheme probabilities, the latter scaled by
/// batch_size / dataset_size so one pass over the data weighs the prior once.
struct MapLossReport {
    double total = 0.0;
    double nll = 0.0;
    double neg_log_prior = 0.0;
    double prior_scale = 0.0;
    Vector pi_sample;
};

MapLossReport map_loss(const Matrix& batch_logits, std::span<const int> labels,
                       std::span<const double> pi_sample, const DirichletPrior& prior,
                       std::size_t dataset_size);

}  // namespace symlearn
