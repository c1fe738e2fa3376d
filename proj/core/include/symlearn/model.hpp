#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symlearn/bayes.hpp"
#include "symlearn/dataset.hpp"
#include "symlearn/layers.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

/// invariantnet learns which sharing scheme to use; rotnet / flipnet hardwire
/// the rotation / flip scheme; mlp shares nothing.
enum class ModelKind { invariantnet, rotnet, flipnet, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Prior over the q+1 scheme probabilities. type is "jeffreys" (alpha all
/// 1/2), "beta" (two schemes, alpha has 2 entries), or "dirichlet" (alpha has
/// q+1 entries).
struct PriorSpec {
    std::string type = "jeffreys";
    Vector alpha;
};

DirichletPrior resolve_prior(const PriorSpec& prior, std::size_t scheme_count);

struct ModelSpec {
    ModelKind kind = ModelKind::mlp;
    std::size_t grid_side = 28;
    std::size_t input_dim = 784;
    std::size_t hidden_width = 100;
    std::size_t class_count = 10;
    std::vector<std::string> groups;  // invariantnet scheme candidates
    IdentityMode identity_mode = IdentityMode::paper_literal;
    PriorSpec prior;
    std::uint64_t seed = 0;
};

/// Two-layer network; which first layer is live depends on spec.kind
/// (the other first-layer slots stay empty).
struct TrainedModel {
    ModelSpec spec;
    DenseLayer dense1;
    FixedInvariantLayer fixed1;
    ProbInvariantLayer prob1;
    DenseLayer out;

    /// Deterministic scheme probabilities softmax(phi); empty unless
    /// spec.kind is invariantnet.
    Vector mean_pi() const;
};

/// He-initialized model; weight draws come from `rng`.
TrainedModel build_model(const ModelSpec& spec, RngState& rng);
/// Same, seeding the generator from spec.seed.
TrainedModel build_model(const ModelSpec& spec);

std::size_t parameter_count(const TrainedModel& model);

/// Deterministic logits, one row per input row (invariantnet uses mean
/// scheme probabilities, no sampling).
Matrix model_logits(const TrainedModel& model, const Matrix& x);

/// Argmax class per row; ties resolve to the lower class index.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

/// Fraction of correctly classified examples. Throws DomainError on an
/// empty dataset.
double evaluate(const TrainedModel& model, const ImageDataset& ds);

struct ModelGrads {
    GradientBundle first;
    GradientBundle out;
    Vector dphi;  // invariantnet only
};

/// First-layer orbit features for a block of images, reusable across
/// epochs because the bases never change. Empty for mlp.
Matrix precompute_features(const TrainedModel& model, const Matrix& images);

/// Training objective on one batch. For invariantnet, `noise` holds the
/// batch's frozen Gumbel draws (one per scheme) and the prior from the spec
/// is applied with weight batch/dataset_size; other kinds ignore `noise` and
/// report a pure summed cross-entropy. `features` may carry this batch's
/// precomputed orbit features (pass an empty matrix to compute them here).
MapLossReport model_loss(const TrainedModel& model, const Matrix& x, const Matrix& features,
                         std::span<const int> y, std::span<const double> noise,
                         std::size_t dataset_size);
MapLossReport model_loss_and_grads(const TrainedModel& model, const Matrix& x,
                                   const Matrix& features, std::span<const int> y,
                                   std::span<const double> noise, std::size_t dataset_size,
                                   ModelGrads& grads);

/// Flat views over every trainable array, in a fixed order shared with
/// gradient_views: first-layer weights, first-layer bias, scheme logits
/// (invariantnet only), output weights, output bias.
std::vector<std::span<double>> parameter_views(TrainedModel& model);
std::vector<std::span<const double>> parameter_views(const TrainedModel& model);
std::vector<std::span<const double>> gradient_views(const ModelGrads& grads, ModelKind kind);

}  // namespace symlearn
