#include "symlearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "symlearn/errors.hpp"
#include "symlearn/group.hpp"

namespace symlearn {
namespace {

void fill_he(Matrix& w, std::size_t fan_in, RngState& rng) {
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    double* p = w.data();
    for (std::size_t i = 0, n = w.size(); i < n; ++i) p[i] = scale * rng.next_gaussian();
}

std::span<double> vec_span(Vector& v) { return {v.data(), v.size()}; }
std::span<const double> vec_span(const Vector& v) { return {v.data(), v.size()}; }
std::span<double> mat_span(Matrix& m) { return {m.data(), m.size()}; }
std::span<const double> mat_span(const Matrix& m) { return {m.data(), m.size()}; }

struct ForwardState {
    DenseCache dense_cache;
    FixedCache fixed_cache;
    ProbCache prob_cache;
    DenseCache out_cache;
    Vector pi;  // sampled scheme probabilities (invariantnet only)
};

/// First layer + output layer; fills caches when `state` is non-null.
Matrix forward_logits(const TrainedModel& model, const Matrix& x, const Matrix& features,
                      std::span<const double> pi, ForwardState* state) {
    Matrix hidden;
    switch (model.spec.kind) {
        case ModelKind::mlp:
            hidden = dense_forward(model.dense1, x, state ? &state->dense_cache : nullptr);
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet:
            hidden = features.size() != 0
                         ? fixed_forward_features(model.fixed1, features,
                                                  state ? &state->fixed_cache : nullptr)
                         : fixed_forward(model.fixed1, x, state ? &state->fixed_cache : nullptr);
            break;
        case ModelKind::invariantnet:
            hidden = features.size() != 0
                         ? prob_forward_features(model.prob1, pi, features, x,
                                                 state ? &state->prob_cache : nullptr)
                         : prob_forward(model.prob1, pi, x,
                                        state ? &state->prob_cache : nullptr);
            break;
    }
    return dense_forward(model.out, hidden, state ? &state->out_cache : nullptr);
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::invariantnet: return "invariantnet";
        case ModelKind::rotnet: return "rotnet";
        case ModelKind::flipnet: return "flipnet";
        case ModelKind::mlp: return "mlp";
    }
    throw DomainError("unknown model kind value");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "invariantnet") return ModelKind::invariantnet;
    if (name == "rotnet") return ModelKind::rotnet;
    if (name == "flipnet") return ModelKind::flipnet;
    if (name == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model kind \"" + name +
                      "\"; expected invariantnet, rotnet, flipnet, or mlp");
}

DirichletPrior resolve_prior(const PriorSpec& prior, std::size_t scheme_count) {
    if (scheme_count == 0) throw DomainError("resolve_prior: scheme_count must be positive");
    DirichletPrior out;
    if (prior.type == "jeffreys") {
        if (!prior.alpha.empty()) {
            throw ConfigError("jeffreys prior takes no alpha parameters");
        }
        out.alpha.assign(scheme_count, 0.5);
    } else if (prior.type == "beta") {
        if (scheme_count != 2) {
            throw ConfigError("beta prior needs exactly 2 schemes, got " +
                              std::to_string(scheme_count));
        }
        if (prior.alpha.size() != 2) {
            throw ConfigError("beta prior needs 2 alpha parameters, got " +
                              std::to_string(prior.alpha.size()));
        }
        out.alpha = prior.alpha;
    } else if (prior.type == "dirichlet") {
        if (prior.alpha.size() != scheme_count) {
            throw ConfigError("dirichlet prior needs " + std::to_string(scheme_count) +
                              " alpha parameters, got " + std::to_string(prior.alpha.size()));
        }
        out.alpha = prior.alpha;
    } else {
        throw ConfigError("unknown prior type \"" + prior.type +
                          "\"; expected jeffreys, beta, or dirichlet");
    }
    for (double a : out.alpha) {
        if (!(a > 0.0)) throw ConfigError("prior alpha entries must be positive");
    }
    return out;
}

Vector TrainedModel::mean_pi() const {
    if (spec.kind != ModelKind::invariantnet) return {};
    return mean_probabilities(SchemeDistribution{prob1.logits, 1.0});
}

TrainedModel build_model(const ModelSpec& spec, RngState& rng) {
    if (spec.hidden_width == 0) throw ConfigError("hidden_width must be positive");
    if (spec.class_count < 2) throw ConfigError("class_count must be at least 2");
    if (spec.input_dim == 0) throw ConfigError("input_dim must be positive");
    // Even the mlp never uses the grid itself, but a checkpoint whose
    // grid_side contradicts its input_dim would be lying about the data
    // layout, so the coherence rule applies to every kind.
    if (spec.grid_side * spec.grid_side != spec.input_dim) {
        throw ConfigError("input_dim " + std::to_string(spec.input_dim) +
                          " is not the square of grid_side " + std::to_string(spec.grid_side));
    }

    TrainedModel model;
    model.spec = spec;
    const std::size_t m = spec.hidden_width;
    switch (spec.kind) {
        case ModelKind::mlp:
            model.dense1.W = Matrix(m, spec.input_dim);
            fill_he(model.dense1.W, spec.input_dim, rng);
            model.dense1.b.assign(m, 0.0);
            model.dense1.activation = Activation::relu;
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet: {
            const SymmetryGroup group = spec.kind == ModelKind::rotnet
                                            ? rotation_group(spec.grid_side)
                                            : flip_group(spec.grid_side);
            model.fixed1.basis = invariant_basis(group);
            model.fixed1.A = Matrix(m, model.fixed1.basis.count());
            fill_he(model.fixed1.A, model.fixed1.basis.count(), rng);
            model.fixed1.b.assign(m, 0.0);
            model.fixed1.activation = Activation::relu;
            break;
        }
        case ModelKind::invariantnet: {
            if (spec.groups.empty()) {
                throw ConfigError("invariantnet needs at least one candidate group");
            }
            std::vector<InvariantBasis> bases;
            bases.reserve(spec.groups.size());
            for (const std::string& name : spec.groups) {
                bases.push_back(invariant_basis(group_by_name(name, spec.grid_side)));
            }
            model.prob1 = make_prob_layer(std::move(bases), m, spec.input_dim,
                                          spec.identity_mode, Activation::relu);
            fill_he(model.prob1.A, model.prob1.coeff_cols(), rng);
            // Validate the prior against the scheme count up front.
            resolve_prior(spec.prior, model.prob1.scheme_count());
            break;
        }
    }
    model.out.W = Matrix(spec.class_count, m);
    fill_he(model.out.W, m, rng);
    model.out.b.assign(spec.class_count, 0.0);
    model.out.activation = Activation::none;
    return model;
}

TrainedModel build_model(const ModelSpec& spec) {
    RngState rng = RngState(spec.seed).fork(0);
    return build_model(spec, rng);
}

std::size_t parameter_count(const TrainedModel& model) {
    std::size_t n = 0;
    for (const auto& view : parameter_views(model)) n += view.size();
    return n;
}

Matrix model_logits(const TrainedModel& model, const Matrix& x) {
    return forward_logits(model, x, Matrix(), model.mean_pi(), nullptr);
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
    const Matrix logits = model_logits(model, x);
    std::vector<int> labels(logits.rows());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto row = logits.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[best]) best = c;
        }
        labels[r] = static_cast<int>(best);
    }
    return labels;
}

double evaluate(const TrainedModel& model, const ImageDataset& ds) {
    if (ds.count() == 0) throw DomainError("evaluate: empty dataset");
    if (ds.dim() != model.spec.input_dim) {
        throw ShapeError("evaluate: dataset images have " + std::to_string(ds.dim()) +
                         " pixels but the model expects " +
                         std::to_string(model.spec.input_dim));
    }
    constexpr std::size_t kChunk = 1024;
    std::size_t correct = 0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < ds.count(); start += kChunk) {
        const std::size_t stop = std::min(ds.count(), start + kChunk);
        idx.resize(stop - start);
        std::iota(idx.begin(), idx.end(), start);
        const std::vector<int> pred = predict(model, gather_rows(ds.images, idx));
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const int truth = ds.labels[start + i];
            if (truth < 0 || static_cast<std::size_t>(truth) >= model.spec.class_count) {
                throw DataError("evaluate: label " + std::to_string(truth) +
                                " is out of range for " +
                                std::to_string(model.spec.class_count) + " classes");
            }
            if (pred[i] == truth) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(ds.count());
}

Matrix precompute_features(const TrainedModel& model, const Matrix& images) {
    switch (model.spec.kind) {
        case ModelKind::mlp: return Matrix();
        case ModelKind::rotnet:
        case ModelKind::flipnet: return model.fixed1.basis.apply_batch(images);
        case ModelKind::invariantnet: return prob_features(model.prob1, images);
    }
    throw DomainError("unknown model kind value");
}

MapLossReport model_loss(const TrainedModel& model, const Matrix& x, const Matrix& features,
                         std::span<const int> y, std::span<const double> noise,
                         std::size_t dataset_size) {
    if (model.spec.kind != ModelKind::invariantnet) {
        const Matrix logits = forward_logits(model, x, features, {}, nullptr);
        MapLossReport report;
        report.nll = cross_entropy_sum(logits, y);
        report.total = report.nll;
        return report;
    }
    const SchemeDistribution dist{model.prob1.logits, 1.0};
    const Vector pi = gumbel_softmax_pi(dist, noise);
    const Matrix logits = forward_logits(model, x, features, pi, nullptr);
    const DirichletPrior prior = resolve_prior(model.spec.prior, model.prob1.scheme_count());
    return map_loss(logits, y, pi, prior, dataset_size);
}

MapLossReport model_loss_and_grads(const TrainedModel& model, const Matrix& x,
                                   const Matrix& features, std::span<const int> y,
                                   std::span<const double> noise, std::size_t dataset_size,
                                   ModelGrads& grads) {
    ForwardState state;
    MapLossReport report;
    Matrix logits;
    if (model.spec.kind == ModelKind::invariantnet) {
        const SchemeDistribution dist{model.prob1.logits, 1.0};
        state.pi = gumbel_softmax_pi(dist, noise);
        logits = forward_logits(model, x, features, state.pi, &state);
        const DirichletPrior prior = resolve_prior(model.spec.prior, model.prob1.scheme_count());
        report = map_loss(logits, y, state.pi, prior, dataset_size);
    } else {
        logits = forward_logits(model, x, features, {}, &state);
        report.nll = cross_entropy_sum(logits, y);
        report.total = report.nll;
    }

    const Matrix dlogits = cross_entropy_grad(logits, y);
    grads.out = dense_backward(model.out, state.out_cache, dlogits);
    switch (model.spec.kind) {
        case ModelKind::mlp:
            grads.first = dense_backward(model.dense1, state.dense_cache, grads.out.dx);
            grads.dphi.clear();
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet:
            grads.first = fixed_backward(model.fixed1, state.fixed_cache, grads.out.dx);
            grads.dphi.clear();
            break;
        case ModelKind::invariantnet: {
            grads.first = prob_backward(model.prob1, state.prob_cache, grads.out.dx);
            const DirichletPrior prior =
                resolve_prior(model.spec.prior, model.prob1.scheme_count());
            const Vector prior_grad = dirichlet_log_density_grad(state.pi, prior);
            Vector dpi = grads.first.dpi;
            for (std::size_t i = 0; i < dpi.size(); ++i) {
                dpi[i] -= report.prior_scale * prior_grad[i];
            }
            const SchemeDistribution dist{model.prob1.logits, 1.0};
            grads.dphi = gumbel_softmax_backward(dist, noise, state.pi, dpi);
            break;
        }
    }
    return report;
}

std::vector<std::span<double>> parameter_views(TrainedModel& model) {
    std::vector<std::span<double>> views;
    switch (model.spec.kind) {
        case ModelKind::mlp:
            views = {mat_span(model.dense1.W), vec_span(model.dense1.b)};
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet:
            views = {mat_span(model.fixed1.A), vec_span(model.fixed1.b)};
            break;
        case ModelKind::invariantnet:
            views = {mat_span(model.prob1.A), vec_span(model.prob1.b),
                     vec_span(model.prob1.logits)};
            break;
    }
    views.push_back(mat_span(model.out.W));
    views.push_back(vec_span(model.out.b));
    return views;
}

std::vector<std::span<const double>> parameter_views(const TrainedModel& model) {
    std::vector<std::span<const double>> views;
    switch (model.spec.kind) {
        case ModelKind::mlp:
            views = {mat_span(model.dense1.W), vec_span(model.dense1.b)};
            break;
        case ModelKind::rotnet:
        case ModelKind::flipnet:
            views = {mat_span(model.fixed1.A), vec_span(model.fixed1.b)};
            break;
        case ModelKind::invariantnet:
            views = {mat_span(model.prob1.A), vec_span(model.prob1.b),
                     vec_span(model.prob1.logits)};
            break;
    }
    views.push_back(mat_span(model.out.W));
    views.push_back(vec_span(model.out.b));
    return views;
}

std::vector<std::span<const double>> gradient_views(const ModelGrads& grads, ModelKind kind) {
    std::vector<std::span<const double>> views = {mat_span(grads.first.dW),
                                                  vec_span(grads.first.db)};
    if (kind == ModelKind::invariantnet) views.push_back(vec_span(grads.dphi));
    views.push_back(mat_span(grads.out.dW));
    views.push_back(vec_span(grads.out.db));
    return views;
}

}  // namespace symlearn
