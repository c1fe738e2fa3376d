#include "symlearn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "symlearn/errors.hpp"
#include "symlearn/numeric.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

AdamState::AdamState(std::vector<std::size_t> group_sizes, AdamConfig config)
    : config_(config) {
    if (!(config.lr >= 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
        !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.eps > 0.0)) {
        throw ConfigError("adam: need lr >= 0, betas in [0, 1), eps > 0");
    }
    m_.reserve(group_sizes.size());
    v_.reserve(group_sizes.size());
    for (std::size_t n : group_sizes) {
        m_.emplace_back(n, 0.0);
        v_.emplace_back(n, 0.0);
    }
}

void AdamState::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("adam: got " + std::to_string(params.size()) + " parameter and " +
                         std::to_string(grads.size()) + " gradient groups, state has " +
                         std::to_string(m_.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != m_[i].size() || grads[i].size() != m_[i].size()) {
            throw ShapeError("adam: group " + std::to_string(i) + " has " +
                             std::to_string(params[i].size()) + " params / " +
                             std::to_string(grads[i].size()) + " grads, state expects " +
                             std::to_string(m_[i].size()));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double* p = params[i].data();
        const double* g = grads[i].data();
        double* m = m_[i].data();
        double* v = v_[i].data();
        for (std::size_t j = 0, n = m_[i].size(); j < n; ++j) {
            m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
            v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
    state.step(params, grads);
}

namespace {

std::string loss_snapshot(const TrainedModel& model, const MapLossReport& report) {
    std::string s = "total=" + std::to_string(report.total) +
                    " nll=" + std::to_string(report.nll) +
                    " neg_log_prior=" + std::to_string(report.neg_log_prior);
    double max_param = 0.0;
    for (const auto& view : parameter_views(model)) {
        for (double x : view) max_param = std::max(max_param, std::abs(x));
    }
    s += " max|param|=" + std::to_string(max_param);
    return s;
}

}  // namespace

TrainResult train(const ModelSpec& spec, const ImageDataset& train_ds,
                  const ImageDataset& val_ds, const TrainConfig& config) {
    validate_dataset(train_ds);
    validate_dataset(val_ds);
    if (config.batch_size == 0) throw ConfigError("train: batch_size must be positive");
    if (config.max_epochs == 0) throw ConfigError("train: max_epochs must be positive");
    if (config.patience == 0) throw ConfigError("train: patience must be positive");

    RngState root(config.seed);
    RngState init_rng = root.fork(0);
    RngState shuffle_rng = root.fork(1);
    RngState noise_rng = root.fork(2);

    TrainResult result;
    result.model = build_model(spec, init_rng);
    TrainedModel& model = result.model;
    const bool relaxed = spec.kind == ModelKind::invariantnet;
    const std::size_t scheme_count = relaxed ? model.prob1.scheme_count() : 0;

    const Matrix features_full = precompute_features(model, train_ds.images);
    const std::size_t n = train_ds.count();

    std::vector<std::size_t> group_sizes;
    for (const auto& view : parameter_views(model)) group_sizes.push_back(view.size());
    AdamState adam(group_sizes, config.adam);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainedModel best_model = model;
    double best_acc = -1.0;
    std::size_t best_epoch = 0;
    std::size_t stale_epochs = 0;

    std::vector<std::size_t> batch_idx;
    std::vector<int> batch_labels;
    Vector noise;
    ModelGrads grads;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = shuffle_rng.next_below(i + 1);
            std::swap(order[i], order[j]);
        }
        double loss_sum = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_no) {
            const std::size_t stop = std::min(n, start + config.batch_size);
            batch_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(stop));
            const Matrix x = gather_rows(train_ds.images, batch_idx);
            const Matrix feats =
                features_full.size() != 0 ? gather_rows(features_full, batch_idx) : Matrix();
            batch_labels.clear();
            for (std::size_t r : batch_idx) batch_labels.push_back(train_ds.labels[r]);
            if (relaxed) {
                noise.resize(scheme_count);
                for (double& g : noise) g = standard_gumbel(noise_rng);
            }
            MapLossReport report;
            try {
                report = model_loss_and_grads(model, x, feats, batch_labels, noise, n, grads);
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_no) + ": " + e.what());
            }
            adam.step(parameter_views(model), gradient_views(grads, spec.kind));
            if (!std::isfinite(report.total)) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_no) + ": " +
                                   loss_snapshot(model, report));
            }
            loss_sum += report.total;
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(n);
        record.val_accuracy = evaluate(model, val_ds);
        record.pi = model.mean_pi();
        record.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start)
                .count();
        result.log.epochs.push_back(record);
        if (config.epoch_callback) config.epoch_callback(record);

        if (record.val_accuracy > best_acc) {
            best_acc = record.val_accuracy;
            best_epoch = epoch;
            best_model = model;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.patience) {
            break;
        }
    }

    result.model = best_model;
    result.best_epoch = best_epoch;
    result.best_val_accuracy = best_acc;
    return result;
}

TrainResult train(const ModelSpec& spec, const ImageDataset& full, const TrainConfig& config) {
    const SplitSpec indices = split(full, config.val_fraction, config.seed);
    return train(spec, subset(full, indices.train), subset(full, indices.val), config);
}

}  // namespace symlearn
