#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "symlearn/dataset.hpp"
#include "symlearn/model.hpp"

namespace symlearn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam moment estimates for a fixed list of parameter groups.
class AdamState {
public:
    AdamState(std::vector<std::size_t> group_sizes, AdamConfig config);

    /// One update; params and grads must match the registered group sizes.
    void step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads);

    std::size_t step_count() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    std::vector<Vector> m_;
    std::vector<Vector> v_;
    std::size_t t_ = 0;
};

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

struct EpochRecord {
    std::size_t epoch = 0;      // 1-based
    double train_loss = 0.0;    // mean per-example objective over the epoch
    double val_accuracy = 0.0;
    Vector pi;                  // mean scheme probabilities (invariantnet only)
    double wall_time_s = 0.0;   // this epoch's duration
};

struct TrajectoryLog {
    std::vector<EpochRecord> epochs;
};

struct TrainConfig {
    AdamConfig adam;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;    // epochs without val improvement before stopping
    double val_fraction = 0.1;    // used by the self-splitting overload
    std::uint64_t seed = 0;       // drives init, shuffling, scheme noise, and the split
    /// Called after every epoch, e.g. to persist partial logs.
    std::function<void(const EpochRecord&)> epoch_callback;
};

struct TrainResult {
    TrainedModel model;  // parameters restored from the best epoch
    TrajectoryLog log;
    std::size_t best_epoch = 0;
    double best_val_accuracy = 0.0;
};

/// Minibatch MAP training with early stopping on validation accuracy.
/// Deterministic in (spec, data, config): reruns produce identical logs and
/// parameters. Throws NumericError (with epoch/batch context) if the
/// objective leaves the finite range.
TrainResult train(const ModelSpec& spec, const ImageDataset& train_ds,
                  const ImageDataset& val_ds, const TrainConfig& config);

/// Same, carving a validation split out of `full` first.
TrainResult train(const ModelSpec& spec, const ImageDataset& full, const TrainConfig& config);

}  // namespace symlearn
