#include "symlearn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symlearn/checkpoint.hpp"
#include "symlearn/dataset.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/fsio.hpp"
#include "symlearn/group.hpp"
#include "symlearn/invariant.hpp"
#include "symlearn/model.hpp"
#include "symlearn/train.hpp"

namespace symlearn::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json load_config_json(const std::string& path) {
    std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("config " + path + " is not valid JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": config root must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) throw ConfigError(context + ": unknown config key \"" + it.key() + "\"");
    }
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
    }
}

/// Value of --config/-c from a raw arg list, before CLI11 runs, so config
/// values can seed the option defaults (flags then override them).
std::string find_config_arg(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" || a == "-c") {
            if (i + 1 < args.size()) return args[i + 1];
            throw ConfigError("--config expects a file path");
        }
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

std::string env_data_dir() {
    const char* v = std::getenv("SYMLEARN_DATA_DIR");
    return v != nullptr ? std::string(v) : std::string();
}

std::string find_idx_file(const std::string& dir, const std::string& base) {
    for (const std::string& cand : {dir + "/" + base, dir + "/" + base + ".gz"}) {
        if (std::filesystem::exists(cand)) return cand;
    }
    throw IoError("cannot find " + base + " (or " + base + ".gz) under " + dir);
}

ImageDataset load_mnist_split(const std::string& dir, bool train_split) {
    if (dir.empty()) {
        throw ConfigError("no dataset directory: pass --data-dir, set data_dir in the "
                          "config, or set SYMLEARN_DATA_DIR");
    }
    const char* images = train_split ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte";
    const char* labels = train_split ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte";
    return load_idx(find_idx_file(dir, images), find_idx_file(dir, labels));
}

ImageDataset head_subset(const ImageDataset& ds, std::size_t limit) {
    if (limit == 0 || limit >= ds.count()) return ds;
    std::vector<std::size_t> idx(limit);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return subset(ds, idx);
}

IdentityMode identity_mode_from_name(const std::string& name) {
    if (name == "paper_literal") return IdentityMode::paper_literal;
    if (name == "augmented") return IdentityMode::augmented;
    throw ConfigError("unknown identity mode \"" + name +
                      "\"; expected paper_literal or augmented");
}

json nested_rows(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        rows.push_back(Vector(row.begin(), row.end()));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Shared experiment settings (config file + flag overrides)
// ---------------------------------------------------------------------------

struct TrainSettings {
    std::string data_dir;
    std::string out_dir = "runs";
    std::string model = "invariantnet";
    std::string variant = "plain";
    std::uint64_t variant_seed = 0;
    bool per_image_train_transform = false;
    std::size_t hidden_width = 100;
    std::vector<std::string> groups = {"rot90", "flip"};
    std::string identity_mode = "paper_literal";
    std::string prior_type = "jeffreys";
    std::vector<double> prior_alpha;
    double lr = 1e-3;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    double val_fraction = 0.1;
    std::size_t train_limit = 0;
    std::vector<std::uint64_t> seeds = {1};
    // compare only
    std::vector<std::string> models = {"invariantnet", "mlp"};
    std::vector<std::string> variants = {"plain"};
    std::string out_csv = "compare.csv";
};

constexpr std::initializer_list<const char*> kTrainKeys = {
    "data_dir",      "out_dir",  "model",      "variant",      "variant_seed",
    "per_image_train_transform", "hidden_width", "groups",     "identity_mode",
    "prior_type",    "prior_alpha", "lr",      "batch_size",   "max_epochs",
    "patience",      "val_fraction", "train_limit", "seeds"};

constexpr std::initializer_list<const char*> kCompareKeys = {
    "data_dir",      "models",   "variants",   "seeds",        "variant_seed",
    "per_image_train_transform", "hidden_width", "groups",     "identity_mode",
    "prior_type",    "prior_alpha", "lr",      "batch_size",   "max_epochs",
    "patience",      "val_fraction", "train_limit", "out_csv"};

void settings_from_json(const json& j, TrainSettings& s) {
    maybe_get(j, "data_dir", s.data_dir);
    maybe_get(j, "out_dir", s.out_dir);
    maybe_get(j, "model", s.model);
    maybe_get(j, "variant", s.variant);
    maybe_get(j, "variant_seed", s.variant_seed);
    maybe_get(j, "per_image_train_transform", s.per_image_train_transform);
    maybe_get(j, "hidden_width", s.hidden_width);
    maybe_get(j, "groups", s.groups);
    maybe_get(j, "identity_mode", s.identity_mode);
    maybe_get(j, "prior_type", s.prior_type);
    maybe_get(j, "prior_alpha", s.prior_alpha);
    maybe_get(j, "lr", s.lr);
    maybe_get(j, "batch_size", s.batch_size);
    maybe_get(j, "max_epochs", s.max_epochs);
    maybe_get(j, "patience", s.patience);
    maybe_get(j, "val_fraction", s.val_fraction);
    maybe_get(j, "train_limit", s.train_limit);
    maybe_get(j, "seeds", s.seeds);
    maybe_get(j, "models", s.models);
    maybe_get(j, "variants", s.variants);
    maybe_get(j, "out_csv", s.out_csv);
}

/// Options shared by train and compare.
void add_hyper_options(CLI::App& cmd, TrainSettings& s) {
    cmd.add_option("--data-dir", s.data_dir, "Directory holding the MNIST IDX files");
    cmd.add_option("--variant-seed", s.variant_seed, "Seed for the dataset transform");
    cmd.add_flag("--per-image-train-transform", s.per_image_train_transform,
                 "Transform each training image independently instead of per class");
    cmd.add_option("--width", s.hidden_width, "Hidden layer width");
    cmd.add_option("--groups", s.groups, "Candidate symmetry groups (invariantnet)")
        ->delimiter(',');
    cmd.add_option("--identity-mode", s.identity_mode,
                   "No-sharing option layout: paper_literal or augmented");
    cmd.add_option("--prior-type", s.prior_type, "Scheme prior: jeffreys, beta, or dirichlet");
    cmd.add_option("--prior-alpha", s.prior_alpha, "Prior concentration parameters")
        ->delimiter(',');
    cmd.add_option("--lr", s.lr, "Adam learning rate");
    cmd.add_option("--batch-size", s.batch_size, "Minibatch size");
    cmd.add_option("--max-epochs", s.max_epochs, "Epoch cap");
    cmd.add_option("--patience", s.patience, "Early-stopping patience (epochs)");
    cmd.add_option("--val-fraction", s.val_fraction, "Validation split fraction");
    cmd.add_option("--train-limit", s.train_limit,
                   "Use only the first N training images (0 = all)");
}

ModelSpec spec_from_settings(const TrainSettings& s, const ImageDataset& train_ds,
                             std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = model_kind_from_string(s.model);
    spec.grid_side = train_ds.grid_side;
    spec.input_dim = train_ds.dim();
    spec.hidden_width = s.hidden_width;
    spec.class_count = static_cast<std::size_t>(train_ds.class_count);
    spec.groups = s.groups;
    spec.identity_mode = identity_mode_from_name(s.identity_mode);
    spec.prior.type = s.prior_type;
    spec.prior.alpha = s.prior_alpha;
    spec.seed = seed;
    return spec;
}

TrainConfig train_config_from_settings(const TrainSettings& s, std::uint64_t seed) {
    TrainConfig config;
    config.adam.lr = s.lr;
    config.batch_size = s.batch_size;
    config.max_epochs = s.max_epochs;
    config.patience = s.patience;
    config.val_fraction = s.val_fraction;
    config.seed = seed;
    return config;
}

std::string trajectory_csv(const std::vector<EpochRecord>& epochs, std::size_t scheme_count) {
    std::string s = "epoch,train_loss,val_acc";
    for (std::size_t k = 1; k <= scheme_count; ++k) s += ",p_" + std::to_string(k);
    s += ",wall_time_s\n";
    for (const EpochRecord& r : epochs) {
        s += std::to_string(r.epoch);
        s += "," + format_double(r.train_loss);
        s += "," + format_double(r.val_accuracy);
        for (double p : r.pi) s += "," + format_double(p);
        s += "," + format_double(r.wall_time_s);
        s += "\n";
    }
    return s;
}

struct RunOutcome {
    TrainResult result;
    double test_accuracy = 0.0;
    double wall_time_s = 0.0;
};

/// Train one (model, variant, seed) run on already-prepared data.
/// `trajectory_path`, when non-empty, is rewritten after every epoch so a
/// later abort still leaves the completed epochs on disk.
RunOutcome run_experiment(const TrainSettings& s, const ImageDataset& train_ds,
                          const ImageDataset& test_ds, std::uint64_t seed,
                          const std::string& trajectory_path) {
    const auto started = std::chrono::steady_clock::now();
    const ModelSpec spec = spec_from_settings(s, train_ds, seed);
    TrainConfig config = train_config_from_settings(s, seed);

    std::vector<EpochRecord> epochs_so_far;
    std::size_t scheme_count = spec.kind == ModelKind::invariantnet ? spec.groups.size() + 1 : 0;
    if (!trajectory_path.empty()) {
        config.epoch_callback = [&](const EpochRecord& record) {
            epochs_so_far.push_back(record);
            atomic_write_text(trajectory_path, trajectory_csv(epochs_so_far, scheme_count));
        };
    }

    RunOutcome outcome;
    outcome.result = train(spec, train_ds, config);
    outcome.test_accuracy = evaluate(outcome.result.model, test_ds);
    outcome.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return outcome;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_group(const std::string& name, std::size_t n, const std::string& out_path,
              bool include_reynolds) {
    const SymmetryGroup group = group_by_name(name, n);
    const InvariantBasis basis = invariant_basis(group);
    json doc{{"name", group.name},
             {"dim", group.dim},
             {"order", group.elements.size()},
             {"orbit_sizes", basis.orbit_sizes()},
             {"basis", nested_rows(basis.rows())}};
    if (include_reynolds) doc["reynolds"] = nested_rows(reynolds_operator(group).matrix);
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        atomic_write_text(out_path, text);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_prepare(const TrainSettings& s) {
    const ImageDataset train_plain = load_mnist_split(s.data_dir, true);
    const ImageDataset test_plain = load_mnist_split(s.data_dir, false);
    VariantRecipe recipe;
    recipe.variant = variant_from_string(s.variant);
    recipe.seed = s.variant_seed;
    recipe.per_image_train_transform = s.per_image_train_transform;
    const PreparedVariant prep = prepare_variant(train_plain, test_plain, recipe);

    const std::string dir = s.out_dir + "/" + s.variant;
    save_idx(prep.train, dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte");
    save_idx(prep.test, dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");

    json manifest{{"variant", s.variant},
                  {"seed", s.variant_seed},
                  {"per_image_train_transform", s.per_image_train_transform},
                  {"dropped_classes", prep.dropped_classes},
                  {"label_remap", prep.label_remap},
                  {"class_count", prep.train.class_count},
                  {"grid_side", prep.train.grid_side},
                  {"train_count", prep.train.count()},
                  {"test_count", prep.test.count()}};
    atomic_write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << dir << " (" << prep.train.count() << " train / "
              << prep.test.count() << " test images)\n";
    return 0;
}

int cmd_train(const TrainSettings& s) {
    if (s.seeds.empty()) throw ConfigError("train: need at least one seed");
    const ImageDataset train_plain = load_mnist_split(s.data_dir, true);
    const ImageDataset test_plain = load_mnist_split(s.data_dir, false);
    VariantRecipe recipe;
    recipe.variant = variant_from_string(s.variant);
    recipe.seed = s.variant_seed;
    recipe.per_image_train_transform = s.per_image_train_transform;
    const PreparedVariant prep = prepare_variant(train_plain, test_plain, recipe);
    const ImageDataset train_ds = head_subset(prep.train, s.train_limit);

    for (std::uint64_t seed : s.seeds) {
        const std::string prefix =
            s.out_dir + "/" + s.model + "_" + s.variant + "_seed" + std::to_string(seed);
        const RunOutcome outcome =
            run_experiment(s, train_ds, prep.test, seed, prefix + "_trajectory.csv");

        save_model(outcome.result.model, prefix + "_checkpoint.json");
        json summary{{"model", s.model},
                     {"variant", s.variant},
                     {"seed", seed},
                     {"epochs_run", outcome.result.log.epochs.size()},
                     {"best_epoch", outcome.result.best_epoch},
                     {"val_accuracy", outcome.result.best_val_accuracy},
                     {"test_accuracy", outcome.test_accuracy},
                     {"final_pi", outcome.result.model.mean_pi()},
                     {"parameter_count", parameter_count(outcome.result.model)},
                     {"wall_time_s", outcome.wall_time_s}};
        atomic_write_text(prefix + "_summary.json", summary.dump(2) + "\n");

        std::cout << s.model << " on " << s.variant << " seed " << seed << ": val_acc="
                  << format_double(outcome.result.best_val_accuracy)
                  << " test_acc=" << format_double(outcome.test_accuracy) << " ("
                  << outcome.result.log.epochs.size() << " epochs)\n"
                  << "wrote " << prefix << "_{checkpoint.json,trajectory.csv,summary.json}\n";
    }
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_dir,
             const std::string& split, const std::string& transform, std::uint64_t seed,
             const std::string& out_path) {
    if (split != "train" && split != "test") {
        throw ConfigError("eval: --split must be train or test, got \"" + split + "\"");
    }
    const TrainedModel model = load_model(checkpoint_path);
    ImageDataset ds = load_mnist_split(data_dir, split == "train");
    if (!transform.empty()) {
        const SymmetryGroup group = group_by_name(transform, ds.grid_side);
        ds = augmented_variant(ds, group, AugmentMode::test_random, seed);
    }
    const double accuracy = evaluate(model, ds);
    json doc{{"accuracy", accuracy},
             {"n", ds.count()},
             {"transform", transform.empty() ? "none" : transform}};
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) atomic_write_text(out_path, text);
    return 0;
}

int cmd_compare(const TrainSettings& s) {
    if (s.models.empty() || s.variants.empty() || s.seeds.empty()) {
        throw ConfigError("compare: models, variants, and seeds must all be non-empty");
    }
    const ImageDataset train_plain = load_mnist_split(s.data_dir, true);
    const ImageDataset test_plain = load_mnist_split(s.data_dir, false);

    struct Row {
        std::string model, variant;
        std::uint64_t seed;
        double accuracy;
    };
    std::vector<Row> rows;
    int worst_code = 0;

    for (const std::string& variant : s.variants) {
        VariantRecipe recipe;
        recipe.variant = variant_from_string(variant);
        recipe.seed = s.variant_seed;
        recipe.per_image_train_transform = s.per_image_train_transform;
        const PreparedVariant prep = prepare_variant(train_plain, test_plain, recipe);
        const ImageDataset train_ds = head_subset(prep.train, s.train_limit);
        for (const std::string& model : s.models) {
            TrainSettings run = s;
            run.model = model;
            for (std::uint64_t seed : s.seeds) {
                try {
                    const RunOutcome outcome =
                        run_experiment(run, train_ds, prep.test, seed, "");
                    rows.push_back({model, variant, seed, outcome.test_accuracy});
                    std::cout << model << " on " << variant << " seed " << seed
                              << ": accuracy=" << format_double(outcome.test_accuracy) << "\n";
                } catch (const NumericError& e) {
                    worst_code = std::max(worst_code, 4);
                    std::cerr << "run failed (" << model << ", " << variant << ", seed " << seed
                              << "): " << e.what() << "\n";
                } catch (const IoError& e) {
                    worst_code = std::max(worst_code, 3);
                    std::cerr << "run failed (" << model << ", " << variant << ", seed " << seed
                              << "): " << e.what() << "\n";
                } catch (const ParseError& e) {
                    worst_code = std::max(worst_code, 3);
                    std::cerr << "run failed (" << model << ", " << variant << ", seed " << seed
                              << "): " << e.what() << "\n";
                } catch (const Error& e) {
                    worst_code = std::max(worst_code, 2);
                    std::cerr << "run failed (" << model << ", " << variant << ", seed " << seed
                              << "): " << e.what() << "\n";
                }
            }
        }
    }

    std::string csv = "model,variant,seed,accuracy,accuracy_std\n";
    for (const Row& r : rows) {
        csv += r.model + "," + r.variant + "," + std::to_string(r.seed) + "," +
               format_double(r.accuracy) + ",\n";
    }
    for (const std::string& variant : s.variants) {
        for (const std::string& model : s.models) {
            Vector accs;
            for (const Row& r : rows) {
                if (r.model == model && r.variant == variant) accs.push_back(r.accuracy);
            }
            if (accs.empty()) continue;
            const double mean =
                std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
            double var = 0.0;
            for (double a : accs) var += (a - mean) * (a - mean);
            const double std_dev =
                accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
            csv += model + "," + variant + ",mean," + format_double(mean) + "," +
                   format_double(std_dev) + "\n";
            std::cout << model << " on " << variant << ": mean=" << format_double(mean)
                      << " std=" << format_double(std_dev) << " over " << accs.size()
                      << " seeds\n";
        }
    }
    atomic_write_text(s.out_csv, csv);
    std::cout << "wrote " << s.out_csv << "\n";
    return worst_code;
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Learnable weight-sharing invariances for image classifiers"};
    app.require_subcommand(1);

    // group
    auto* group_cmd = app.add_subcommand("group", "Inspect a symmetry group and its basis");
    std::string group_name = "rot90";
    std::size_t group_n = 28;
    std::string group_out;
    bool group_reynolds = false;
    std::uint64_t unused_seed = 0;
    group_cmd->add_option("--name", group_name, "Group name: rot90, flip, or identity");
    group_cmd->add_option("--n", group_n, "Grid side length");
    group_cmd->add_option("--out", group_out, "Write the JSON here instead of stdout");
    group_cmd->add_flag("--reynolds", group_reynolds, "Include the Reynolds matrix");
    group_cmd->add_option("--seed", unused_seed, "Accepted for interface uniformity (unused)");

    // shared settings seeded from the config file, flags override
    TrainSettings settings;
    const std::string config_path = find_config_arg(args);

    // prepare
    auto* prepare_cmd = app.add_subcommand("prepare", "Materialize a dataset variant as IDX");
    std::string config_opt;  // consumed by the pre-scan; registered so CLI11 accepts it

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one model, one run per seed");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    std::string eval_checkpoint;
    std::string eval_data_dir;
    std::string eval_split = "test";
    std::string eval_transform;
    std::uint64_t eval_seed = 0;
    std::string eval_out;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint JSON path")->required();
    eval_cmd->add_option("--data-dir", eval_data_dir, "Directory holding the MNIST IDX files");
    eval_cmd->add_option("--split", eval_split, "Dataset split: train or test");
    eval_cmd->add_option("--transform", eval_transform,
                         "Apply random elements of this group to every image");
    eval_cmd->add_option("--seed", eval_seed, "Seed for the transform draws");
    eval_cmd->add_option("--out", eval_out, "Also write the result JSON here");

    // compare
    auto* compare_cmd =
        app.add_subcommand("compare", "Train a models x variants x seeds suite, export CSV");

    if (!config_path.empty()) {
        const json config = load_config_json(config_path);
        // train and prepare share the single-run key set; compare has its own.
        const bool for_compare =
            !args.empty() && args.front() == "compare";
        reject_unknown_keys(config, for_compare ? kCompareKeys : kTrainKeys,
                            "config " + config_path);
        settings_from_json(config, settings);
    }

    for (CLI::App* cmd : {prepare_cmd, train_cmd, compare_cmd}) {
        cmd->add_option("--config", config_opt, "JSON config file (flags override its keys)");
    }

    prepare_cmd->add_option("--data-dir", settings.data_dir,
                            "Directory holding the MNIST IDX files");
    prepare_cmd->add_option("--variant", settings.variant,
                            "plain, permuted, rotated, or flipped");
    prepare_cmd->add_option("--seed", settings.variant_seed, "Transform seed");
    prepare_cmd->add_flag("--per-image-train-transform", settings.per_image_train_transform,
                          "Transform each training image independently");
    prepare_cmd->add_option("--out-dir", settings.out_dir, "Output root directory");

    add_hyper_options(*train_cmd, settings);
    train_cmd->add_option("--model", settings.model,
                          "invariantnet, rotnet, flipnet, or mlp");
    train_cmd->add_option("--variant", settings.variant,
                          "plain, permuted, rotated, or flipped");
    train_cmd->add_option("--seeds", settings.seeds, "Run seeds")->delimiter(',');
    train_cmd->add_option("--seed", settings.seeds,
                          "Single run seed (same as --seeds with one value)");
    train_cmd->add_option("--out-dir", settings.out_dir, "Output directory");

    add_hyper_options(*compare_cmd, settings);
    compare_cmd->add_option("--models", settings.models, "Models to train")->delimiter(',');
    compare_cmd->add_option("--variants", settings.variants, "Dataset variants")->delimiter(',');
    compare_cmd->add_option("--seeds", settings.seeds, "Run seeds")->delimiter(',');
    compare_cmd->add_option("--seed", settings.seeds,
                            "Single run seed (same as --seeds with one value)");
    compare_cmd->add_option("--out", settings.out_csv, "Aggregate CSV path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints usage, returns 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the parse error
        return 2;
    }

    if (settings.data_dir.empty()) settings.data_dir = env_data_dir();
    if (eval_data_dir.empty()) eval_data_dir = env_data_dir();

    if (group_cmd->parsed()) return cmd_group(group_name, group_n, group_out, group_reynolds);
    if (prepare_cmd->parsed()) return cmd_prepare(settings);
    if (train_cmd->parsed()) return cmd_train(settings);
    if (eval_cmd->parsed()) {
        return cmd_eval(eval_checkpoint, eval_data_dir, eval_split, eval_transform, eval_seed,
                        eval_out);
    }
    if (compare_cmd->parsed()) return cmd_compare(settings);
    throw ConfigError("no subcommand given");
}

}  // namespace

int run(const std::vector<std::string>& args) {
    try {
        return dispatch(args);
    } catch (const NumericError& e) {
        std::cerr << "symlearn: numeric failure: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "symlearn: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "symlearn: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "symlearn: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "symlearn: unexpected error: " << e.what() << "\n";
        return 4;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace symlearn::cli
