#include "symlearn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "symlearn/errors.hpp"
#include "symlearn/rng.hpp"

namespace symlearn {

std::string to_string(DatasetVariant variant) {
    switch (variant) {
        case DatasetVariant::plain: return "plain";
        case DatasetVariant::permuted: return "permuted";
        case DatasetVariant::rotated: return "rotated";
        case DatasetVariant::flipped: return "flipped";
    }
    throw DomainError("unknown dataset variant value");
}

DatasetVariant variant_from_string(const std::string& name) {
    if (name == "plain") return DatasetVariant::plain;
    if (name == "permuted") return DatasetVariant::permuted;
    if (name == "rotated") return DatasetVariant::rotated;
    if (name == "flipped") return DatasetVariant::flipped;
    throw ConfigError("unknown dataset variant \"" + name +
                      "\"; expected plain, permuted, rotated, or flipped");
}

void validate_dataset(const ImageDataset& ds) {
    if (ds.grid_side == 0) throw DataError("dataset has grid side 0");
    if (ds.dim() != ds.grid_side * ds.grid_side) {
        throw DataError("dataset images have " + std::to_string(ds.dim()) +
                        " pixels but the grid side is " + std::to_string(ds.grid_side));
    }
    if (ds.labels.size() != ds.count()) {
        throw DataError("dataset has " + std::to_string(ds.count()) + " images but " +
                        std::to_string(ds.labels.size()) + " labels");
    }
    if (ds.class_count <= 0) throw DataError("dataset class_count must be positive");
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        if (ds.labels[i] < 0 || ds.labels[i] >= ds.class_count) {
            throw DataError("label " + std::to_string(ds.labels[i]) + " at index " +
                            std::to_string(i) + " is outside [0, " +
                            std::to_string(ds.class_count) + ")");
        }
    }
    const double* p = ds.images.data();
    for (std::size_t i = 0, n = ds.images.size(); i < n; ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
            throw DataError("pixel value " + std::to_string(p[i]) + " at flat index " +
                            std::to_string(i) + " is outside [0, 1]");
        }
    }
}

Permutation random_permutation(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw DomainError("random_permutation: dim must be positive");
    std::vector<std::size_t> image(dim);
    std::iota(image.begin(), image.end(), std::size_t{0});
    RngState rng(seed);
    for (std::size_t i = dim - 1; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(image[i], image[j]);
    }
    return Permutation(std::move(image));
}

ImageDataset permuted_variant_with(const ImageDataset& ds, const Permutation& perm) {
    validate_dataset(ds);
    if (perm.dim() != ds.dim()) {
        throw ShapeError("permuted_variant: permutation acts on " + std::to_string(perm.dim()) +
                         " pixels but images have " + std::to_string(ds.dim()));
    }
    ImageDataset out = ds;
    for (std::size_t r = 0; r < ds.count(); ++r) {
        perm.apply(ds.images.row(r), out.images.row(r));
    }
    out.variant = DatasetVariant::permuted;
    return out;
}

ImageDataset permuted_variant(const ImageDataset& ds, std::uint64_t seed) {
    ImageDataset out = permuted_variant_with(ds, random_permutation(ds.dim(), seed));
    out.transform_seed = seed;
    return out;
}

ImageDataset augmented_variant(const ImageDataset& ds, const SymmetryGroup& group,
                               AugmentMode mode, std::uint64_t seed) {
    validate_dataset(ds);
    if (group.dim != ds.dim()) {
        throw ShapeError("augmented_variant: group acts on dim " + std::to_string(group.dim) +
                         " but images have " + std::to_string(ds.dim()) + " pixels");
    }
    if (group.elements.empty()) throw DomainError("augmented_variant: empty group");
    ImageDataset out = ds;
    RngState rng(seed);
    if (mode == AugmentMode::train_fixed) {
        // One element per class, drawn in ascending class order.
        std::vector<std::size_t> pick(static_cast<std::size_t>(ds.class_count));
        for (auto& idx : pick) idx = rng.next_below(group.elements.size());
        for (std::size_t r = 0; r < ds.count(); ++r) {
            const Permutation& e = group.elements[pick[static_cast<std::size_t>(ds.labels[r])]];
            e.apply(ds.images.row(r), out.images.row(r));
        }
    } else {
        for (std::size_t r = 0; r < ds.count(); ++r) {
            const Permutation& e = group.elements[rng.next_below(group.elements.size())];
            e.apply(ds.images.row(r), out.images.row(r));
        }
    }
    out.transform_seed = seed;
    return out;
}

std::vector<int> drop_classes_remap(int class_count, std::vector<int> classes) {
    if (class_count <= 0) throw DomainError("drop_classes: class_count must be positive");
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (int c : classes) {
        if (c < 0 || c >= class_count) {
            throw DomainError("drop_classes: class " + std::to_string(c) + " is outside [0, " +
                              std::to_string(class_count) + ")");
        }
    }
    std::vector<int> remap(static_cast<std::size_t>(class_count), -1);
    int next = 0;
    for (int c = 0; c < class_count; ++c) {
        if (!std::binary_search(classes.begin(), classes.end(), c)) {
            remap[static_cast<std::size_t>(c)] = next++;
        }
    }
    if (next == 0) throw DomainError("drop_classes: dropping every class");
    return remap;
}

ImageDataset drop_classes(const ImageDataset& ds, std::vector<int> classes) {
    validate_dataset(ds);
    const std::vector<int> remap = drop_classes_remap(ds.class_count, std::move(classes));
    std::vector<std::size_t> keep;
    keep.reserve(ds.count());
    for (std::size_t r = 0; r < ds.count(); ++r) {
        if (remap[static_cast<std::size_t>(ds.labels[r])] >= 0) keep.push_back(r);
    }
    if (keep.empty()) throw DataError("drop_classes: no images left");
    ImageDataset out;
    out.images = gather_rows(ds.images, keep);
    out.labels.reserve(keep.size());
    for (std::size_t r : keep) out.labels.push_back(remap[static_cast<std::size_t>(ds.labels[r])]);
    out.grid_side = ds.grid_side;
    out.class_count = *std::max_element(remap.begin(), remap.end()) + 1;
    out.variant = ds.variant;
    out.transform_seed = ds.transform_seed;
    return out;
}

SplitSpec split(const ImageDataset& ds, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw DomainError("split: val_fraction " + std::to_string(val_fraction) +
                          " must lie strictly between 0 and 1");
    }
    const std::size_t n = ds.count();
    const auto val_count = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * val_fraction));
    if (val_count == 0 || val_count >= n) {
        throw DomainError("split: " + std::to_string(n) + " examples at fraction " +
                          std::to_string(val_fraction) + " leaves an empty side");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngState rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(order[i], order[j]);
    }
    SplitSpec spec;
    spec.seed = seed;
    spec.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(val_count));
    spec.train.assign(order.begin() + static_cast<std::ptrdiff_t>(val_count), order.end());
    std::sort(spec.val.begin(), spec.val.end());
    std::sort(spec.train.begin(), spec.train.end());
    return spec;
}

ImageDataset subset(const ImageDataset& ds, std::span<const std::size_t> indices) {
    ImageDataset out;
    out.images = gather_rows(ds.images, indices);
    out.labels.reserve(indices.size());
    for (std::size_t r : indices) {
        if (r >= ds.count()) {
            throw DomainError("subset: index " + std::to_string(r) + " out of range for " +
                              std::to_string(ds.count()) + " images");
        }
        out.labels.push_back(ds.labels[r]);
    }
    out.grid_side = ds.grid_side;
    out.class_count = ds.class_count;
    out.variant = ds.variant;
    out.transform_seed = ds.transform_seed;
    return out;
}

PreparedVariant prepare_variant(const ImageDataset& train_plain, const ImageDataset& test_plain,
                                const VariantRecipe& recipe) {
    validate_dataset(train_plain);
    validate_dataset(test_plain);
    if (train_plain.dim() != test_plain.dim()) {
        throw DataError("prepare_variant: train and test image sizes differ");
    }
    PreparedVariant out;
    switch (recipe.variant) {
        case DatasetVariant::plain:
            out.train = train_plain;
            out.test = test_plain;
            break;
        case DatasetVariant::permuted: {
            const Permutation perm = random_permutation(train_plain.dim(), recipe.seed);
            out.train = permuted_variant_with(train_plain, perm);
            out.test = permuted_variant_with(test_plain, perm);
            out.train.transform_seed = recipe.seed;
            out.test.transform_seed = recipe.seed;
            break;
        }
        case DatasetVariant::rotated:
        case DatasetVariant::flipped: {
            ImageDataset train = train_plain;
            ImageDataset test = test_plain;
            if (recipe.variant == DatasetVariant::rotated) {
                // 6 and 9 swap identities under 180-degree rotation.
                out.dropped_classes = {6, 9};
                out.label_remap = drop_classes_remap(train.class_count, out.dropped_classes);
                train = drop_classes(train, out.dropped_classes);
                test = drop_classes(test, out.dropped_classes);
            }
            const SymmetryGroup group = recipe.variant == DatasetVariant::rotated
                                            ? rotation_group(train.grid_side)
                                            : flip_group(train.grid_side);
            const AugmentMode train_mode = recipe.per_image_train_transform
                                               ? AugmentMode::train_fixed_per_image
                                               : AugmentMode::train_fixed;
            const std::uint64_t test_seed = RngState(recipe.seed).fork(1).seed();
            out.train = augmented_variant(train, group, train_mode, recipe.seed);
            out.test = augmented_variant(test, group, AugmentMode::test_random, test_seed);
            out.train.variant = recipe.variant;
            out.test.variant = recipe.variant;
            break;
        }
    }
    return out;
}

}  // namespace symlearn
