#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symlearn/group.hpp"
#include "symlearn/matrix.hpp"
#include "symlearn/permutation.hpp"

namespace symlearn {

enum class DatasetVariant { plain, permuted, rotated, flipped };

std::string to_string(DatasetVariant variant);
DatasetVariant variant_from_string(const std::string& name);

/// Grayscale images on a square grid, one flattened row-major image per
/// matrix row, pixel values in [0, 1].
struct ImageDataset {
    Matrix images;  // count x (grid_side^2)
    std::vector<int> labels;
    std::size_t grid_side = 0;
    int class_count = 0;
    DatasetVariant variant = DatasetVariant::plain;
    std::uint64_t transform_seed = 0;

    std::size_t count() const { return images.rows(); }
    std::size_t dim() const { return images.cols(); }
};

/// Throws DataError if counts/shapes/labels are inconsistent.
void validate_dataset(const ImageDataset& ds);

/// Read an IDX image/label file pair (gzip-compressed input is handled
/// transparently). Pixels are scaled to [0, 1]; class_count is
/// max(label) + 1. ParseError messages name the byte offset at fault.
ImageDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Write a dataset as an IDX pair; a ".gz" suffix selects gzip output.
/// Pixels are quantized back to bytes.
void save_idx(const ImageDataset& ds, const std::string& images_path,
              const std::string& labels_path);

/// Seeded uniformly random permutation of {0, ..., dim-1}.
Permutation random_permutation(std::size_t dim, std::uint64_t seed);

/// Every image's pixels rearranged by one shared permutation drawn from
/// `seed`; labels untouched.
ImageDataset permuted_variant(const ImageDataset& ds, std::uint64_t seed);
ImageDataset permuted_variant_with(const ImageDataset& ds, const Permutation& perm);

/// How group elements are assigned when augmenting a dataset.
enum class AugmentMode {
    train_fixed,            // one element per class, shared by all its images
    train_fixed_per_image,  // an independent element per image
    test_random             // an independent element per image (test-time protocol)
};

/// Apply group elements to images according to `mode`, seeded draws.
ImageDataset augmented_variant(const ImageDataset& ds, const SymmetryGroup& group,
                               AugmentMode mode, std::uint64_t seed);

/// Remove all images of the given classes and relabel the remaining classes
/// contiguously (ascending order preserved).
ImageDataset drop_classes(const ImageDataset& ds, std::vector<int> classes);

/// Old label -> new label, -1 for dropped classes.
std::vector<int> drop_classes_remap(int class_count, std::vector<int> classes);

struct SplitSpec {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::uint64_t seed = 0;
};

/// Disjoint, exhaustive, seeded train/validation index split.
/// Throws DomainError when either side would be empty.
SplitSpec split(const ImageDataset& ds, double val_fraction, std::uint64_t seed);

ImageDataset subset(const ImageDataset& ds, std::span<const std::size_t> indices);

/// Recipe for building an evaluation variant out of plain train/test data.
struct VariantRecipe {
    DatasetVariant variant = DatasetVariant::plain;
    std::uint64_t seed = 0;
    /// For group variants: transform each training image independently
    /// instead of one element per class.
    bool per_image_train_transform = false;
};

struct PreparedVariant {
    ImageDataset train;
    ImageDataset test;
    std::vector<int> dropped_classes;
    std::vector<int> label_remap;  // old -> new, -1 dropped; empty when untouched
};

/// Build a benchmark variant:
///  - plain: pass-through;
///  - permuted: one shared pixel permutation on train and test;
///  - rotated: drop classes 6 and 9 (ambiguous under rotation), then rotate
///    train deterministically per class and test uniformly per image;
///  - flipped: like rotated with the horizontal/vertical flip group and no
///    dropped classes.
PreparedVariant prepare_variant(const ImageDataset& train_plain, const ImageDataset& test_plain,
                                const VariantRecipe& recipe);

}  // namespace symlearn
