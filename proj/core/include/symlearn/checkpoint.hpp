#pragma once

#include <cstdint>
#include <string>

#include "symlearn/model.hpp"

namespace symlearn {

/// Stable 64-bit hash of a model spec (FNV-1a over its canonical JSON form),
/// stored in checkpoints to catch mismatched or tampered files.
std::uint64_t spec_hash(const ModelSpec& spec);

/// Write the model (spec + parameters + final scheme probabilities) as JSON.
/// The write is atomic: readers never see a partial file.
void save_model(const TrainedModel& model, const std::string& path);

/// Rebuild a model from a checkpoint. Throws ParseError on malformed JSON,
/// an unsupported format version, a spec-hash mismatch, or parameter arrays
/// whose sizes do not match the spec.
TrainedModel load_model(const std::string& path);

}  // namespace symlearn
