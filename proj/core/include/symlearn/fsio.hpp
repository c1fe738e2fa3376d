#pragma once

#include <string>

namespace symlearn {

/// Whole file as a string; throws IoError on failure.
std::string read_text_file(const std::string& path);

/// Write via a temp file in the same directory plus rename, so readers never
/// observe a half-written file. Throws IoError on failure.
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace symlearn
