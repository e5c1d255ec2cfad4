#pragma once

#include "epsrb/family.hpp"
#include "epsrb/greedy.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace epsrb {

/// Reduced-basis archive.
///
/// Layout: the magic line "EPSRB-BASIS/1", one line of JSON metadata, then a
/// binary payload of 64-bit IEEE-754 little-endian floats in row-major
/// order: the m snapshots (m x dim) followed by the orthonormalized basis
/// (m x dim). The JSON carries the Gram-matrix hashes of X and Y, the family
/// fingerprint, selected pairs, the greedy history, the payload layout and a
/// free-form "training" object supplied by the caller.
void save_basis(const std::filesystem::path& path, const ReducedBasis& basis,
                const ProblemFamily& family, std::string_view training_json = "{}");

struct LoadedBasis {
  ReducedBasis basis;
  std::string training_json;
};

/// Reads an archive and verifies its hashes against `family`; throws
/// HashMismatch when the family differs from the one used for training, and
/// Io / ConfigParse for unreadable or malformed files.
LoadedBasis load_basis(const std::filesystem::path& path, const ProblemFamily& family);

}  // namespace epsrb
