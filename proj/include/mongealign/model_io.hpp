#pragma once

// Persistence for signals and alignment models.
//
// Signal files (binary, little-endian):
//   "MAS1" | u32 n_channels | u64 n_samples | f64 sample rate (NaN if absent)
//   | n_channels * n_samples f64, channel after channel
// A path ending in ".csv" is read and written as text instead: one line per
// channel, comma separated, shortest round-trip decimal, no header.
//
// Model files are JSON with a fixed key order; see README.md.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "mongealign/align.hpp"

namespace mongealign {

/// Throws NonFinite, IoError.
void write_signal(const std::filesystem::path& path, const Signal& sig);
/// Throws BadMagic, TruncatedFile, NonFinite, SchemaError (trailing bytes or
/// malformed CSV), IoError.
Signal read_signal(const std::filesystem::path& path);

std::string encode_signal(const Signal& sig);
Signal decode_signal(std::span<const std::uint8_t> bytes);

std::string model_to_json(const AlignmentModel& model);
/// Throws VersionUnsupported, SchemaError.
AlignmentModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const AlignmentModel& model);
AlignmentModel load_model(const std::filesystem::path& path);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
/// fnv1a64 of a whole file. Throws IoError.
std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace mongealign
