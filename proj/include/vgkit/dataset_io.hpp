#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vgkit/synthetic.hpp"

namespace vgkit {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr const char* kDatasetSchema = "vgkit-dataset";

struct DatasetHeader {
  int version = kDatasetSchemaVersion;
  std::uint64_t seed = 0;
  std::string split;
  std::string preset;
  std::string fingerprint;
  std::size_t feature_dim = 0;
  std::size_t num_proposals = 0;
  std::size_t count = 0;

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<DatasetRecord> records;
};

// Line-delimited JSON: one header object, then one record per line. Doubles
// are written in shortest round-trip form, so read(write(x)) == x bit for bit.
void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

// Throws std::runtime_error naming the 1-based line of the first malformed
// entry, or on a schema/version mismatch.
Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);

DatasetHeader make_header(const DataConfig& config, Split split, std::size_t count);

}  // namespace vgkit
