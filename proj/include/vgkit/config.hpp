#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgkit/synthetic.hpp"
#include "vgkit/trainer.hpp"

namespace vgkit {

// Bad syntax, an unknown key or an out-of-range value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raw `key = value` entries. '#' starts a comment; keys are dotted
// lowercase identifiers and may appear once per file.
class ConfigMap {
 public:
  static ConfigMap parse(std::istream& in, const std::string& source = "config");
  static ConfigMap parse_string(const std::string& text, const std::string& source = "config");
  static ConfigMap load(const std::filesystem::path& path);

  // Later values win; used for command-line overrides.
  void set(const std::string& key, const std::string& value);
  // Parses "key=value".
  void set_assignment(const std::string& assignment);

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct AblationCell {
  std::string preset;
  RankingVariant variant = RankingVariant::kld;
  bool regression = true;

  // e.g. "high/kld+reg"
  std::string name() const;
  friend bool operator==(const AblationCell&, const AblationCell&) = default;
};

AblationCell parse_ablation_cell(const std::string& text);
// The four loss variants on HIGH plus kld+reg on LOW and MID.
std::vector<AblationCell> default_ablation_cells();

struct RunConfig {
  DataConfig data;
  TrainConfig train;
  std::filesystem::path data_dir;  // dataset directory for train/eval
  std::size_t ablate_seeds = 3;
  std::vector<AblationCell> ablate_cells = default_ablation_cells();

  void validate() const;
};

// Every key resolve() accepts.
const std::vector<std::string>& known_config_keys();

// Starts from the built-in defaults. data.preset is applied before any
// data.quality.* key regardless of order. Throws ConfigError.
RunConfig resolve(const ConfigMap& map);

// Canonical text form of a resolved config; resolve(parse(to_config_text(c)))
// reproduces c.
std::string to_config_text(const RunConfig& config);
// FNV-1a over the canonical text.
std::string config_fingerprint(const RunConfig& config);

}  // namespace vgkit
