#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgkit/config.hpp"
#include "vgkit/metrics.hpp"

namespace vgkit {

struct CellResult {
  AblationCell cell;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracy;  // test accuracy per seed
  bool failed = false;
  std::string error;

  double mean() const;
  double min() const;
  double max() const;
};

struct PresetResult {
  std::string preset;
  std::string data_fingerprint;
  ProposalStats test_stats;
};

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AblationReport {
  std::string config_fingerprint;
  std::vector<PresetResult> presets;  // sorted by name
  std::vector<CellResult> cells;      // sorted by cell name
  std::vector<Verdict> verdicts;

  const CellResult* find(const std::string& cell_name) const;
  const PresetResult* find_preset(const std::string& preset) const;
};

// Verdicts whose cells are all present: (a) kld beats softmax on HIGH
// without regression, (b) regression helps both variants on HIGH, (c) kld+reg
// improves across low, mid, high. A verdict touching a failed cell fails.
std::vector<Verdict> compute_verdicts(const std::vector<CellResult>& cells);

// Trains every cell for seeds train.seed .. train.seed + ablate_seeds - 1.
// Datasets are generated per preset from config.data with the preset's
// quality knobs. A cell whose training throws is marked failed and the run
// continues. Progress lines go to `progress` when given.
AblationReport run_ablation(const RunConfig& config, std::ostream* progress = nullptr);

std::string ablation_table(const AblationReport& report);
// One JSON object per line: config, presets, cells, verdicts.
std::string ablation_jsonl(const AblationReport& report);

}  // namespace vgkit
