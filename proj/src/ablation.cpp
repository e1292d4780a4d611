#include "vgkit/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include <json.hpp>

#include "vgkit/evaluation.hpp"
#include "vgkit/trainer.hpp"

namespace vgkit {

using nlohmann::ordered_json;

double CellResult::mean() const {
  if (accuracy.empty()) return 0.0;
  double s = 0.0;
  for (double a : accuracy) s += a;
  return s / static_cast<double>(accuracy.size());
}

double CellResult::min() const { return accuracy.empty() ? 0.0 : *std::min_element(accuracy.begin(), accuracy.end()); }
double CellResult::max() const { return accuracy.empty() ? 0.0 : *std::max_element(accuracy.begin(), accuracy.end()); }

const CellResult* AblationReport::find(const std::string& cell_name) const {
  for (const auto& c : cells)
    if (c.cell.name() == cell_name) return &c;
  return nullptr;
}

const PresetResult* AblationReport::find_preset(const std::string& preset) const {
  for (const auto& p : presets)
    if (p.preset == preset) return &p;
  return nullptr;
}

namespace {

const CellResult* lookup(const std::vector<CellResult>& cells, const std::string& name) {
  for (const auto& c : cells)
    if (c.cell.name() == name) return &c;
  return nullptr;
}

std::string fmt4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// Strictly increasing means along `chain`. Missing cells drop the verdict.
std::optional<Verdict> chain_verdict(const std::vector<CellResult>& cells, const std::string& name,
                                     const std::vector<std::string>& chain) {
  std::vector<const CellResult*> found;
  for (const auto& n : chain) {
    const CellResult* c = lookup(cells, n);
    if (!c) return std::nullopt;
    found.push_back(c);
  }
  Verdict v{name, true, ""};
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i) v.detail += " < ";
    v.detail += chain[i] + " " + (found[i]->failed ? std::string("failed") : fmt4(found[i]->mean()));
    if (found[i]->failed) v.passed = false;
    if (i && !found[i - 1]->failed && !found[i]->failed && !(found[i - 1]->mean() < found[i]->mean())) {
      v.passed = false;
    }
  }
  return v;
}

}  // namespace

std::vector<Verdict> compute_verdicts(const std::vector<CellResult>& cells) {
  std::vector<Verdict> out;
  if (auto v = chain_verdict(cells, "kld_beats_softmax", {"high/softmax", "high/kld"})) out.push_back(*v);
  auto soft = chain_verdict(cells, "regression_helps", {"high/softmax", "high/softmax+reg"});
  auto kld = chain_verdict(cells, "regression_helps", {"high/kld", "high/kld+reg"});
  if (soft && kld) {
    out.push_back({"regression_helps", soft->passed && kld->passed, soft->detail + "; " + kld->detail});
  }
  if (auto v = chain_verdict(cells, "quality_monotone", {"low/kld+reg", "mid/kld+reg", "high/kld+reg"})) {
    out.push_back(*v);
  }
  return out;
}

AblationReport run_ablation(const RunConfig& config, std::ostream* progress) {
  config.validate();
  AblationReport report;
  report.config_fingerprint = config_fingerprint(config);

  auto cells = config.ablate_cells;
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.name() < b.name(); });
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::set<std::string> presets;
  for (const auto& c : cells) presets.insert(c.preset);

  for (const auto& preset : presets) {
    DataConfig data = config.data;
    // Explicit quality overrides apply to the configured preset only.
    if (preset != config.data.preset) {
      data.preset = preset;
      data.quality = quality_preset(parse_quality_preset(preset));
    }
    if (progress) *progress << "generating " << preset << " data\n" << std::flush;
    const auto train_records = generate_split(data, Split::train);
    const auto val_records = generate_split(data, Split::val);
    const auto test_records = generate_split(data, Split::test);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : train_records) corpus.push_back(r.query);
    const Vocabulary vocab = build_vocab(corpus);
    const auto train_set = to_samples(train_records, vocab);
    const auto val_set = to_samples(val_records, vocab);
    const auto test_set = to_samples(test_records, vocab);
    report.presets.push_back({preset, data.fingerprint(), proposal_stats(eval_samples(test_set))});

    for (const auto& cell : cells) {
      if (cell.preset != preset) continue;
      CellResult result;
      result.cell = cell;
      for (std::size_t k = 0; k < config.ablate_seeds && !result.failed; ++k) {
        TrainConfig tc = config.train;
        tc.seed = config.train.seed + k;
        tc.loss.variant = cell.variant;
        tc.loss.regression = cell.regression;
        tc.dims.vocab_size = vocab.size();
        tc.dims.feature_dim = data.feature_dim;
        try {
          const TrainResult trained = train(tc, train_set, val_set);
          const double acc = evaluate(trained.best_model, cell.regression, test_set).report.accuracy;
          result.seeds.push_back(tc.seed);
          result.accuracy.push_back(acc);
          if (progress) *progress << cell.name() << " seed " << tc.seed << " accuracy " << fmt4(acc) << "\n" << std::flush;
        } catch (const std::exception& e) {
          result.failed = true;
          result.error = e.what();
          if (progress) *progress << cell.name() << " seed " << tc.seed << " failed: " << e.what() << "\n" << std::flush;
        }
      }
      report.cells.push_back(std::move(result));
    }
  }
  std::sort(report.cells.begin(), report.cells.end(),
            [](const auto& a, const auto& b) { return a.cell.name() < b.cell.name(); });
  if (report.cells.size() > 1) report.verdicts = compute_verdicts(report.cells);
  return report;
}

std::string ablation_table(const AblationReport& report) {
  std::string out;
  char buf[256];
  out += "preset  S_DIS   S_DIV\n";
  for (const auto& p : report.presets) {
    const std::string div = p.test_stats.diversity.value ? fmt4(*p.test_stats.diversity.value) : "null";
    std::snprintf(buf, sizeof(buf), "%-7s %.4f  %s\n", p.preset.c_str(), p.test_stats.discrimination, div.c_str());
    out += buf;
  }
  out += "\ncell                 seeds  mean    min     max\n";
  for (const auto& c : report.cells) {
    if (c.failed) {
      std::snprintf(buf, sizeof(buf), "%-20s failed: %s\n", c.cell.name().c_str(), c.error.c_str());
    } else {
      std::snprintf(buf, sizeof(buf), "%-20s %-6zu %.4f  %.4f  %.4f\n", c.cell.name().c_str(), c.accuracy.size(),
                    c.mean(), c.min(), c.max());
    }
    out += buf;
  }
  if (!report.verdicts.empty()) out += "\n";
  for (const auto& v : report.verdicts) {
    out += (v.passed ? "PASS " : "FAIL ") + v.name + ": " + v.detail + "\n";
  }
  return out;
}

std::string ablation_jsonl(const AblationReport& report) {
  std::string out;
  out += ordered_json{{"type", "config"}, {"fingerprint", report.config_fingerprint}}.dump() + "\n";
  for (const auto& p : report.presets) {
    ordered_json j{{"type", "preset"},
                   {"preset", p.preset},
                   {"data_fingerprint", p.data_fingerprint},
                   {"s_dis", p.test_stats.discrimination}};
    if (p.test_stats.diversity.value) {
      j["s_div"] = *p.test_stats.diversity.value;
    } else {
      j["s_div"] = nullptr;
      j["s_div_reason"] = p.test_stats.diversity.reason;
    }
    out += j.dump() + "\n";
  }
  for (const auto& c : report.cells) {
    ordered_json j{{"type", "cell"},
                   {"name", c.cell.name()},
                   {"preset", c.cell.preset},
                   {"variant", std::string(to_string(c.cell.variant))},
                   {"regression", c.cell.regression},
                   {"seeds", c.seeds},
                   {"accuracy", c.accuracy},
                   {"failed", c.failed}};
    if (c.failed) {
      j["error"] = c.error;
    } else {
      j["mean"] = c.mean();
      j["min"] = c.min();
      j["max"] = c.max();
    }
    out += j.dump() + "\n";
  }
  for (const auto& v : report.verdicts) {
    out += ordered_json{{"type", "verdict"}, {"name", v.name}, {"passed", v.passed}, {"detail", v.detail}}.dump() + "\n";
  }
  return out;
}

}  // namespace vgkit
