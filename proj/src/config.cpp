#include "vgkit/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace vgkit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.')) return false;
  }
  return true;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("config key '" + key + "': '" + value + "' is not " + expected);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  if (v.empty()) bad_value(key, v, "a number");
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }

struct KeySpec {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define VG_SIZE(KEY, FIELD)                                                                          \
  KeySpec {                                                                                          \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_size(k, v); }, \
        [](const RunConfig& c) { return fmt(static_cast<std::uint64_t>(c.FIELD)); }                  \
  }
#define VG_DOUBLE(KEY, FIELD)                                                                          \
  KeySpec {                                                                                            \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_double(k, v); }, \
        [](const RunConfig& c) { return fmt(c.FIELD); }                                                \
  }
#define VG_BOOL(KEY, FIELD)                                                                          \
  KeySpec {                                                                                          \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_bool(k, v); }, \
        [](const RunConfig& c) { return fmt(c.FIELD); }                                              \
  }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"data.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.seed = to_u64(k, v); },
       [](const RunConfig& c) { return fmt(c.data.seed); }},
      {"data.preset",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.data.quality = quality_preset(parse_quality_preset(v));
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "one of low, mid, high, perfect");
         }
         c.data.preset = v;
       },
       [](const RunConfig& c) { return c.data.preset; }},
      VG_SIZE("data.num_proposals", data.num_proposals),
      VG_SIZE("data.feature_dim", data.feature_dim),
      VG_SIZE("data.train_size", data.train_size),
      VG_SIZE("data.val_size", data.val_size),
      VG_SIZE("data.test_size", data.test_size),
      VG_DOUBLE("data.quality.miss_prob", data.quality.miss_prob),
      VG_DOUBLE("data.quality.jitter", data.quality.jitter),
      VG_DOUBLE("data.quality.distractor_fraction", data.quality.distractor_fraction),
      VG_DOUBLE("data.quality.feature_noise", data.quality.feature_noise),
      VG_SIZE("data.quality.redundancy", data.quality.redundancy),
      VG_DOUBLE("data.quality.scale_bias", data.quality.scale_bias),
      {"scene.width",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.data.scene.image.width = to_int(k, v); },
       [](const RunConfig& c) { return std::to_string(c.data.scene.image.width); }},
      {"scene.height",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.data.scene.image.height = to_int(k, v); },
       [](const RunConfig& c) { return std::to_string(c.data.scene.image.height); }},
      VG_SIZE("scene.min_objects", data.scene.min_objects),
      VG_SIZE("scene.max_objects", data.scene.max_objects),
      VG_SIZE("scene.num_classes", data.scene.num_classes),
      VG_SIZE("scene.num_colors", data.scene.num_colors),
      VG_DOUBLE("scene.min_size", data.scene.min_size),
      VG_DOUBLE("scene.max_size", data.scene.max_size),
      VG_DOUBLE("scene.max_pair_iou", data.scene.max_pair_iou),
      VG_DOUBLE("scene.relation_margin", data.scene.relation_margin),
      VG_SIZE("model.embed_dim", train.dims.embed_dim),
      VG_SIZE("model.query_dim", train.dims.query_dim),
      VG_SIZE("model.fused_dim", train.dims.fused_dim),
      {"train.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = to_u64(k, v); },
       [](const RunConfig& c) { return fmt(c.train.seed); }},
      VG_SIZE("train.iterations", train.iterations),
      VG_SIZE("train.batch_size", train.batch_size),
      VG_DOUBLE("train.lr", train.learning_rate),
      VG_DOUBLE("train.lr_decay", train.lr_decay),
      VG_DOUBLE("train.decay_at", train.decay_fraction),
      VG_DOUBLE("train.beta1", train.beta1),
      VG_DOUBLE("train.beta2", train.beta2),
      VG_DOUBLE("train.epsilon", train.epsilon),
      VG_SIZE("train.eval_every", train.eval_every),
      VG_DOUBLE("loss.eta", train.loss.eta),
      VG_DOUBLE("loss.gamma", train.loss.gamma),
      {"loss.variant",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.train.loss.variant = parse_ranking_variant(v);
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "kld or softmax_single_label");
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.train.loss.variant)); }},
      VG_BOOL("loss.regression", train.loss.regression),
      VG_BOOL("loss.reg_mask_by_iou", train.loss.reg_mask_by_iou),
      {"paths.data", [](RunConfig& c, const std::string&, const std::string& v) { c.data_dir = v; },
       [](const RunConfig& c) { return c.data_dir.string(); }},
      VG_SIZE("ablate.seeds", ablate_seeds),
      {"ablate.cells",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.ablate_cells.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.ablate_cells.push_back(parse_ablation_cell(item));
         }
       },
       [](const RunConfig& c) {
         std::string out;
         for (const auto& cell : c.ablate_cells) out += (out.empty() ? "" : ",") + cell.name();
         return out;
       }},
  };
  return specs;
}

#undef VG_SIZE
#undef VG_DOUBLE
#undef VG_BOOL

}  // namespace

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source) {
  ConfigMap map;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto where = source + " line " + std::to_string(line) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + "bad key '" + key + "'");
    if (map.contains(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    map.entries_[key] = value;
  }
  return map;
}

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse(in, path.string());
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("bad key '" + key + "'");
  entries_[key] = value;
}

void ConfigMap::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string AblationCell::name() const {
  std::string v = variant == RankingVariant::kld ? "kld" : "softmax";
  return preset + "/" + v + (regression ? "+reg" : "");
}

AblationCell parse_ablation_cell(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw ConfigError("ablation cell '" + text + "' is not preset/variant");
  AblationCell cell;
  cell.preset = text.substr(0, slash);
  try {
    parse_quality_preset(cell.preset);
  } catch (const std::invalid_argument&) {
    throw ConfigError("ablation cell '" + text + "': unknown preset");
  }
  std::string variant = text.substr(slash + 1);
  const std::string suffix = "+reg";
  cell.regression = variant.size() > suffix.size() && variant.compare(variant.size() - suffix.size(), suffix.size(), suffix) == 0;
  if (cell.regression) variant.resize(variant.size() - suffix.size());
  try {
    cell.variant = parse_ranking_variant(variant);
  } catch (const std::invalid_argument&) {
    throw ConfigError("ablation cell '" + text + "': unknown loss variant");
  }
  return cell;
}

std::vector<AblationCell> default_ablation_cells() {
  return {{"high", RankingVariant::softmax_single_label, false},
          {"high", RankingVariant::softmax_single_label, true},
          {"high", RankingVariant::kld, false},
          {"high", RankingVariant::kld, true},
          {"low", RankingVariant::kld, true},
          {"mid", RankingVariant::kld, true}};
}

void RunConfig::validate() const {
  data.validate();
  train.validate();
  if (train.dims.feature_dim != data.feature_dim) {
    throw ConfigError("model feature dimension differs from data.feature_dim");
  }
  if (ablate_seeds == 0) throw ConfigError("ablate.seeds must be positive");
  if (ablate_cells.empty()) throw ConfigError("ablate.cells is empty");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& s : key_specs()) out.push_back(s.key);
    return out;
  }();
  return keys;
}

RunConfig resolve(const ConfigMap& map) {
  for (const auto& [key, value] : map.entries()) {
    bool known = false;
    for (const auto& s : key_specs()) known = known || s.key == key;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig config;
  // Table order puts data.preset ahead of the quality keys it seeds.
  for (const auto& s : key_specs()) {
    if (auto v = map.get(s.key)) s.set(config, s.key, *v);
  }
  config.train.dims.feature_dim = config.data.feature_dim;
  try {
    config.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& s : key_specs()) out += s.key + " = " + s.get(config) + "\n";
  return out;
}

std::string config_fingerprint(const RunConfig& config) { return fnv1a_hex(to_config_text(config)); }

}  // namespace vgkit
