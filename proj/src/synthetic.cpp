#include "vgkit/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>

namespace vgkit {

namespace {

constexpr std::array<const char*, 8> kShapeNames = {"circle", "square", "triangle", "star",
                                                    "ring",   "cross",  "heart",    "diamond"};
constexpr std::array<const char*, 6> kColorNames = {"red", "green", "blue", "yellow", "purple", "orange"};

constexpr std::array<Relation, 4> kRelations = {Relation::left_of, Relation::right_of, Relation::above,
                                                Relation::below};

std::vector<std::string> relation_words(Relation r) {
  switch (r) {
    case Relation::left_of:
      return {"left", "of"};
    case Relation::right_of:
      return {"right", "of"};
    case Relation::above:
      return {"above"};
    case Relation::below:
      return {"below"};
    case Relation::none:
      break;
  }
  return {};
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void add_noise(std::vector<double>& v, Rng& rng, double noise) {
  if (noise <= 0.0) return;
  std::normal_distribution<double> dist(0.0, noise);
  for (auto& x : v) x += dist(rng);
}

std::optional<TargetDescription> find_description(const Scene& scene, double margin) {
  const auto& target = scene.objects.at(scene.target);
  bool needs_relation = false;
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    if (j == scene.target || scene.objects[j].shape != target.shape) continue;
    needs_relation = true;
    for (Relation r : kRelations) {
      if (relation_holds(r, target.box, scene.objects[j].box, margin)) return TargetDescription{r, j};
    }
  }
  if (needs_relation) return std::nullopt;
  return TargetDescription{};
}

}  // namespace

void SceneConfig::validate() const {
  if (image.width <= 0 || image.height <= 0) throw std::invalid_argument("scene: image size must be positive");
  if (min_objects < 1 || max_objects < min_objects) throw std::invalid_argument("scene: invalid object count range");
  if (num_classes < 1 || num_colors < 1) throw std::invalid_argument("scene: need at least one class and color");
  if (max_objects > num_classes * num_colors) {
    throw std::invalid_argument("scene: more objects than distinct (shape, color) pairs");
  }
  if (!(min_size > 0.0) || max_size < min_size || max_size > std::min(image.width, image.height)) {
    throw std::invalid_argument("scene: invalid object size range");
  }
}

std::string shape_name(std::size_t shape) {
  return shape < kShapeNames.size() ? kShapeNames[shape] : "shape" + std::to_string(shape);
}

std::string color_name(std::size_t color) {
  return color < kColorNames.size() ? kColorNames[color] : "color" + std::to_string(color);
}

bool relation_holds(Relation r, const BBox& subject, const BBox& reference, double margin) {
  switch (r) {
    case Relation::left_of:
      return subject.x_br + margin <= reference.x_tl;
    case Relation::right_of:
      return subject.x_tl >= reference.x_br + margin;
    case Relation::above:
      return subject.y_br + margin <= reference.y_tl;
    case Relation::below:
      return subject.y_tl >= reference.y_br + margin;
    case Relation::none:
      return true;
  }
  return false;
}

TargetDescription describe_target(const Scene& scene, double margin) {
  auto d = find_description(scene, margin);
  if (!d) throw std::invalid_argument("describe_target: no relation separates the target from its look-alikes");
  return *d;
}

Scene generate_scene(Rng& rng, const SceneConfig& config) {
  config.validate();
  const double W = config.image.width;
  const double H = config.image.height;
  for (std::size_t attempt = 0; attempt < config.max_retries; ++attempt) {
    Scene scene;
    scene.image = config.image;
    const std::size_t n = uniform_index(rng, config.min_objects, config.max_objects);
    std::set<std::pair<std::size_t, std::size_t>> used;
    bool placed_all = true;
    for (std::size_t k = 0; k < n && placed_all; ++k) {
      placed_all = false;
      for (int tries = 0; tries < 50; ++tries) {
        const double w = uniform(rng, config.min_size, config.max_size);
        const double h = uniform(rng, config.min_size, config.max_size);
        const double x = uniform(rng, 0.0, W - w);
        const double y = uniform(rng, 0.0, H - h);
        BBox box{x, y, x + w, y + h};
        bool ok = true;
        for (const auto& o : scene.objects) ok = ok && iou(o.box, box) <= config.max_pair_iou;
        if (!ok) continue;
        std::pair<std::size_t, std::size_t> kind;
        do {
          kind = {uniform_index(rng, 0, config.num_classes - 1), uniform_index(rng, 0, config.num_colors - 1)};
        } while (used.count(kind) > 0);
        used.insert(kind);
        scene.objects.push_back({kind.first, kind.second, box});
        placed_all = true;
        break;
      }
    }
    if (!placed_all) continue;
    scene.target = uniform_index(rng, 0, scene.objects.size() - 1);
    if (find_description(scene, config.relation_margin) && description_is_unique(scene, config.relation_margin)) {
      return scene;
    }
  }
  throw std::runtime_error("generate_scene: no valid layout after " + std::to_string(config.max_retries) +
                           " attempts (objects " + std::to_string(config.min_objects) + "-" +
                           std::to_string(config.max_objects) + ", image " + std::to_string(config.image.width) +
                           "x" + std::to_string(config.image.height) + ")");
}

std::vector<std::string> generate_query(const Scene& scene, double margin) {
  const auto desc = describe_target(scene, margin);
  const auto& target = scene.objects.at(scene.target);
  std::vector<std::string> words{"the", color_name(target.color), shape_name(target.shape)};
  if (desc.relation != Relation::none) {
    const auto& ref = scene.objects[desc.reference];
    for (auto& w : relation_words(desc.relation)) words.push_back(std::move(w));
    words.insert(words.end(), {"the", color_name(ref.color), shape_name(ref.shape)});
  }
  return words;
}

bool description_is_unique(const Scene& scene, double margin) {
  auto desc = find_description(scene, margin);
  if (!desc) return false;
  const auto& target = scene.objects.at(scene.target);
  auto matches = [](const SceneObject& o, const SceneObject& proto) {
    return o.shape == proto.shape && o.color == proto.color;
  };
  std::size_t hits = 0;
  for (const auto& o : scene.objects) {
    if (!matches(o, target)) continue;
    if (desc->relation == Relation::none) {
      ++hits;
      continue;
    }
    const auto& ref_proto = scene.objects[desc->reference];
    bool related = false;
    for (const auto& r : scene.objects) {
      if (&r != &o && matches(r, ref_proto) && relation_holds(desc->relation, o.box, r.box, margin)) related = true;
    }
    if (related) ++hits;
  }
  return hits == 1;
}

std::vector<std::string> query_lexicon(std::size_t num_classes, std::size_t num_colors) {
  std::vector<std::string> words{"the", "left", "right", "of", "above", "below"};
  for (std::size_t c = 0; c < num_classes; ++c) words.push_back(shape_name(c));
  for (std::size_t c = 0; c < num_colors; ++c) words.push_back(color_name(c));
  return words;
}

FeatureBank FeatureBank::generate(std::size_t dim, std::size_t num_classes, std::size_t num_colors,
                                  std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("FeatureBank: feature dimension must be at least 2");
  FeatureBank bank;
  bank.dim_ = dim;
  Rng rng = make_rng(seed, /*stream=*/0xfea7);
  const std::size_t shape_part = dim / 2;
  for (std::size_t i = 0; i < num_classes; ++i) bank.shapes_.push_back(gaussian_vector(rng, shape_part));
  for (std::size_t i = 0; i < num_colors; ++i) bank.colors_.push_back(gaussian_vector(rng, dim - shape_part));
  bank.background_ = gaussian_vector(rng, dim);
  return bank;
}

std::vector<double> FeatureBank::prototype(std::size_t shape, std::size_t color) const {
  std::vector<double> v = shapes_.at(shape);
  const auto& c = colors_.at(color);
  v.insert(v.end(), c.begin(), c.end());
  return v;
}

std::vector<double> synthesize_feature(const SceneObject& object, const FeatureBank& bank, Rng& rng, double noise) {
  auto v = bank.prototype(object.shape, object.color);
  add_noise(v, rng, noise);
  return v;
}

std::vector<double> synthesize_background_feature(const FeatureBank& bank, Rng& rng, double noise) {
  auto v = bank.background();
  add_noise(v, rng, noise);
  return v;
}

void ProposalQualityConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(miss_prob) || !prob(distractor_fraction)) {
    throw std::invalid_argument("proposals: probabilities must lie in [0,1]");
  }
  if (!(jitter >= 0.0) || !(feature_noise >= 0.0)) throw std::invalid_argument("proposals: scales must be >= 0");
  if (redundancy < 1) throw std::invalid_argument("proposals: redundancy must be >= 1");
  if (!(scale_bias > 0.0)) throw std::invalid_argument("proposals: scale_bias must be positive");
}

ProposalQualityConfig quality_preset(QualityPreset preset) {
  switch (preset) {
    // Calibrated so the discrimination scores sit near 0.75 / 0.85 / 0.91 on
    // the default scene config. scale_bias gives the regression head a
    // systematic error to correct.
    case QualityPreset::low:
      return {.miss_prob = 0.16, .jitter = 0.13, .distractor_fraction = 0.3, .feature_noise = 0.5,
              .redundancy = 2, .scale_bias = 1.3};
    case QualityPreset::mid:
      return {.miss_prob = 0.11, .jitter = 0.10, .distractor_fraction = 0.3, .feature_noise = 0.4,
              .redundancy = 2, .scale_bias = 1.3};
    case QualityPreset::high:
      return {.miss_prob = 0.06, .jitter = 0.08, .distractor_fraction = 0.25, .feature_noise = 0.3,
              .redundancy = 2, .scale_bias = 1.3};
    case QualityPreset::perfect:
      return {};
  }
  throw std::invalid_argument("unknown quality preset");
}

QualityPreset parse_quality_preset(std::string_view name) {
  if (name == "low") return QualityPreset::low;
  if (name == "mid") return QualityPreset::mid;
  if (name == "high") return QualityPreset::high;
  if (name == "perfect") return QualityPreset::perfect;
  throw std::invalid_argument("unknown quality preset '" + std::string(name) + "'");
}

std::string_view to_string(QualityPreset preset) {
  switch (preset) {
    case QualityPreset::low:
      return "low";
    case QualityPreset::mid:
      return "mid";
    case QualityPreset::high:
      return "high";
    case QualityPreset::perfect:
      return "perfect";
  }
  return "?";
}

namespace {

BBox jittered_copy(const BBox& box, const ProposalQualityConfig& q, ImageSize image, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  double w = box.width() * q.scale_bias;
  double h = box.height() * q.scale_bias;
  double cx = box.center_x();
  double cy = box.center_y();
  if (q.jitter > 0.0) {
    cx += q.jitter * noise(rng) * box.width();
    cy += q.jitter * noise(rng) * box.height();
    w *= std::exp(q.jitter * noise(rng));
    h *= std::exp(q.jitter * noise(rng));
  }
  BBox out = clip_box({cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h}, image);
  // Keep at least 2px so offsets stay well defined.
  if (out.width() < 2.0) {
    out.x_br = std::min<double>(out.x_tl + 2.0, image.width);
    out.x_tl = out.x_br - 2.0;
  }
  if (out.height() < 2.0) {
    out.y_br = std::min<double>(out.y_tl + 2.0, image.height);
    out.y_tl = out.y_br - 2.0;
  }
  return out;
}

BBox background_box(const Scene& scene, Rng& rng, double max_overlap) {
  const double W = scene.image.width;
  const double H = scene.image.height;
  const double lo = std::min(8.0, 0.5 * std::min(W, H));
  const double hi = std::max(lo, 0.4 * std::min(W, H));
  for (int tries = 0; tries < 100; ++tries) {
    const double w = uniform(rng, lo, hi);
    const double h = uniform(rng, lo, hi);
    const double x = uniform(rng, 0.0, W - w);
    const double y = uniform(rng, 0.0, H - h);
    BBox box{x, y, x + w, y + h};
    bool ok = true;
    for (const auto& o : scene.objects) ok = ok && iou(o.box, box) <= max_overlap;
    if (ok) return box;
  }
  const double s = std::min(4.0, std::min(W, H));
  const double x = uniform(rng, 0.0, W - s);
  const double y = uniform(rng, 0.0, H - s);
  return {x, y, x + s, y + s};
}

}  // namespace

std::vector<Proposal> generate_proposals(const Scene& scene, const ProposalQualityConfig& quality,
                                         const FeatureBank& bank, Rng& rng, std::size_t n, double cover_threshold) {
  quality.validate();
  if (n == 0) throw std::invalid_argument("generate_proposals: need at least one proposal");
  const auto& target = scene.objects.at(scene.target);

  std::size_t background_slots = static_cast<std::size_t>(std::lround(quality.distractor_fraction * n));
  background_slots = std::min(background_slots, n - 1);
  const std::size_t object_slots = n - background_slots;
  const bool missed = std::bernoulli_distribution(quality.miss_prob)(rng);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (i != scene.target) order.push_back(i);
  }
  std::shuffle(order.begin(), order.end(), rng);
  if (!missed) order.insert(order.begin(), scene.target);

  std::vector<Proposal> out;
  out.reserve(n);
  for (std::size_t round = 0; round < quality.redundancy; ++round) {
    for (std::size_t idx : order) {
      if (out.size() >= object_slots) break;
      const auto& obj = scene.objects[idx];
      BBox box = jittered_copy(obj.box, quality, scene.image, rng);
      // Copies of other objects must not cover the target.
      for (int tries = 0; idx != scene.target && iou(box, target.box) > cover_threshold; ++tries) {
        box = tries < 20 ? jittered_copy(obj.box, quality, scene.image, rng) : obj.box;
      }
      out.push_back({box, synthesize_feature(obj, bank, rng, quality.feature_noise)});
    }
  }
  while (out.size() < n) {
    BBox box = background_box(scene, rng, 0.3);
    out.push_back({box, synthesize_background_feature(bank, rng, quality.feature_noise)});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  return "?";
}

void DataConfig::validate() const {
  scene.validate();
  quality.validate();
  if (num_proposals < 1) throw std::invalid_argument("data: num_proposals must be >= 1");
  if (feature_dim < 2) throw std::invalid_argument("data: feature_dim must be >= 2");
  if (train_size < 1 || test_size < 1) throw std::invalid_argument("data: split sizes must be positive");
}

std::string DataConfig::fingerprint() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "seed=%llu;img=%dx%d;objs=%zu-%zu;classes=%zu;colors=%zu;size=%.17g-%.17g;pair_iou=%.17g;"
                "margin=%.17g;miss=%.17g;jitter=%.17g;distract=%.17g;fnoise=%.17g;redund=%zu;sbias=%.17g;"
                "n=%zu;dv=%zu;splits=%zu/%zu/%zu",
                static_cast<unsigned long long>(seed), scene.image.width, scene.image.height, scene.min_objects,
                scene.max_objects, scene.num_classes, scene.num_colors, scene.min_size, scene.max_size,
                scene.max_pair_iou, scene.relation_margin, quality.miss_prob, quality.jitter,
                quality.distractor_fraction, quality.feature_noise, quality.redundancy, quality.scale_bias,
                num_proposals, feature_dim, train_size, val_size, test_size);
  return fnv1a_hex(buf);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

DatasetRecord generate_record(const DataConfig& config, const FeatureBank& bank, Split split, std::size_t id) {
  Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(split), id);
  Scene scene = generate_scene(rng, config.scene);
  DatasetRecord rec;
  rec.id = id;
  rec.image = scene.image;
  rec.query = generate_query(scene, config.scene.relation_margin);
  rec.gt = scene.objects[scene.target].box;
  rec.proposals = generate_proposals(scene, config.quality, bank, rng, config.num_proposals);
  return rec;
}

std::vector<DatasetRecord> generate_split(const DataConfig& config, Split split, std::size_t count) {
  config.validate();
  const auto bank =
      FeatureBank::generate(config.feature_dim, config.scene.num_classes, config.scene.num_colors, config.seed);
  std::vector<DatasetRecord> out;
  out.reserve(count);
  for (std::size_t id = 0; id < count; ++id) out.push_back(generate_record(config, bank, split, id));
  return out;
}

std::vector<DatasetRecord> generate_split(const DataConfig& config, Split split) {
  switch (split) {
    case Split::train:
      return generate_split(config, split, config.train_size);
    case Split::val:
      return generate_split(config, split, config.val_size);
    case Split::test:
      return generate_split(config, split, config.test_size);
  }
  return {};
}

GroundingSample to_sample(const DatasetRecord& record, const Vocabulary& vocab) {
  GroundingSample s;
  s.id = record.id;
  s.image = record.image;
  s.proposals = record.proposals;
  s.tokens = tokenize(record.query, vocab);
  s.gt = record.gt;
  return s;
}

std::vector<GroundingSample> to_samples(const std::vector<DatasetRecord>& records, const Vocabulary& vocab) {
  std::vector<GroundingSample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(to_sample(r, vocab));
  return out;
}

}  // namespace vgkit
