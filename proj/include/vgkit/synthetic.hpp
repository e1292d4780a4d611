#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vgkit/geometry.hpp"
#include "vgkit/grounding_head.hpp"
#include "vgkit/optim.hpp"

namespace vgkit {

struct SceneConfig {
  ImageSize image{100, 100};
  std::size_t min_objects = 2;
  std::size_t max_objects = 6;
  std::size_t num_classes = 8;
  std::size_t num_colors = 6;
  double min_size = 14.0;
  double max_size = 36.0;
  double max_pair_iou = 0.3;
  double relation_margin = 10.0;
  std::size_t max_retries = 500;

  void validate() const;
};

struct SceneObject {
  std::size_t shape = 0;
  std::size_t color = 0;
  BBox box;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

enum class Relation { none, left_of, right_of, above, below };

struct Scene {
  ImageSize image;
  std::vector<SceneObject> objects;
  std::size_t target = 0;
};

std::string shape_name(std::size_t shape);
std::string color_name(std::size_t color);

// True when `subject` lies on the given side of `reference` with at least
// `margin` pixels of clearance.
bool relation_holds(Relation r, const BBox& subject, const BBox& reference, double margin);

// The relation used to disambiguate the target, if any. A relation is needed
// when another object shares the target's shape; the first such object (by
// index) with a satisfiable relation is the reference.
struct TargetDescription {
  Relation relation = Relation::none;
  std::size_t reference = 0;
};

TargetDescription describe_target(const Scene& scene, double margin);

// Objects have distinct (shape, color) pairs, pairwise IoU <= max_pair_iou and
// a describable target. Throws std::runtime_error after max_retries failures.
Scene generate_scene(Rng& rng, const SceneConfig& config);

// "the <color> <shape>", optionally followed by "<relation> the <color> <shape>".
std::vector<std::string> generate_query(const Scene& scene, double margin = 10.0);

// True when exactly one object satisfies the query generated for the scene.
bool description_is_unique(const Scene& scene, double margin = 10.0);

// Every word generate_query can emit for the given class and color counts.
std::vector<std::string> query_lexicon(std::size_t num_classes, std::size_t num_colors);

// Fixed prototypes shared by every sample of a dataset. An object's
// prototype is its shape prototype followed by its color prototype.
class FeatureBank {
 public:
  FeatureBank() = default;
  static FeatureBank generate(std::size_t dim, std::size_t num_classes, std::size_t num_colors, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::vector<double> prototype(std::size_t shape, std::size_t color) const;
  const std::vector<double>& background() const { return background_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> shapes_;
  std::vector<std::vector<double>> colors_;
  std::vector<double> background_;
};

std::vector<double> synthesize_feature(const SceneObject& object, const FeatureBank& bank, Rng& rng, double noise);
std::vector<double> synthesize_background_feature(const FeatureBank& bank, Rng& rng, double noise);

// Knobs emulating proposal generators of different quality.
struct ProposalQualityConfig {
  double miss_prob = 0.0;            // chance the target gets no proposal
  double jitter = 0.0;               // relative box noise
  double distractor_fraction = 0.0;  // share of slots reserved for background
  double feature_noise = 0.0;
  std::size_t redundancy = 1;        // copies per object
  // Systematic size mismatch between generator boxes and annotations
  // (1 = none). The regression head can learn to undo it.
  double scale_bias = 1.0;

  void validate() const;
  friend bool operator==(const ProposalQualityConfig&, const ProposalQualityConfig&) = default;
};

enum class QualityPreset { low, mid, high, perfect };

ProposalQualityConfig quality_preset(QualityPreset preset);
QualityPreset parse_quality_preset(std::string_view name);
std::string_view to_string(QualityPreset preset);

// Exactly n proposals in shuffled order.
std::vector<Proposal> generate_proposals(const Scene& scene, const ProposalQualityConfig& quality,
                                         const FeatureBank& bank, Rng& rng, std::size_t n,
                                         double cover_threshold = 0.5);

struct DatasetRecord {
  std::size_t id = 0;
  ImageSize image;
  std::vector<std::string> query;
  BBox gt;
  std::vector<Proposal> proposals;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

enum class Split : std::uint64_t { train = 1, val = 2, test = 3 };
std::string_view to_string(Split split);

struct DataConfig {
  std::uint64_t seed = 7;
  SceneConfig scene;
  ProposalQualityConfig quality = quality_preset(QualityPreset::high);
  std::string preset = "high";
  std::size_t num_proposals = 8;
  std::size_t feature_dim = 32;
  std::size_t train_size = 2000;
  std::size_t val_size = 250;
  std::size_t test_size = 500;

  void validate() const;
  // Stable digest of every field that affects generated records.
  std::string fingerprint() const;
};

DatasetRecord generate_record(const DataConfig& config, const FeatureBank& bank, Split split, std::size_t id);
std::vector<DatasetRecord> generate_split(const DataConfig& config, Split split, std::size_t count);
std::vector<DatasetRecord> generate_split(const DataConfig& config, Split split);

// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

GroundingSample to_sample(const DatasetRecord& record, const Vocabulary& vocab);
std::vector<GroundingSample> to_samples(const std::vector<DatasetRecord>& records, const Vocabulary& vocab);

}  // namespace vgkit
