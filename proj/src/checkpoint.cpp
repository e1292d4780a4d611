#include "vgkit/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vgkit {

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'V', 'G', 'K', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated at byte " + std::to_string(pos_));
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  const auto& dims = ck.model.dims();
  nlohmann::ordered_json meta;
  meta["fingerprint"] = {{"vocab_size", dims.vocab_size},
                         {"embed_dim", dims.embed_dim},
                         {"query_dim", dims.query_dim},
                         {"feature_dim", dims.feature_dim},
                         {"fused_dim", dims.fused_dim}};
  meta["regression"] = ck.regression;
  meta["iteration"] = ck.iteration;
  meta["variant"] = ck.variant;
  meta["vocab"] = ck.vocab.tokens();
  const std::string meta_text = meta.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, meta_text.size());
  out += meta_text;
  const auto params = ck.model.named_parameters();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put<std::uint64_t>(out, d);
    for (double v : t.values()) put<double>(out, v);
  }
  return out;
}

static Checkpoint parse_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto meta = nlohmann::json::parse(in.get_string(in.get<std::uint64_t>()));
  const auto& fp = meta.at("fingerprint");
  ModelDims dims{fp.at("vocab_size").get<std::size_t>(), fp.at("embed_dim").get<std::size_t>(),
                 fp.at("query_dim").get<std::size_t>(), fp.at("feature_dim").get<std::size_t>(),
                 fp.at("fused_dim").get<std::size_t>()};

  std::map<std::string, Tensor> tensors;
  const auto count = in.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = in.get_string(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = in.get<std::uint64_t>();
    std::vector<double> values(shape_numel(shape));
    for (auto& v : values) v = in.get<double>();
    tensors[name] = Tensor::from(std::move(shape), std::move(values), true);
  }
  if (!in.done()) throw std::runtime_error("checkpoint: trailing bytes");

  auto take = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("checkpoint: missing tensor " + name);
    return it->second;
  };
  QueryEncoderParams enc{take("encoder.embedding"), take("encoder.w_input"), take("encoder.w_hidden"),
                         take("encoder.bias")};
  GroundingHeadParams head{take("head.w_fuse"),  take("head.b_fuse"), take("head.w_score"),
                           take("head.b_score"), take("head.w_reg"),  take("head.b_reg")};

  Checkpoint ck;
  ck.model = GroundingModel(dims, std::move(enc), std::move(head));
  ck.vocab = Vocabulary(meta.at("vocab").get<std::vector<std::string>>());
  if (ck.vocab.size() != dims.vocab_size) throw std::runtime_error("checkpoint: vocabulary size mismatch");
  ck.regression = meta.at("regression").get<bool>();
  ck.iteration = meta.at("iteration").get<std::uint64_t>();
  ck.variant = meta.at("variant").get<std::string>();
  return ck;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  // A damaged file is a runtime error, whichever layer notices it.
  try {
    return parse_checkpoint(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  const auto bytes = serialize_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace vgkit
