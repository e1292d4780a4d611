#include "vgkit/dataset_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vgkit {

using nlohmann::ordered_json;

namespace {

ordered_json box_json(const BBox& b) { return ordered_json::array({b.x_tl, b.y_tl, b.x_br, b.y_br}); }

BBox box_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw std::runtime_error("box must be an array of 4 numbers");
  BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.is_valid()) throw std::runtime_error("box has inverted or non-finite corners");
  return b;
}

[[noreturn]] void fail_line(std::size_t line, const std::string& why) {
  throw std::runtime_error("dataset line " + std::to_string(line) + ": " + why);
}

}  // namespace

DatasetHeader make_header(const DataConfig& config, Split split, std::size_t count) {
  DatasetHeader h;
  h.seed = config.seed;
  h.split = std::string(to_string(split));
  h.preset = config.preset;
  h.fingerprint = config.fingerprint();
  h.feature_dim = config.feature_dim;
  h.num_proposals = config.num_proposals;
  h.count = count;
  return h;
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  const auto& h = dataset.header;
  ordered_json header{{"schema", kDatasetSchema},       {"version", h.version},
                      {"seed", h.seed},                 {"split", h.split},
                      {"preset", h.preset},             {"fingerprint", h.fingerprint},
                      {"feature_dim", h.feature_dim},   {"num_proposals", h.num_proposals},
                      {"count", dataset.records.size()}};
  out << header.dump() << '\n';
  for (const auto& r : dataset.records) {
    ordered_json props = ordered_json::array();
    for (const auto& p : r.proposals) props.push_back({{"box", box_json(p.box)}, {"feat", p.feature}});
    ordered_json rec{{"id", r.id},
                     {"w", r.image.width},
                     {"h", r.image.height},
                     {"query", r.query},
                     {"gt", box_json(r.gt)},
                     {"proposals", std::move(props)}};
    out << rec.dump() << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  write_dataset(out, dataset);
}

Dataset read_dataset(std::istream& in) {
  Dataset ds;
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) fail_line(1, "missing header");
  ++line;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != kDatasetSchema) fail_line(line, "not a vgkit dataset");
    auto& h = ds.header;
    h.version = j.at("version").get<int>();
    if (h.version != kDatasetSchemaVersion) {
      fail_line(line, "schema version " + std::to_string(h.version) + " (expected " +
                          std::to_string(kDatasetSchemaVersion) + ")");
    }
    h.seed = j.at("seed").get<std::uint64_t>();
    h.split = j.at("split").get<std::string>();
    h.preset = j.at("preset").get<std::string>();
    h.fingerprint = j.at("fingerprint").get<std::string>();
    h.feature_dim = j.at("feature_dim").get<std::size_t>();
    h.num_proposals = j.at("num_proposals").get<std::size_t>();
    h.count = j.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail_line(line, e.what());
  }

  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    DatasetRecord r;
    try {
      const auto j = nlohmann::json::parse(text);
      r.id = j.at("id").get<std::size_t>();
      r.image = {j.at("w").get<int>(), j.at("h").get<int>()};
      r.query = j.at("query").get<std::vector<std::string>>();
      if (r.query.empty()) fail_line(line, "empty query");
      r.gt = box_from(j.at("gt"));
      for (const auto& p : j.at("proposals")) {
        Proposal prop{box_from(p.at("box")), p.at("feat").get<std::vector<double>>()};
        if (prop.feature.size() != ds.header.feature_dim) {
          fail_line(line, "feature has " + std::to_string(prop.feature.size()) + " entries, header says " +
                              std::to_string(ds.header.feature_dim));
        }
        r.proposals.push_back(std::move(prop));
      }
      if (r.proposals.size() != ds.header.num_proposals) {
        fail_line(line, std::to_string(r.proposals.size()) + " proposals, header says " +
                            std::to_string(ds.header.num_proposals));
      }
    } catch (const nlohmann::json::exception& e) {
      fail_line(line, e.what());
    } catch (const std::runtime_error& e) {
      const std::string what = e.what();
      if (what.rfind("dataset line", 0) == 0) throw;
      fail_line(line, what);
    }
    ds.records.push_back(std::move(r));
  }
  if (ds.records.size() != ds.header.count) {
    fail_line(line + 1, "expected " + std::to_string(ds.header.count) + " records, found " +
                            std::to_string(ds.records.size()));
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read dataset " + path.string());
  return read_dataset(in);
}

}  // namespace vgkit
