#include "vgkit/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "vgkit/ablation.hpp"
#include "vgkit/checkpoint.hpp"
#include "vgkit/config.hpp"
#include "vgkit/dataset_io.hpp"
#include "vgkit/evaluation.hpp"
#include "vgkit/trainer.hpp"

namespace vgkit {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  bool overwrite = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool out_required) {
  cmd->add_option("--config", o.config, "Config file (key = value)");
  cmd->add_option("--seed", o.seed, "Seed override");
  auto* out = cmd->add_option("--out", o.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--set", o.overrides, "Config override key=value (repeatable)");
  cmd->add_flag("--overwrite", o.overwrite, "Replace existing output files");
}

ConfigMap load_map(const CommonOptions& o) {
  ConfigMap map = o.config.empty() ? ConfigMap{} : ConfigMap::load(o.config);
  for (const auto& a : o.overrides) map.set_assignment(a);
  return map;
}

void prepare_out_dir(const fs::path& dir, bool overwrite) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw std::invalid_argument(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !overwrite) {
      throw std::invalid_argument("output directory " + dir.string() + " is not empty; pass --overwrite to replace it");
    }
  }
  fs::create_directories(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void check_header(const DatasetHeader& h, std::size_t feature_dim, const fs::path& path) {
  if (h.feature_dim != feature_dim) {
    throw std::invalid_argument("dimension mismatch: " + path.string() + " has " + std::to_string(h.feature_dim) +
                                "-d features, expected " + std::to_string(feature_dim));
  }
}

std::vector<GroundingSample> load_samples(const fs::path& path, const Vocabulary& vocab, std::size_t feature_dim,
                                          std::string* fingerprint = nullptr) {
  const Dataset ds = read_dataset(path);
  check_header(ds.header, feature_dim, path);
  if (fingerprint) *fingerprint = ds.header.fingerprint;
  return to_samples(ds.records, vocab);
}

std::vector<std::vector<std::string>> queries(const std::vector<DatasetRecord>& records) {
  std::vector<std::vector<std::string>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.query);
  return out;
}

int cmd_generate(const CommonOptions& o, std::ostream& out) {
  ConfigMap map = load_map(o);
  if (o.seed) map.set("data.seed", std::to_string(*o.seed));
  const RunConfig config = resolve(map);
  const fs::path dir = o.out;
  prepare_out_dir(dir, o.overwrite);

  const auto& data = config.data;
  const auto train = generate_split(data, Split::train);
  const auto val = generate_split(data, Split::val);
  const auto test = generate_split(data, Split::test);
  const Vocabulary vocab = build_vocab(queries(train));

  write_dataset(dir / kTrainFile, {make_header(data, Split::train, train.size()), train});
  write_dataset(dir / kValFile, {make_header(data, Split::val, val.size()), val});
  write_dataset(dir / kTestFile, {make_header(data, Split::test, test.size()), test});
  vocab.save(dir / kVocabFile);
  write_text(dir / kConfigFile, to_config_text(config));

  out << "wrote " << train.size() << "/" << val.size() << "/" << test.size() << " samples (" << data.preset
      << ", fingerprint " << data.fingerprint() << ") and " << vocab.size() << " vocabulary entries to "
      << dir.string() << "\n";
  return kExitOk;
}

struct TrainOptions {
  std::string data;
  std::optional<std::string> variant;
  bool no_regression = false;
  std::optional<std::size_t> iterations;
};

int cmd_train(const CommonOptions& o, const TrainOptions& t, std::ostream& out, std::ostream& err) {
  ConfigMap map = load_map(o);
  if (o.seed) map.set("train.seed", std::to_string(*o.seed));
  if (t.variant) map.set("loss.variant", *t.variant);
  if (t.no_regression) map.set("loss.regression", "false");
  if (t.iterations) map.set("train.iterations", std::to_string(*t.iterations));
  if (!t.data.empty()) map.set("paths.data", t.data);
  RunConfig config = resolve(map);
  if (config.data_dir.empty()) throw std::invalid_argument("train: no dataset directory (--data or paths.data)");

  const fs::path data_dir = config.data_dir;
  const Vocabulary vocab = Vocabulary::load(data_dir / kVocabFile);
  const auto train_set = load_samples(data_dir / kTrainFile, vocab, config.data.feature_dim);
  const auto val_set = load_samples(data_dir / kValFile, vocab, config.data.feature_dim);

  const fs::path dir = o.out;
  prepare_out_dir(dir, o.overwrite);
  write_text(dir / kConfigFile, to_config_text(config));

  TrainConfig tc = config.train;
  tc.dims.vocab_size = vocab.size();
  const std::string variant(to_string(tc.loss.variant));
  std::ofstream log(dir / "train_log.csv", std::ios::binary);
  if (!log) throw std::runtime_error("cannot write " + (dir / "train_log.csv").string());

  TrainResult result;
  try {
    result = train(tc, train_set, val_set);
  } catch (const TrainingAborted& e) {
    write_train_log(log, e.log(), tc.loss);
    err << "train: aborted, non-finite loss at iteration " << e.iteration() << "\n";
    return kExitRuntime;
  }
  write_train_log(log, result.log, tc.loss);

  const auto save = [&](const char* name, const GroundingModel& model, std::size_t iteration) {
    save_checkpoint(dir / name, {model, vocab, tc.loss.regression, iteration, variant});
  };
  save("checkpoint_best.ckpt", result.best_model, result.best_iteration);
  save("checkpoint_final.ckpt", result.final_model, tc.iterations);

  out << "trained " << tc.iterations << " iterations (" << variant << (tc.loss.regression ? "+reg" : "")
      << "); best iteration " << result.best_iteration;
  if (result.best_val_accuracy) out << ", validation accuracy " << *result.best_val_accuracy;
  out << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path, const std::string& out_dir,
             bool overwrite, std::ostream& out) {
  std::ifstream in(checkpoint_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + checkpoint_path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const Checkpoint ckpt = deserialize_checkpoint(bytes);

  fs::path data = data_path;
  if (fs::is_directory(data)) data /= kTestFile;
  std::string data_fingerprint;
  const auto samples = load_samples(data, ckpt.vocab, ckpt.model.dims().feature_dim, &data_fingerprint);
  const EvalResult result = evaluate(ckpt.model, ckpt.regression, samples);

  const std::string json =
      report_json(result.report, {{"checkpoint", fnv1a_hex(bytes)}, {"dataset", data_fingerprint}}) + "\n";
  const std::string table = report_table(result.report);
  out << table;
  if (!out_dir.empty()) {
    const fs::path dir = out_dir;
    prepare_out_dir(dir, overwrite);
    write_text(dir / "report.json", json);
    write_text(dir / "report.txt", table);
    std::ostringstream rows;
    write_predictions(rows, result.predictions);
    write_text(dir / "predictions.jsonl", rows.str());
  }
  return kExitOk;
}

struct AblateOptions {
  std::optional<std::size_t> seeds;
  std::string cells;
};

int cmd_ablate(const CommonOptions& o, const AblateOptions& a, std::ostream& out, std::ostream& err) {
  ConfigMap map = load_map(o);
  if (o.seed) map.set("train.seed", std::to_string(*o.seed));
  if (a.seeds) map.set("ablate.seeds", std::to_string(*a.seeds));
  if (!a.cells.empty()) map.set("ablate.cells", a.cells);
  const RunConfig config = resolve(map);
  const fs::path dir = o.out;
  prepare_out_dir(dir, o.overwrite);
  write_text(dir / kConfigFile, to_config_text(config));

  const AblationReport report = run_ablation(config, &err);
  const std::string table = ablation_table(report);
  write_text(dir / "report.txt", table);
  write_text(dir / "report.jsonl", ablation_jsonl(report));
  out << table;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual grounding toolkit: synthetic data, training, evaluation, ablations", "vgkit"};
  app.require_subcommand(1);

  CommonOptions gen_opts, train_opts, ablate_opts;
  auto* gen = app.add_subcommand("generate", "Write train/val/test splits and the vocabulary");
  add_common(gen, gen_opts, true);

  TrainOptions t;
  auto* tr = app.add_subcommand("train", "Train a model on a generated dataset");
  add_common(tr, train_opts, true);
  tr->add_option("--data", t.data, "Dataset directory from `generate`");
  tr->add_option("--variant", t.variant, "Ranking loss: kld or softmax_single_label");
  tr->add_flag("--no-regression", t.no_regression, "Drop the box regression term");
  tr->add_option("--iterations", t.iterations, "Iteration budget");

  std::string ckpt, data, eval_out;
  bool eval_overwrite = false;
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  ev->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  ev->add_option("--data", data, "Dataset file, or a directory (uses test.jsonl)")->required();
  ev->add_option("--out", eval_out, "Directory for report.json, report.txt, predictions.jsonl");
  ev->add_flag("--overwrite", eval_overwrite, "Replace existing output files");

  AblateOptions a;
  auto* ab = app.add_subcommand("ablate", "Train and evaluate loss/preset cells over several seeds");
  add_common(ab, ablate_opts, true);
  ab->add_option("--seeds", a.seeds, "Seeds per cell");
  ab->add_option("--cells", a.cells, "Comma-separated cells, e.g. high/kld,high/kld+reg");

  std::vector<std::string> argv_store{"vgkit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) return cmd_generate(gen_opts, out);
    if (*tr) return cmd_train(train_opts, t, out, err);
    if (*ev) return cmd_eval(ckpt, data, eval_out, eval_overwrite, out);
    if (*ab) return cmd_ablate(ablate_opts, a, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace vgkit
