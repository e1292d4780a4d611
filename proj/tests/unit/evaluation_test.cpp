#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "vgkit/checkpoint.hpp"
#include "vgkit/evaluation.hpp"
#include "vgkit/synthetic.hpp"
#include "vgkit/vocab.hpp"

using namespace vgkit;

namespace {

struct Fixture {
  std::vector<GroundingSample> samples;
  Vocabulary vocab;
  GroundingModel model;
};

Fixture make_fixture(const std::string& preset, std::uint64_t seed = 1) {
  DataConfig c;
  c.quality = quality_preset(parse_quality_preset(preset));
  c.preset = preset;
  c.feature_dim = 6;
  c.test_size = 80;
  const auto recs = generate_split(c, Split::test);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& r : recs) corpus.push_back(r.query);
  Fixture f;
  f.vocab = build_vocab(corpus);
  f.samples = to_samples(recs, f.vocab);
  f.model = GroundingModel::initialize({f.vocab.size(), 4, 6, 6, 8}, seed);
  return f;
}

oracle::Box arr(const BBox& b) { return {b.x_tl, b.y_tl, b.x_br, b.y_br}; }

}  // namespace

TEST(Evaluate, ReportMatchesPredictionsAndOracle) {
  const auto f = make_fixture("mid");
  const auto r = evaluate(f.model, true, f.samples);
  ASSERT_EQ(r.predictions.size(), f.samples.size());
  std::vector<oracle::Box> preds, gts;
  oracle::Instance inst;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    const auto& row = r.predictions[i];
    const auto p = predict(f.model, f.samples[i]);
    EXPECT_EQ(row.index, p.index);
    EXPECT_EQ(row.refined_box, p.refined_box);
    correct += row.correct;
    preds.push_back(arr(row.refined_box));
    gts.push_back(arr(f.samples[i].gt));
    inst.gts.push_back(gts.back());
    inst.proposals.emplace_back();
    for (const auto& pr : f.samples[i].proposals) inst.proposals.back().push_back(arr(pr.box));
  }
  EXPECT_EQ(r.report.accuracy, oracle::accuracy(preds, gts));
  EXPECT_EQ(r.report.accuracy, static_cast<double>(correct) / f.samples.size());
  EXPECT_EQ(r.report.proposals.discrimination, oracle::s_dis(inst));
  EXPECT_EQ(r.report.proposals.samples, f.samples.size());
}

TEST(EvaluateProperty, UnrefinedAccuracyBoundedByDiscrimination) {
  for (const char* preset : {"low", "mid", "high"}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto f = make_fixture(preset, seed);
      const auto r = evaluate(f.model, false, f.samples);
      EXPECT_EQ(r.report.accuracy, r.report.unrefined_accuracy);
      EXPECT_LE(r.report.accuracy, r.report.proposals.discrimination) << preset << " " << seed;
    }
  }
}

TEST(Evaluate, DimensionMismatchRejected) {
  auto f = make_fixture("high");
  f.samples[3].proposals[0].feature.push_back(0.0);
  try {
    evaluate(f.model, true, f.samples);
    FAIL() << "no throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("fingerprint mismatch"), std::string::npos);
  }
  EXPECT_THROW(evaluate(f.model, true, {}), std::invalid_argument);
}

TEST(Evaluate, CheckpointRoundTripGivesIdenticalReport) {
  const auto f = make_fixture("high");
  const auto ck = deserialize_checkpoint(serialize_checkpoint({f.model, f.vocab, true, 0, "kld"}));
  const auto a = evaluate(f.model, true, f.samples), b = evaluate(ck.model, true, f.samples);
  EXPECT_EQ(report_json(a.report), report_json(b.report));
  std::ostringstream pa, pb;
  write_predictions(pa, a.predictions);
  write_predictions(pb, b.predictions);
  EXPECT_EQ(pa.str(), pb.str());
}

TEST(ReportJson, UndefinedDiversityIsNullWithReason) {
  MetricReport r;
  r.proposals.samples = 2;
  r.proposals.diversity.reason = "no covering proposals";
  const std::string j = report_json(r, {{"dataset", "abc"}});
  EXPECT_NE(j.find("\"s_div\":null"), std::string::npos) << j;
  EXPECT_NE(j.find("\"s_div_reason\":\"no covering proposals\""), std::string::npos);
  EXPECT_NE(j.find("\"dataset\":\"abc\""), std::string::npos);
  EXPECT_NE(report_table(r).find("null (no covering proposals)"), std::string::npos);
}
