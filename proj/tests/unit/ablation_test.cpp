#include <gtest/gtest.h>

#include <sstream>

#include "vgkit/ablation.hpp"

using namespace vgkit;

namespace {

CellResult cell(const std::string& name, std::vector<double> acc, bool failed = false) {
  CellResult c;
  c.cell = parse_ablation_cell(name);
  c.accuracy = std::move(acc);
  c.failed = failed;
  return c;
}

const Verdict* find(const std::vector<Verdict>& v, const std::string& name) {
  for (const auto& x : v) {
    if (x.name == name) return &x;
  }
  return nullptr;
}

}  // namespace

TEST(Verdicts, ComputedFromMeans) {
  std::vector<CellResult> cells{cell("high/softmax", {0.5, 0.6}), cell("high/kld", {0.6, 0.6}),
                                cell("high/softmax+reg", {0.7}),  cell("high/kld+reg", {0.8}),
                                cell("low/kld+reg", {0.4}),       cell("mid/kld+reg", {0.9})};
  EXPECT_DOUBLE_EQ(cells[0].mean(), 0.55);
  EXPECT_EQ(cells[0].min(), 0.5);
  const auto v = compute_verdicts(cells);
  EXPECT_TRUE(find(v, "kld_beats_softmax")->passed);
  EXPECT_TRUE(find(v, "regression_helps")->passed);
  EXPECT_FALSE(find(v, "quality_monotone")->passed);  // mid above high
}

TEST(Verdicts, MissingCellsSkipFailedCellsFail) {
  auto v = compute_verdicts({cell("high/softmax", {0.5}), cell("high/kld", {0.6})});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].passed);
  v = compute_verdicts({cell("high/softmax", {0.5}), cell("high/kld", {}, true)});
  EXPECT_FALSE(v[0].passed);
}

TEST(RunAblation, SmallRunIsReproducible) {
  RunConfig c;
  c.data.train_size = 24;
  c.data.val_size = 8;
  c.data.test_size = 16;
  c.data.feature_dim = 6;
  c.train.dims = {0, 4, 6, 6, 8};
  c.train.iterations = 4;
  c.train.batch_size = 8;
  c.ablate_seeds = 2;
  c.ablate_cells = {parse_ablation_cell("high/kld"), parse_ablation_cell("high/softmax"),
                    parse_ablation_cell("high/kld")};
  std::ostringstream progress;
  const auto a = run_ablation(c, &progress);
  ASSERT_EQ(a.cells.size(), 2u);  // duplicates dropped, sorted by name
  EXPECT_EQ(a.cells[0].cell.name(), "high/kld");
  EXPECT_EQ(a.cells[0].seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(a.cells[0].accuracy.size(), 2u);
  ASSERT_NE(a.find_preset("high"), nullptr);
  EXPECT_EQ(a.verdicts.size(), 1u);
  EXPECT_FALSE(progress.str().empty());
  const auto b = run_ablation(c);
  EXPECT_EQ(ablation_jsonl(a), ablation_jsonl(b));
  EXPECT_EQ(ablation_table(a), ablation_table(b));
}
