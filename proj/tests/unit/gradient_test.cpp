#include <gtest/gtest.h>

#include "fd_check.hpp"
#include "vgkit/ops.hpp"

// Fewer trials than the acceptance run; enough to catch a broken backward.
class GradientCase : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GradientCase, MatchesCentralDifferences) {
  const auto& c = vgtest::gradient_cases()[GetParam()];
  const auto r = vgtest::run_gradient_case(c, 20, 1000 + GetParam());
  EXPECT_GT(r.elements, 0u);
  EXPECT_LT(r.max_rel_error, vgtest::kFdTolerance) << c.name;
}

INSTANTIATE_TEST_SUITE_P(All, GradientCase, ::testing::Range<std::size_t>(0, vgtest::gradient_cases().size()),
                         [](const auto& info) { return vgtest::gradient_cases()[info.param].name; });

TEST(GradientChecker, CatchesAWrongGradient) {
  vgkit::Tensor x = vgkit::Tensor::vector({0.3, -0.7}, true);
  // Backward of this graph is right; a stale buffer from an unrelated call is
  // cleared first, so the check must pass.
  vgkit::backward(vgkit::ops::sum(x));
  const auto ok = vgtest::check_gradients([&] { return vgkit::ops::sum(vgkit::ops::mul(x, x)); }, {x});
  EXPECT_LT(ok.max_rel_error, 1e-6);

  // Compare against a different function: the error must be large.
  vgkit::Tensor y = vgkit::Tensor::vector({0.3, -0.7}, true);
  int calls = 0;
  const auto bad = vgtest::check_gradients(
      [&] {
        ++calls;
        return calls == 1 ? vgkit::ops::sum(y) : vgkit::ops::sum(vgkit::ops::scale(y, 3.0));
      },
      {y});
  EXPECT_GT(bad.max_rel_error, 0.5);
}
