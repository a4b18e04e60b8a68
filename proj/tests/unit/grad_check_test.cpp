#include <cmath>
#include <gtest/gtest.h>

#include "sanid/error.hpp"
#include "sanid/grad_check.hpp"

namespace sanid {
namespace {

TEST(GradCheckTest, QuadraticHasExactCentralDifference) {
  Tensor theta = Tensor::vector({1.0, 2.0});
  const Tensor analytic = Tensor::vector({2.0, 4.0});
  auto f = [&] { return theta[0] * theta[0] + theta[1] * theta[1]; };
  const GradSlot slots[] = {{"theta", &theta, &analytic}};
  Rng rng(1);
  const auto result = grad_check(f, slots, rng);
  EXPECT_LT(result.max_rel_error, 1e-8);
  EXPECT_EQ(result.coords_checked, 2u);
  // Values restored exactly after perturbation.
  EXPECT_EQ(theta[0], 1.0);
  EXPECT_EQ(theta[1], 2.0);
}

TEST(GradCheckTest, ConstantFunctionHasZeroGradient) {
  Tensor theta = Tensor::vector({0.3, -0.7, 5.0});
  const Tensor analytic = theta.zeros_like();
  const GradSlot slots[] = {{"theta", &theta, &analytic}};
  Rng rng(1);
  EXPECT_LT(grad_check([] { return 3.5; }, slots, rng).max_rel_error, 1e-8);
}

TEST(GradCheckTest, DetectsAWrongGradient) {
  Tensor theta = Tensor::vector({1.0, 2.0});
  const Tensor wrong = Tensor::vector({2.0, 5.0});
  auto f = [&] { return theta[0] * theta[0] + theta[1] * theta[1]; };
  const GradSlot slots[] = {{"theta", &theta, &wrong}};
  Rng rng(1);
  const auto result = grad_check(f, slots, rng);
  EXPECT_GT(result.max_rel_error, 0.1);
  EXPECT_EQ(result.worst_slot, "theta");
  EXPECT_EQ(result.worst_index, 1u);
}

TEST(GradCheckTest, LargeArraysAreSubsampled) {
  Tensor theta(40, 40);
  const Tensor analytic = theta.zeros_like();
  const GradSlot slots[] = {{"big", &theta, &analytic}};
  Rng rng(1);
  const auto result = grad_check([] { return 0.0; }, slots, rng);
  EXPECT_GE(result.coords_checked, 50u);
  EXPECT_LT(result.coords_checked, 1600u);
}

TEST(GradCheckTest, NonFiniteObjectiveIsNumericError) {
  Tensor theta = Tensor::vector({1.0});
  const Tensor analytic = theta.zeros_like();
  const GradSlot slots[] = {{"theta", &theta, &analytic}};
  Rng rng(1);
  try {
    grad_check([&] { return theta[0] > 1.0 ? std::nan("") : 0.0; }, slots, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
  EXPECT_EQ(theta[0], 1.0);
}

}  // namespace
}  // namespace sanid
