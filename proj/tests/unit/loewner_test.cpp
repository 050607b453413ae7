#include "flowsep/loewner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

using cd = std::complex<double>;

ControllerSamples sample(const std::function<cd(cd)>& H, const std::vector<double>& omegas) {
  std::vector<FrequencySample> s;
  for (double w : omegas) s.push_back({w, H(cd(0.0, w))});
  return ControllerSamples(s);
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> w;
  for (int k = 0; k < n; ++k) w.push_back(lo * std::pow(hi / lo, double(k) / (n - 1)));
  return w;
}

cd first_order(cd s) { return 1.0 / (s + 1.0); }
cd third_order(cd s) { return (s + 2.0) / ((s + 1.0) * (s + 3.0) * (s + 5.0)); }
// Six lightly separated poles, used where a family of reduced orders is needed.
cd sixth_order(cd s) {
  cd h = 0.0;
  const double p[] = {0.3, 1.0, 2.5, 6.0, 15.0, 40.0};
  const double c[] = {1.0, 0.8, 0.6, 0.4, 0.3, 0.2};
  for (int i = 0; i < 6; ++i) h += c[i] * p[i] / (s + p[i]);
  return h;
}

TEST(Partition, AlternatesAndClosesUnderConjugation) {
  const auto samples = sample(first_order, {1.0, 2.0, 3.0, 4.0});
  const auto [left, right] = partition(samples);
  ASSERT_EQ(left.size(), 4u);
  ASSERT_EQ(right.size(), 4u);
  EXPECT_EQ(left.points[0], cd(0.0, 1.0));
  EXPECT_EQ(left.points[1], cd(0.0, -1.0));
  EXPECT_EQ(left.points[2], cd(0.0, 3.0));
  EXPECT_EQ(left.points[3], cd(0.0, -3.0));
  EXPECT_EQ(right.points[0], cd(0.0, 2.0));
  EXPECT_EQ(right.points[3], cd(0.0, -4.0));
  EXPECT_EQ(left.values[1], std::conj(left.values[0]));
}

TEST(BuildPencil, TwoSamplesGiveTwoByTwo) {
  const auto [l, r] = partition(sample(first_order, {1.0, 2.0}));
  const auto p = build_pencil(l, r);
  EXPECT_EQ(p.Lr.rows(), 2);
  EXPECT_EQ(p.Lr.cols(), 2);
}

TEST(BuildPencil, RealScalarCase) {
  InterpolationSet l{{cd(1.0)}, {cd(0.5)}};
  InterpolationSet r{{cd(3.0)}, {cd(0.25)}};
  const auto p = build_pencil(l, r);
  EXPECT_DOUBLE_EQ(p.Lr(0, 0), (0.5 - 0.25) / (1.0 - 3.0));
  EXPECT_DOUBLE_EQ(p.Lsr(0, 0), (1.0 * 0.5 - 3.0 * 0.25) / (1.0 - 3.0));
}

TEST(BuildPencil, ConstantDataGivesZeroLoewner) {
  const auto [l, r] = partition(sample([](cd) { return cd(2.5); }, {1.0, 2.0, 3.0, 4.0}));
  const auto p = build_pencil(l, r);
  EXPECT_LT(p.Lr.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildPencil, RealMatricesMatchComplexTransform) {
  const auto [l, r] = partition(sample(third_order, logspace(0.1, 10.0, 8)));
  const auto p = build_pencil(l, r);
  // Singular values are invariant under the unitary transform.
  const Eigen::JacobiSVD<Eigen::MatrixXcd> sc(p.L);
  const Eigen::JacobiSVD<Eigen::MatrixXd> sr(p.Lr);
  EXPECT_LT((sc.singularValues() - sr.singularValues()).norm(), 1e-12);
}

TEST(BuildPencil, Errors) {
  InterpolationSet l{{cd(0.0, 1.0)}, {cd(1.0, 1.0)}};
  InterpolationSet r{{cd(2.0)}, {cd(0.5)}};
  EXPECT_THROW(build_pencil(l, r), ConfigError);  // missing conjugate
  InterpolationSet lc{{cd(2.0)}, {cd(1.0)}};
  EXPECT_THROW(build_pencil(lc, r), NumericalError);  // coincident points
  InterpolationSet bad{{cd(2.0), cd(3.0)}, {cd(1.0)}};
  EXPECT_THROW(build_pencil(bad, r), DimensionError);
}

TEST(MinimalOrder, FirstOrderData) {
  const auto [l, r] = partition(sample(first_order, {0.5, 1.0, 2.0, 4.0}));
  EXPECT_EQ(minimal_order(build_pencil(l, r)), 1);
}

TEST(MinimalOrder, ThirdOrderData) {
  const auto [l, r] = partition(sample(third_order, logspace(0.1, 10.0, 8)));
  EXPECT_EQ(minimal_order(build_pencil(l, r)), 3);
}

TEST(MinimalOrder, InvariantUnderScaling) {
  const auto s = sample(third_order, logspace(0.1, 10.0, 8));
  std::vector<FrequencySample> scaled = s.samples();
  for (auto& x : scaled) x.value *= 1e4;
  const auto [l1, r1] = partition(s);
  const auto [l2, r2] = partition(ControllerSamples(scaled));
  EXPECT_EQ(minimal_order(build_pencil(l1, r1)), minimal_order(build_pencil(l2, r2)));
}

TEST(Realize, FirstOrderReproducesTransferFunction) {
  const auto [l, r] = partition(sample(first_order, {0.5, 1.0, 2.0, 4.0}));
  const auto m = realize(build_pencil(l, r), 1);
  for (cd s : {cd(0.0, 0.3), cd(0.0, 7.0), cd(2.0, 1.0), cd(0.0)}) {
    EXPECT_LT(std::abs(eval_tf(m, s) - first_order(s)), 1e-10);
  }
}

TEST(Realize, MinimalOrderInterpolatesAllSamples) {
  const auto s = sample(sixth_order, logspace(0.05, 100.0, 16));
  const auto [l, r] = partition(s);
  const auto p = build_pencil(l, r);
  const int n = minimal_order(p);
  EXPECT_EQ(n, 6);
  const auto m = realize(p, n);
  double scale = 0.0;
  for (const auto& x : s.samples()) scale = std::max(scale, std::abs(x.value));
  for (const auto& x : s.samples()) {
    EXPECT_LT(std::abs(eval_tf(m, cd(0.0, x.omega)) - x.value), 1e-8 * scale);
  }
}

TEST(Realize, ReducedOrderErrorShrinksWithOrder) {
  const auto s = sample(sixth_order, logspace(0.05, 100.0, 16));
  const auto [l, r] = partition(s);
  const auto p = build_pencil(l, r);
  auto err = [&](int order) {
    const auto m = realize(p, order);
    double e = 0.0;
    for (const auto& x : s.samples()) e = std::max(e, std::abs(eval_tf(m, cd(0.0, x.omega)) - x.value));
    return e;
  };
  const double e2 = err(2), e4 = err(4), e6 = err(6);
  EXPECT_GE(e2, e4);
  EXPECT_GE(e4, e6);
  EXPECT_LT(e6, 1e-8);
}

TEST(Realize, RejectsOrderOutOfRange) {
  const auto [l, r] = partition(sample(first_order, {0.5, 1.0, 2.0, 4.0}));
  const auto p = build_pencil(l, r);
  EXPECT_THROW(realize(p, 0), OrderError);
  EXPECT_THROW(realize(p, 2), OrderError);
}

}  // namespace
}  // namespace flowsep
