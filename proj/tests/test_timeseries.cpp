#include "gshrink/errors.hpp"
#include "gshrink/timeseries.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gshrink;

namespace {

MultiTrialSeries single(const RVector& x) {
  RMatrix m(1, x.size());
  m.row(0) = x.transpose();
  return MultiTrialSeries({m}, 1.0);
}

}  // namespace

TEST(MultiTrialSeries, Validation) {
  EXPECT_THROW(MultiTrialSeries({}, 1.0), Error);
  EXPECT_THROW(MultiTrialSeries({RMatrix::Zero(2, 1)}, 1.0), Error);
  EXPECT_THROW(MultiTrialSeries({RMatrix::Zero(2, 4), RMatrix::Zero(2, 5)}, 1.0), DimensionError);
  EXPECT_THROW(MultiTrialSeries({RMatrix::Zero(2, 4)}, -1.0), Error);
  RMatrix bad = RMatrix::Zero(1, 4);
  bad(0, 2) = std::nan("");
  EXPECT_THROW(MultiTrialSeries({bad}, 1.0), Error);
  const MultiTrialSeries ok({RMatrix::Zero(2, 4)}, 1.0);
  EXPECT_EQ(ok.channel_labels(), (std::vector<std::string>{"ch1", "ch2"}));
}

TEST(Detrend, ConstantAndLinearVanish) {
  RVector c = RVector::Constant(10, 4.2);
  EXPECT_LT(detrend(single(c), TrendOrder::linear).trial(0).cwiseAbs().maxCoeff(), 1e-12);
  RVector lin(10);
  for (int t = 0; t < 10; ++t) lin(t) = 3.0 * (t + 1);
  EXPECT_LT(detrend(single(lin), TrendOrder::linear).trial(0).cwiseAbs().maxCoeff(), 1e-10);
  RVector quad(10);
  for (int t = 0; t < 10; ++t) quad(t) = 0.5 * (t + 1) * (t + 1) - 2.0 * (t + 1) + 1.0;
  EXPECT_LT(detrend(single(quad), TrendOrder::quadratic).trial(0).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Detrend, QuadraticInputMatchesDirectOls) {
  // Oracle: closed-form simple linear regression on t = 1..8.
  const int n = 8;
  RVector x(n);
  double st = 0, sx = 0;
  for (int t = 1; t <= n; ++t) {
    x(t - 1) = double(t) * t;
    st += t;
    sx += x(t - 1);
  }
  const double tbar = st / n, xbar = sx / n;
  double sxy = 0, sxx = 0;
  for (int t = 1; t <= n; ++t) {
    sxy += (t - tbar) * (x(t - 1) - xbar);
    sxx += (t - tbar) * (t - tbar);
  }
  const double slope = sxy / sxx, icpt = xbar - slope * tbar;
  const RMatrix r = detrend(single(x), TrendOrder::linear).trial(0);
  double sum = 0, dot = 0;
  for (int t = 1; t <= n; ++t) {
    EXPECT_NEAR(r(0, t - 1), x(t - 1) - (icpt + slope * t), 1e-10);
    sum += r(0, t - 1);
    dot += t * r(0, t - 1);
  }
  EXPECT_NEAR(sum, 0.0, 1e-10);
  EXPECT_NEAR(dot, 0.0, 1e-9);
}

TEST(Detrend, IdempotentAndTooShort) {
  const auto x = test::white_noise(3, 2, 40, 9);
  for (auto order : {TrendOrder::linear, TrendOrder::quadratic}) {
    const auto once = detrend(x, order);
    const auto twice = detrend(once, order);
    for (std::size_t n = 0; n < x.trials(); ++n) {
      EXPECT_LT((once.trial(n) - twice.trial(n)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  EXPECT_THROW(detrend(test::white_noise(1, 1, 3, 1), TrendOrder::quadratic), InsufficientDataError);
  EXPECT_THROW(detrend(test::white_noise(1, 1, 2, 1), TrendOrder::linear), InsufficientDataError);
}

TEST(Standardize, Examples) {
  RVector two(2);
  two << 1.0, 3.0;
  const RMatrix s = standardize(single(two)).trial(0);
  EXPECT_NEAR(s(0, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s(0, 1), 1.0 / std::sqrt(2.0), 1e-15);

  const auto unit = standardize(test::white_noise(2, 3, 64, 4));
  const auto again = standardize(unit);
  for (std::size_t n = 0; n < unit.trials(); ++n) {
    EXPECT_LT((unit.trial(n) - again.trial(n)).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index p = 0; p < 3; ++p) {
      const RVector row = unit.trial(n).row(p).transpose();
      EXPECT_NEAR(row.mean(), 0.0, 1e-12);
      EXPECT_NEAR((row.array() - row.mean()).square().sum() / (row.size() - 1), 1.0, 1e-9);
    }
  }
}

TEST(Standardize, ConstantChannelNamed) {
  auto x = test::white_noise(3, 2, 16, 1);
  std::vector<RMatrix> trials = x.data();
  trials[1].row(1).setConstant(2.5);
  try {
    standardize(MultiTrialSeries(trials, 1.0));
    FAIL() << "expected DegenerateChannelError";
  } catch (const DegenerateChannelError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("trial 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("ch2"), std::string::npos) << msg;
  }
}

TEST(MultiTrialSeries, WithoutTrial) {
  const auto x = test::white_noise(4, 2, 8, 3);
  const auto y = x.without_trial(1);
  ASSERT_EQ(y.trials(), 3u);
  EXPECT_EQ(y.trial(1), x.trial(2));
}
