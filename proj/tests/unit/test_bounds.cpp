#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bilip/bounds.hpp"
#include "bilip/flows.hpp"
#include "bilip/tvmetrics.hpp"

using namespace bilip;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

Point p1(double x) { return Point::Constant(1, x); }

}  // namespace

TEST(Theorem1, Examples) {
  const auto a = theorem1_bound(1.0, 0.5, {1.0, 1.0}, 1);
  EXPECT_NEAR(a.lower_bound_tv, 0.5 - 1.0 / (4.0 * std::sqrt(2.0 * std::numbers::pi)), 1e-15);
  EXPECT_NEAR(a.lower_bound_tv, 0.4002644, 1e-7);
  EXPECT_TRUE(a.valid);
  EXPECT_EQ(a.id, TheoremId::T1);
  EXPECT_EQ(a.witness.volume, 1.0);

  for (int d : {1, 3, 7}) {
    const double thr = std::pow(1.0 / (4.0 * std::sqrt(2.0 * std::numbers::pi)), d);
    const auto r = theorem1_bound(1.0, thr, {1.0, 1.0}, d);
    EXPECT_NEAR(r.raw_bound, 0.0, 1e-16);
    EXPECT_FALSE(theorem1_bound(1.0, thr * (1 - 1e-9), {1.0, 1.0}, d).valid);
  }
  EXPECT_NEAR(theorem1_bound(0.01, 0.9, {2.0, 1.0}, 3).lower_bound_tv,
              0.9 - 0.01 * std::pow(2.0 / (4.0 * std::sqrt(2.0 * std::numbers::pi)), 3), 1e-15);
  EXPECT_NEAR(theorem1_bound(0.01, 0.9, {2.0, 1.0}, 3).lower_bound_tv, 0.8999206, 1e-7);
}

TEST(Theorem1, MonotoneAndValidated) {
  EXPECT_GE(theorem1_bound(2.0, 0.5, {1.0, 2.0}, 2).raw_bound, theorem1_bound(2.0, 0.5, {1.5, 2.0}, 2).raw_bound);
  EXPECT_LE(theorem1_bound(2.0, 0.5, {1.0, 1.0}, 2).raw_bound, theorem1_bound(2.0, 0.5, {1.0, 2.0}, 2).raw_bound);
  EXPECT_THROW(theorem1_bound(0.0, 0.5, {1, 1}, 1), std::domain_error);
  EXPECT_THROW(theorem1_bound(1.0, 1.5, {1, 1}, 1), std::domain_error);
  EXPECT_THROW(theorem1_bound(1.0, 0.5, {-1, 1}, 1), std::domain_error);
  EXPECT_THROW(theorem1_bound(1.0, 0.5, {1, 1}, 0), std::domain_error);
}

// The subset bound exceeds the true TV for a flow that fits exactly: target
// N(0,1), identity flow (L1 = L2 = 1), A = [-0.5, 0.5].
TEST(Theorem1, CounterexampleWithExactFit) {
  const auto t = TargetDistribution::standard_gaussian();
  const auto id = PiecewiseLinearFlow1D::identity();
  const auto r = theorem1_bound(1.0, t.interval_mass_1d(-0.5, 0.5), certify_bilipschitz(id), 1);
  EXPECT_NEAR(r.lower_bound_tv, 0.2832, 1e-4);
  EXPECT_NEAR(tv_quadrature(t, id).value, 0.0, 1e-12);
}

TEST(Theorem2, SqrtPiExamples) {
  EXPECT_NEAR(theorem2_bound_sqrt_pi(0.9, 0.1, 1.0).lower_bound_tv, 0.9 - 0.1 / kSqrtPi, 1e-15);
  EXPECT_NEAR(theorem2_bound_sqrt_pi(0.9, 0.1, 1.0).lower_bound_tv, 0.8435810, 1e-7);
  const auto thr = theorem2_bound_sqrt_pi(0.3 / kSqrtPi, 0.3, 1.0);
  EXPECT_NEAR(thr.raw_bound, 0.0, 1e-16);
  EXPECT_FALSE(theorem2_bound_sqrt_pi(0.3 / kSqrtPi * (1 - 1e-12), 0.3, 1.0).valid);
  EXPECT_NEAR(theorem2_bound_sqrt_pi(1.0, 0.5, 0.1).lower_bound_tv, 0.9717905, 1e-7);
  EXPECT_THROW(theorem2_bound_sqrt_pi(0.5, 0.0, 1.0), std::domain_error);
}

TEST(Theorem2, Ball93Examples) {
  const auto a = theorem2_bound_ball93(0.99, 1e-3, 1.0, 3072);
  EXPECT_NEAR(a.lower_bound_tv, 0.99 - 4.0 * std::pow(3072.0, 0.25) * 1e-3, 1e-15);
  EXPECT_NEAR(a.lower_bound_tv, 0.9602, 1e-4);
  EXPECT_TRUE(a.strict);
  const auto z = theorem2_bound_ball93(0.0, 0.1, 1.0, 4);
  EXPECT_LT(z.raw_bound, 0.0);
  EXPECT_FALSE(z.valid);
  EXPECT_NEAR(theorem2_bound_ball93(0.5, 0.01, 2.0, 16).lower_bound_tv, 0.34, 1e-15);
  EXPECT_THROW(theorem2_bound_ball93(0.5, 0.01, 2.0, 1), std::domain_error);
}

TEST(Theorem2, MonotoneInL1AndRadius) {
  double prev = INFINITY;
  for (double l1 = 0.1; l1 < 20; l1 *= 1.3) {
    const double b = theorem2_bound_sqrt_pi(0.8, 0.2, l1).raw_bound;
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_GT(theorem2_bound_ball93(0.8, 0.01, 1.0, 5).raw_bound, theorem2_bound_ball93(0.8, 0.02, 1.0, 5).raw_bound);
}

TEST(Theorem3, Examples) {
  EXPECT_NEAR(theorem3_bound(0.0, 2.0, 1.0, 2).lower_bound_tv, 1.0 - std::exp(-2.0), 1e-12);
  const auto zero = theorem3_bound(0.3, 0.0, 1.0, 4);
  EXPECT_EQ(zero.raw_bound, -0.3);
  EXPECT_FALSE(zero.valid);
  EXPECT_NEAR(theorem3_bound(0.05, 3.0, 2.0, 1).lower_bound_tv, std::erf(3.0 / (2.0 * std::sqrt(2.0))) - 0.05, 1e-12);
  EXPECT_NEAR(theorem3_bound(0.05, 3.0, 2.0, 1).lower_bound_tv, 0.8163856, 1e-7);
}

TEST(Corollary, Examples) {
  EXPECT_NEAR(corollary_separated_modes(2.0, 1.0, 2).lower_bound_tv, 0.8646647, 1e-7);
  EXPECT_NEAR(corollary_separated_modes(1e-9, 1.0, 3).lower_bound_tv, 0.0, 1e-20);
  const auto u = corollary_separated_modes(2.0, 1.0, 784);
  EXPECT_EQ(u.lower_bound_tv, 0.0);
  EXPECT_TRUE(u.underflow);
  EXPECT_FALSE(u.valid);
  EXPECT_THROW(corollary_separated_modes(0.0, 1.0, 1), std::domain_error);
}

TEST(Corollary, EqualsTheorem3WithEmptyBall) {
  for (int d : {1, 2, 5, 50}) {
    for (double dist : {0.3, 1.0, 4.0}) {
      for (double l2 : {0.5, 1.0, 3.0}) {
        EXPECT_EQ(theorem3_bound(0.0, dist, l2, d).raw_bound, corollary_separated_modes(dist, l2, d).raw_bound);
      }
    }
  }
}

TEST(Corollary, MonotoneInL2DistanceAndDimension) {
  EXPECT_GT(corollary_separated_modes(2.0, 1.0, 3).raw_bound, corollary_separated_modes(2.0, 1.5, 3).raw_bound);
  EXPECT_LT(corollary_separated_modes(1.0, 1.0, 3).raw_bound, corollary_separated_modes(2.0, 1.0, 3).raw_bound);
  double prev = 1.0;
  for (int d = 1; d <= 60; ++d) {
    const double b = corollary_separated_modes(3.0, 1.0, d).raw_bound;
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(Mixture, Examples) {
  EXPECT_NEAR(mixture_bound(0.9, 0.1, 1.0, 1, 1.0).raw_bound, theorem2_bound_sqrt_pi(0.9, 0.1, 1.0).raw_bound, 1e-15);
  EXPECT_NEAR(mixture_bound(0.9, 0.1, 1.0, 4, 1.0).lower_bound_tv, 0.9 - 0.25 * 0.1 / kSqrtPi, 1e-15);
  EXPECT_NEAR(mixture_bound(0.9, 0.1, 1.0, 4, 1.0).lower_bound_tv, 0.8858953, 1e-7);
  EXPECT_NEAR(mixture_bound(0.9, 0.1, 1.0, 1000000000, 1.0).lower_bound_tv, 0.9, 1e-9);
  EXPECT_THROW(mixture_bound(0.9, 0.1, 1.0, 0, 1.0), std::domain_error);
  EXPECT_THROW(mixture_bound(0.9, 0.1, 1.0, 1, 0.0), std::domain_error);
}

TEST(Precision, Examples) {
  EXPECT_NEAR(precision_upper_bound(2.0, 1.0, 2), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(precision_upper_bound(1e-12, 1.0, 2), 1.0, 1e-15);
  EXPECT_NEAR(precision_upper_bound(5.0, 1.0, 1), std::erfc(5.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(precision_upper_bound(5.0, 1.0, 1), 5.733e-7, 1e-10);
  const auto r = precision_report(2.0, 1.0, 2);
  EXPECT_EQ(r.id, TheoremId::PREC);
  EXPECT_NEAR(r.lower_bound_tv, std::exp(-2.0), 1e-12);
}

TEST(Precision, TvFromPrecisionAndRecall) {
  EXPECT_EQ(tv_from_max_precision(1.0), 0.0);
  EXPECT_NEAR(tv_from_max_precision(0.3), 0.7, 1e-15);
  EXPECT_NEAR(tv_from_max_recall(0.95), 0.05, 1e-15);
  EXPECT_THROW(tv_from_max_precision(1.2), std::domain_error);
  EXPECT_THROW(tv_from_max_recall(-0.1), std::domain_error);
}

TEST(BoundReport, ClampsAboveOneAndKeepsRaw) {
  const auto r = theorem2_bound_sqrt_pi(1.0, 1e-300, 1.0);
  EXPECT_LE(r.lower_bound_tv, 1.0);
  const auto big = mixture_bound(1.0, 1.0, 1.0, 1, 1.0);
  EXPECT_EQ(big.lower_bound_tv, big.raw_bound);
  EXPECT_NE(parse_theorem_id("COR1"), TheoremId::T1);
  EXPECT_THROW(parse_theorem_id("T9"), std::invalid_argument);
  for (auto id : {TheoremId::T1, TheoremId::T2a, TheoremId::T2b, TheoremId::T3, TheoremId::COR1, TheoremId::MIX,
                  TheoremId::PREC}) {
    EXPECT_EQ(parse_theorem_id(to_string(id)), id);
  }
}

TEST(BoundReport, CsvRow) {
  const auto r = theorem2_bound_sqrt_pi(0.9, 0.1, 1.0);
  EXPECT_EQ(bound_csv_header(TheoremId::T2a),
            (CsvRow{"theorem_id", "mass_ball", "radius", "l1", "lower_bound_tv", "raw_bound", "valid"}));
  const auto row = to_csv_row(r);
  ASSERT_EQ(row.size(), 7u);
  EXPECT_EQ(row[0], "T2a");
  EXPECT_EQ(row[1], "0.90000000000000002");
  EXPECT_EQ(row[6], "true");
  EXPECT_EQ(bound_csv_header(TheoremId::PREC)[4], "max_precision_upper");
  EXPECT_EQ(bound_csv_header(TheoremId::MIX).size(), 9u);
}

TEST(SupSearch, FindsKnownMaximum) {
  // mass(R) - R / sqrt(pi) for a parabola-like mass: maximum at a known point.
  const BallBoundFn f = [](const Point& c, double r) {
    const double mass = std::min(1.0, 1.0 - (r - 0.7) * (r - 0.7));
    BoundReport rep = theorem2_bound_sqrt_pi(std::clamp(mass, 0.0, 1.0), r, 1.0);
    rep.witness.center = c;
    return rep;
  };
  const std::vector<Point> centers{p1(0.0)};
  RadiusSearch s;
  s.r_min = 1e-3;
  s.r_max = 2.0;
  s.grid = 50;
  const auto best = maximize_over_radius(f, centers, s);
  EXPECT_NEAR(best.witness.radius, 0.7 - 0.5 / kSqrtPi, 1e-7);
}

TEST(SupSearch, SpikeTargetUsesFullSpikeBall) {
  const auto t = TargetDistribution::dense_spike(0.9, 0.1);
  const auto best = sup_theorem2_sqrt_pi(t, 1.0);
  EXPECT_NEAR(best.witness.radius, 0.05, 1e-9);
  EXPECT_EQ(best.witness.center[0], 0.0);
  EXPECT_GE(best.lower_bound_tv, 0.9 - 0.05 / kSqrtPi);
  EXPECT_NEAR(best.lower_bound_tv, t.ball_mass_1d(0.0, 0.05) - 0.05 / kSqrtPi, 1e-12);
}

TEST(SupSearch, Theorem3OnSeparatedModes) {
  const auto t = TargetDistribution::separated_bimodal(2.0, 0.1);
  const auto best = sup_theorem3(t, p1(0.0), 1.0);
  EXPECT_NEAR(best.lower_bound_tv, std::erf(std::sqrt(2.0)), 1e-9);
  EXPECT_NEAR(best.witness.radius, 2.0, 1e-9);
}

TEST(SupSearch, Theorem1AndBall93UseTargetGeometry) {
  const auto t = TargetDistribution::dense_spike(0.9, 0.1);
  const auto t1 = sup_theorem1(t, {1.0, 1.0});
  EXPECT_EQ(t1.id, TheoremId::T1);
  EXPECT_NEAR(t1.witness.radius, 0.05, 1e-9);
  EXPECT_NEAR(t1.lower_bound_tv, t.ball_mass_1d(0.0, 0.05) - 0.1 / (4.0 * std::sqrt(2.0 * std::numbers::pi)), 1e-12);
  const TargetDistribution t2(2, {{0.9, Shape::uniform_ball, Point::Zero(2), 0.05},
                                  {0.1, Shape::gaussian, Point::Zero(2), 1.0}});
  const auto b = sup_theorem2_ball93(t2, 1.0);
  EXPECT_EQ(b.id, TheoremId::T2b);
  EXPECT_NEAR(b.witness.radius, 0.05, 1e-6);
  EXPECT_NEAR(b.lower_bound_tv, 0.9 + 0.1 * (1 - std::exp(-0.05 * 0.05 / 2)) - 4 * std::pow(2.0, 0.25) * 0.05, 1e-9);
  EXPECT_THROW(sup_theorem2_ball93(t, 1.0), std::domain_error);
}
