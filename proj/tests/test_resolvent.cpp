#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ppa/resolvent.hpp"
#include "ppa/spaces.hpp"

using namespace ppa;

namespace {

Point pt(double v) { return Point::vector({v}); }

std::shared_ptr<const GeodesicSpace> line() { return make_space(SpaceSpec::euclidean(1)); }

// Independent root of g'(y) = 2 c y e^{-y^2} + (y - x)/lambda for the
// gaussian well prox on the line, by bisection.
double gaussian_prox_root(double x, double lambda, double lo, double hi) {
  auto dg = [&](double y) { return 2.0 * y * std::exp(-y * y) + (y - x) / lambda; };
  REQUIRE(dg(lo) < 0.0);
  REQUIRE(dg(hi) > 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dg(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("resolve: closed forms on the line") {
  auto e1 = line();
  std::mt19937_64 rng(1);

  SUBCASE("half squared distance: J_1(2) = 1") {
    const Objective f = make_objective(e1, ObjectiveSpec::squared_distance(pt(0.0), 0.5));
    const auto res = resolve(*e1, f, 1.0, pt(2.0), {}, rng);
    CHECK(res.closed_form);
    CHECK(res.certified_gap == 0.0);
    CHECK(res.point.coords()[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("soft threshold: J_0.5(2) = 1.5 for |y|") {
    const Objective f = make_objective(e1, ObjectiveSpec::distance(pt(0.0)));
    const auto res = resolve(*e1, f, 0.5, pt(2.0), {}, rng);
    CHECK(res.point.coords()[0] == doctest::Approx(1.5).epsilon(1e-12));
    // Inside the threshold the prox lands exactly on the kink.
    const auto at_kink = resolve(*e1, f, 0.5, pt(0.3), {}, rng);
    CHECK(at_kink.point == pt(0.0));
  }
}

TEST_CASE("resolve: gaussian well prox matches two independent oracles") {
  auto e1 = line();
  std::mt19937_64 rng(2);
  const Objective f = make_objective(e1, ObjectiveSpec::gaussian_well(pt(0.0)));

  const double root = gaussian_prox_root(1.0, 0.25, 0.0, 1.0);
  const auto res = resolve(*e1, f, 0.25, pt(1.0), {}, rng);
  CHECK(!res.closed_form);
  CHECK(res.point.coords()[0] == doctest::Approx(root).epsilon(0).scale(1).epsilon(5e-6));

  const auto oracle = oracle_resolve(*e1, f, 0.25, pt(1.0), GridSpec{1e-6, 0.0, 4000000});
  CHECK(oracle.resolution <= 1e-6);
  CHECK(std::abs(oracle.point.coords()[0] - root) <= 2e-6);
  CHECK(e1->distance(res.point, oracle.point) <= 1e-5);
}

TEST_CASE("resolve: step-size validation") {
  auto e1 = line();
  std::mt19937_64 rng(3);
  const Objective well = make_objective(e1, ObjectiveSpec::gaussian_well(pt(0.0)));
  CHECK_THROWS_AS(resolve(*e1, well, 0.6, pt(1.0), {}, rng), StepSizeError);   // 0.6 >= 1/(2*1)
  CHECK_THROWS_AS(resolve(*e1, well, 0.5, pt(1.0), {}, rng), StepSizeError);   // boundary
  CHECK_THROWS_AS(resolve(*e1, well, -1.0, pt(1.0), {}, rng), StepSizeError);
  CHECK_NOTHROW(resolve(*e1, well, 0.49, pt(1.0), {}, rng));
  // Convex objectives (alpha = 0) admit any positive lambda.
  const Objective sq = make_objective(e1, ObjectiveSpec::squared_distance(pt(0.0)));
  CHECK_NOTHROW(resolve(*e1, sq, 100.0, pt(1.0), {}, rng));
}

TEST_CASE("resolve: budget exhaustion carries the best iterate") {
  auto ball = make_space(SpaceSpec::poincare_ball(2));
  std::mt19937_64 rng(4);
  const Objective f = make_objective(ball, ObjectiveSpec::gaussian_well(ball->origin()));
  ResolveOptions opts;
  opts.max_evaluations = 8;
  try {
    resolve(*ball, f, 0.3, Point::vector({0.5, 0.2}), opts, rng);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(ball->contains(e.best().point));
    CHECK(e.best().certified_gap > 0.0);
  }
}

TEST_CASE("oracle_resolve: reference cases") {
  auto e1 = line();

  SUBCASE("constant objective reduces to the nearest grid point") {
    Objective constant;
    constant.evaluator = [](const Point&) { return 42.0; };
    constant.description = "constant";
    const auto res = oracle_resolve(*e1, constant, 1.0, pt(0.7331), GridSpec{1e-4});
    CHECK(std::abs(res.point.coords()[0] - 0.7331) <= 1e-4);
  }

  SUBCASE("quadratic matches the closed form") {
    const Objective f = make_objective(e1, ObjectiveSpec::squared_distance(pt(0.0), 0.5));
    const auto res = oracle_resolve(*e1, f, 1.0, pt(2.0), GridSpec{1e-4});
    CHECK(std::abs(res.point.coords()[0] - 1.0) <= 1e-4);
    CHECK(res.resolution <= 1e-4);
  }

  SUBCASE("spider: prox of d(., (leg1,1)) from (leg0,2) walks one unit") {
    auto sp = make_space(SpaceSpec::spider(3));
    const Objective f = make_objective(sp, ObjectiveSpec::distance(Point::spider(1, 1.0)));
    const auto res = oracle_resolve(*sp, f, 1.0, Point::spider(0, 2.0), GridSpec{1e-4});
    CHECK(res.point.spider_coord().leg == 0);
    CHECK(std::abs(res.point.spider_coord().radius - 1.0) <= 1e-4);
  }

  SUBCASE("unsupported spaces raise capability errors") {
    auto prod = make_space(SpaceSpec::product({SpaceSpec::euclidean(1), SpaceSpec::spider(3)}));
    const Objective f = make_objective(prod, ObjectiveSpec::squared_distance(prod->origin()));
    CHECK_THROWS_AS(oracle_resolve(*prod, f, 1.0, prod->origin(), GridSpec{1e-2}),
                    CapabilityError);
    auto e3 = make_space(SpaceSpec::euclidean(3));
    const Objective f3 = make_objective(e3, ObjectiveSpec::squared_distance(e3->origin()));
    CHECK_THROWS_AS(oracle_resolve(*e3, f3, 1.0, e3->origin(), GridSpec{1e-2}), CapabilityError);
  }
}

TEST_CASE("resolve vs oracle_resolve across spaces and objectives") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<SpaceSpec> specs = {SpaceSpec::euclidean(1), SpaceSpec::euclidean(2),
                                        SpaceSpec::spider(3), SpaceSpec::poincare_ball(2)};
  int checked = 0;
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    for (int kind = 0; kind < 3; ++kind) {
      const Point target = space->sample(rng);
      const double c = 0.3 + 1.2 * unit(rng);
      ObjectiveSpec ospec = kind == 0   ? ObjectiveSpec::squared_distance(target, c)
                            : kind == 1 ? ObjectiveSpec::distance(target, c)
                                        : ObjectiveSpec::gaussian_well(target, c);
      const Objective f = make_objective(space, ospec);
      const double alpha = f.weak_convexity_alpha.value_or(0.0);
      const double lambda =
          alpha > 0.0 ? (0.1 + 0.5 * unit(rng)) / (2.0 * alpha) : 0.1 + 0.5 * unit(rng);
      const Point x = space->sample(rng);

      const auto res = resolve(*space, f, lambda, x, {}, rng);
      const auto oracle = oracle_resolve(*space, f, lambda, x, GridSpec{1e-4});
      const double mu = 0.5 / lambda - alpha;
      const double inner_tol = std::sqrt(res.certified_gap / mu);
      INFO(space->description(), " ", f.description, " lambda=", lambda);
      CHECK(space->distance(res.point, oracle.point) <= 1e-4 + inner_tol + 1e-9);
      ++checked;

      // Descent: the prox value never exceeds the stationary value.
      CHECK(res.proximal_value <= f(x) + 1e-12 * (1.0 + std::abs(f(x))));
    }
  }
  CHECK(checked == 12);
}

TEST_CASE("resolve: slope bound, uniqueness, fixed point") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<SpaceSpec> specs = {SpaceSpec::euclidean(2), SpaceSpec::spider(3),
                                        SpaceSpec::poincare_ball(2)};
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    const Point target = space->sample(rng);
    const Objective well = make_objective(space, ObjectiveSpec::gaussian_well(target));

    for (int i = 0; i < 5; ++i) {
      const double lambda = 0.1 + 0.3 * unit(rng);
      const Point x = space->sample(rng);
      const auto res = resolve(*space, well, lambda, x, {}, rng);

      // |df|(J) <= d(x,J)/lambda up to estimator error; finite-radius ratios
      // overshoot the limsup by O(r) on concave stretches, so probe with
      // shells well below the 1e-3 error budget.
      ProbeOptions tight;
      tight.base_radius_factor = 1e-5;
      const auto slope = slope_estimate(*space, well, res.point, tight, rng);
      CHECK(slope.value <= space->distance(x, res.point) / lambda + 1e-3);

      // Re-solving from a different start lands at the same point.
      ResolveOptions from_target;
      from_target.start = target;
      const auto res2 = resolve(*space, well, lambda, x, from_target, rng);
      const double mu = 0.5 / lambda - 1.0 * well.weak_convexity_alpha.value_or(0.0);
      const double tol10 =
          10.0 * (std::sqrt(res.certified_gap / mu) + std::sqrt(res2.certified_gap / mu));
      CHECK(space->distance(res.point, res2.point) <= tol10 + 1e-12);
    }

    // Fixed point at the known minimizer.
    const auto fixed = resolve(*space, well, 0.25, target, {}, rng);
    CHECK(space->distance(fixed.point, target) <= 1e-5);
  }
}

TEST_CASE("check_projection_property: prox is the sublevel-set projection") {
  auto e1 = line();
  std::mt19937_64 rng(7);

  SUBCASE("half quadratic from x=2: J=1, sublevel [-1,1]") {
    const Objective f = make_objective(e1, ObjectiveSpec::squared_distance(pt(0.0), 0.5));
    const auto res = resolve(*e1, f, 1.0, pt(2.0), {}, rng);
    const auto report = check_projection_property(*e1, f, 1.0, pt(2.0), res, 200, 11);
    CHECK(!report.inconclusive);
    CHECK(report.accepted_samples > 100);
    CHECK(report.passed);
    CHECK(report.max_quasi_inner <= report.threshold);
  }

  SUBCASE("gaussian well, generic solver path") {
    const Objective f = make_objective(e1, ObjectiveSpec::gaussian_well(pt(0.0)));
    const auto res = resolve(*e1, f, 0.25, pt(1.0), {}, rng);
    const auto report = check_projection_property(*e1, f, 0.25, pt(1.0), res, 200, 13);
    CHECK(report.passed);
  }

  SUBCASE("curved spaces") {
    for (const auto& spec : {SpaceSpec::spider(3), SpaceSpec::poincare_ball(2)}) {
      auto space = make_space(spec);
      const Point target = space->sample(rng);
      const Objective f = make_objective(space, ObjectiveSpec::squared_distance(target));
      const Point x = space->sample(rng);
      const auto res = resolve(*space, f, 0.4, x, {}, rng);
      const auto report = check_projection_property(*space, f, 0.4, x, res, 100, 17);
      INFO(space->description(), " max qi ", report.max_quasi_inner, " thr ", report.threshold);
      CHECK(report.passed);
    }
  }
}
