#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nsindy/cases.hpp"

using namespace nsindy;

namespace {

// Trapezoid rule over one full period, refined once with Richardson extrapolation.
double perimeter_oracle(double a) {
  auto trapezoid = [a](int n) {
    const double h = 2.0 * std::numbers::pi / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = i * h;
      s += std::sqrt(a * a * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t));
    }
    return s * h;
  };
  const double coarse = trapezoid(2000), fine = trapezoid(4000);
  return fine + (fine - coarse) / 3.0;
}

}  // namespace

TEST(Ellipse, Perimeter) {
  EXPECT_NEAR(ellipse_perimeter(1.0), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(ellipse_perimeter(5.0), perimeter_oracle(5.0), 1e-8);
  EXPECT_NEAR(ellipse_perimeter(30.0), perimeter_oracle(30.0), 1e-8 * 30.0);
  double previous = ellipse_perimeter(1.0);
  for (double a = 1.5; a <= 30.0; a += 0.5) {
    const double p = ellipse_perimeter(a);
    EXPECT_GT(p, previous);
    previous = p;
  }
  EXPECT_NEAR(ellipse_perimeter(30.0, 4096), ellipse_perimeter(30.0, 8192), 1e-10 * ellipse_perimeter(30.0));
}

TEST(Ellipse, Ramanujan) {
  EXPECT_DOUBLE_EQ(ramanujan_perimeter(1.0, 1.0), 2.0 * std::numbers::pi);
  EXPECT_NEAR(ramanujan_perimeter(5.0, 1.0), std::numbers::pi * (18.0 - std::sqrt(128.0)), 1e-12);
  EXPECT_NEAR(ramanujan_perimeter(5.0, 1.0), 21.005604, 1e-6);
}

TEST(Reference, LearnedCosineRelativeError) {
  const Expr learned = reference_formula("fn-cos-x2-pr");
  const double rel = relative_grid_mse([&](double x) { return eval_expr(learned, std::vector<double>{x}); },
                                       [](double x) { return std::cos(x * x); }, 0.0, 3.0);
  EXPECT_NEAR(rel, 4.92e-7, 0.05 * 4.92e-7);
}

TEST(Reference, EllipseTable) {
  auto ram = [](double a) { return ramanujan_perimeter(a, 1.0); };
  auto quad = [](double a) { return ellipse_perimeter(a); };
  EXPECT_NEAR(grid_mse(ram, quad, 1.0, 5.0, 1000), 2.78e-6, 0.1 * 2.78e-6);
  const Expr model1 = reference_formula("ellipse-quadratic");
  // End-of-training MSE of this quadratic before any coefficient tuning.
  EXPECT_NEAR(grid_mse([&](double a) { return eval_expr(model1, std::vector<double>{a}); }, quad, 1.0, 5.0, 1000),
              2.26e-3, 0.01 * 2.26e-3);
  const Expr interp = reference_formula("ellipse-interpolation");
  auto line = [&](double a) { return eval_expr(interp, std::vector<double>{a}); };
  EXPECT_NEAR(line(1.0), ellipse_perimeter(1.0), 1e-9);
  EXPECT_NEAR(line(30.0), ellipse_perimeter(30.0), 1e-9);
  EXPECT_NEAR(grid_mse(line, quad, 1.0, 30.0, 1000), 5.46e-1, 0.1 * 5.46e-1);
  const Expr short_line = ellipse_interpolation(1.0, 5.0);
  auto line5 = [&](double a) { return eval_expr(short_line, std::vector<double>{a}); };
  EXPECT_NEAR(grid_mse(line5, quad, 1.0, 5.0, 1000), 4.70e-2, 0.1 * 4.70e-2);
  EXPECT_LT(grid_mse(ram, quad, 1.0, 5.0, 1000), grid_mse(line5, quad, 1.0, 5.0, 1000));
  EXPECT_LT(grid_mse(ram, quad, 1.0, 30.0, 1000), grid_mse(line, quad, 1.0, 30.0, 1000));
}

TEST(Reference, TwoVariableFormulaAtOrigin) {
  const double expected = -0.77 * std::pow(1 - 0.612 * std::sin(-0.14), 2) + 2.01 * std::pow(std::cos(0.809), 2);
  EXPECT_NEAR(eval_expr(reference_formula("fn-2sinxcosy"), std::vector<double>{0.0, 0.0}), expected, 1e-14);
}

TEST(Reference, AllIdsResolve) {
  for (const auto& id : reference_formula_ids()) EXPECT_NO_THROW(reference_formula(id)) << id;
  EXPECT_THROW(reference_formula("nope"), UnknownCaseError);
}

TEST(Datasets, FunctionCases) {
  Rng rng(1);
  const auto cos2 = make_samples(dataset_spec("fn-cos-x2"), rng);
  ASSERT_EQ(cos2.size(), 10000u);
  for (std::size_t i = 0; i < cos2.size(); ++i) {
    const double x = cos2.inputs[i];
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 3.0);
    EXPECT_EQ(cos2.targets[i], std::cos(x * x));
  }
  const auto sc = make_samples(dataset_spec("fn-2sinxcosy"), rng);
  EXPECT_EQ(sc.arity, 2u);
  for (std::size_t i = 0; i < sc.size(); i += 97) {
    const auto in = sc.input(i);
    EXPECT_LE(std::abs(in[0]), 2.0);
    EXPECT_LE(std::abs(in[1]), 2.0);
    EXPECT_EQ(sc.targets[i], 2.0 * std::sin(in[0]) * std::cos(in[1]));
  }
  const auto el = make_samples(dataset_spec("fn-ellipse-small"), rng);
  EXPECT_EQ(el.size(), 1000u);
  EXPECT_NEAR(el.targets[0], perimeter_oracle(el.inputs[0]), 1e-8);
}

TEST(Datasets, OdeCases) {
  Rng rng(2);
  const auto s = make_trajectories(dataset_spec("ode-sinx2"), rng);
  EXPECT_EQ(s.trajectories(), 100u);
  EXPECT_EQ(s.points(), 500u);
  const auto g = make_trajectories(dataset_spec("ode-gompertz"), rng);
  for (std::size_t k = 0; k < g.trajectories(); ++k) {
    EXPECT_GT(g.initial(k), 0.0);
    EXPECT_LE(g.initial(k), 3.0);
  }
  EXPECT_NEAR(g.times.back(), 2.0, 1e-12);
}

TEST(Datasets, Deterministic) {
  Rng a(9), b(9);
  EXPECT_EQ(make_samples(dataset_spec("fn-cos-x2"), a).inputs, make_samples(dataset_spec("fn-cos-x2"), b).inputs);
}

TEST(Presets, ShapesAndIds) {
  for (const auto& id : preset_ids()) {
    const auto p = preset(id);
    EXPECT_EQ(p.id, id);
    EXPECT_FALSE(p.stages.empty());
    for (const auto& s : p.stages) EXPECT_NO_THROW(s.validate());
    EXPECT_NO_THROW(build_network(p.arch));
  }
  EXPECT_EQ(build_network(preset("fn-cos-x2-pr").arch).parameter_count(), 36u);
  EXPECT_EQ(build_network(preset("ode-sinx2").arch).parameter_count(), 25u);
  const auto gomp = build_network(preset("ode-gompertz").arch);
  EXPECT_EQ(gomp.width(), 2u);
  EXPECT_EQ(gomp.dictionary[gomp.radial.node_functions[0]].name, "log_safe");
  EXPECT_EQ(gomp.dictionary[gomp.radial.node_functions[1]].name, "identity");
  EXPECT_EQ(gomp.poly_out.size(), 5u);
}

TEST(Presets, UnknownIdListsChoices) {
  try {
    preset("fn-nothing");
    FAIL();
  } catch (const UnknownCaseError& e) {
    EXPECT_NE(std::string(e.what()).find("fn-cos-x2-pr"), std::string::npos);
  }
}

TEST(Presets, TrainingIsDeterministic) {
  auto p = preset("fn-cos-x2-pr");
  p.stages[0].epochs = 3;
  p.data.n = 200;
  Rng rng(1);
  const auto data = make_samples(p.data, rng);
  auto a = build_network(p.arch), b = build_network(p.arch);
  auto ra = train_preset(p, a, data, 11), rb = train_preset(p, b, data, 11);
  EXPECT_EQ(ra, rb);
  EXPECT_EQ(ra.history.size(), 3u);
}
