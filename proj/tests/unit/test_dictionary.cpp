#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsindy/dictionary.hpp"

using namespace nsindy;

namespace {

const BasisFunction& entry(const std::string& name) { return catalog()[*catalog().find(name)]; }

}  // namespace

TEST(Dictionary, CatalogValues) {
  EXPECT_EQ(eval(entry("sin"), 0.0), 0.0);
  EXPECT_NEAR(eval(entry("log_safe"), 0.0), -11.512925464970229, 1e-12);
  EXPECT_EQ(eval(entry("inv_quad"), 1.0), 0.5);
  EXPECT_EQ(eval(entry("exp"), 1000.0), std::exp(50.0));
  EXPECT_NEAR(eval(entry("softplus"), 800.0), 800.0, 1e-9);
  EXPECT_NEAR(eval(entry("sqrt_safe"), -4.0), std::sqrt(4.0 + 1e-5), 1e-15);
  EXPECT_EQ(eval(entry("sqrt_abs"), -4.0), 2.0);
  EXPECT_NEAR(eval(entry("exp_inv_quad"), 0.0), std::exp(1.0), 1e-15);
  EXPECT_NEAR(eval(entry("gauss"), 1.0), std::exp(-1.0), 1e-15);
}

TEST(Dictionary, CatalogDerivatives) {
  EXPECT_EQ(eval_derivative(entry("sin"), 0.0), 1.0);
  EXPECT_NEAR(eval_derivative(entry("log_safe"), 1.0), 1.0 / (1.0 + 1e-5), 1e-15);
  // Kinks use sign(0) = 0.
  EXPECT_EQ(eval_derivative(entry("log_safe"), 0.0), 0.0);
  EXPECT_EQ(eval_derivative(entry("sqrt_abs"), 0.0), 0.0);
  EXPECT_EQ(eval_derivative(entry("exp"), 60.0), 0.0);
}

TEST(Dictionary, CatalogNames) {
  const std::vector<std::string> expected = {"identity", "square",   "cube",     "arctan",       "sin",
                                             "cos",      "tanh",     "exp",      "log_safe",     "sqrt_safe",
                                             "inv_quad", "gauss",    "exp_inv_quad", "softplus", "sqrt_abs"};
  EXPECT_EQ(catalog().names(), expected);
}

TEST(Dictionary, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const double h = 1e-5;
  for (const auto& f : catalog().entries()) {
    for (int k = 0; k < 1000; ++k) {
      const double x = u(rng);
      bool near_kink = false;
      for (double kink : f.kinks) near_kink |= std::abs(x - kink) < 1e-3;
      if (near_kink) continue;
      const double fd = (eval(f, x + h) - eval(f, x - h)) / (2 * h);
      const double d = eval_derivative(f, x);
      ASSERT_LE(std::abs(d - fd) / std::max(1.0, std::abs(d)), 1e-5) << f.name << " at " << x;
    }
  }
}

TEST(Dictionary, FiniteOnExtremeInputs) {
  for (const auto& f : catalog().entries()) {
    for (double x : {-1e8, -1.0, 0.0, 1.0, 1e8}) {
      EXPECT_TRUE(std::isfinite(eval(f, x))) << f.name << " at " << x;
      EXPECT_TRUE(std::isfinite(eval_derivative(f, x))) << f.name << " at " << x;
    }
  }
}

TEST(Dictionary, SubsetKeepsOrder) {
  const auto d = make_dictionary({"sin", "cos"});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].name, "sin");
  EXPECT_EQ(d[1].name, "cos");

  const auto ode = make_dictionary({"identity", "square", "cube", "sin", "log_safe", "sqrt_safe"});
  EXPECT_EQ(ode.size(), 6u);
  EXPECT_EQ(ode[4].name, "log_safe");
}

TEST(Dictionary, UnknownNameIsReported) {
  try {
    make_dictionary({"sin", "frobnicate"});
    FAIL() << "expected UnknownBasisError";
  } catch (const UnknownBasisError& e) {
    EXPECT_EQ(e.name(), "frobnicate");
    EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
  }
}

TEST(Dictionary, DuplicateNamesRejected) {
  EXPECT_THROW(make_dictionary({"sin", "sin"}), std::invalid_argument);
}
