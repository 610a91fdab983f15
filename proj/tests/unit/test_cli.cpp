#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "nsindy/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = nsindy::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("nsindy_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenFunctionData) {
  const auto r = run({"gen", "--case", "fn-cos-x2", "--n", "10000", "--seed", "1", "--out", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(nsindy::read_text(path("d.csv"))), 10001u);
  EXPECT_NE(r.out.find("10000"), std::string::npos);
}

TEST_F(CliTest, GenTrajectories) {
  const auto r = run({"gen", "--case", "ode-gompertz", "--seed", "2", "--out", path("g.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = nsindy::read_trajectories(path("g.csv"));
  EXPECT_EQ(d.trajectories(), 100u);
  EXPECT_EQ(d.points(), 500u);
}

TEST_F(CliTest, GenErrors) {
  EXPECT_EQ(run({"gen", "--case", "fn-cos-x2"}).code, nsindy::cli::kUsage);
  const auto r = run({"gen", "--case", "nope", "--out", path("x.csv")});
  EXPECT_EQ(r.code, nsindy::cli::kUsage);
  EXPECT_NE(r.err.find("fn-cos-x2"), std::string::npos);
  EXPECT_EQ(run({}).code, nsindy::cli::kUsage);
}

TEST_F(CliTest, FitEvalExportCurve) {
  ASSERT_EQ(run({"gen", "--case", "fn-cos-x2", "--n", "300", "--seed", "1", "--out", path("d.csv")}).code, 0);
  const std::vector<std::string> fit = {"fit",    "--preset", "fn-cos-x2-pr", "--data", path("d.csv"), "--epochs",
                                        "5",      "--seeds",  "2",            "--out",  path("o"),     "--threads",
                                        "1"};
  fs::create_directories(path("o"));
  const auto r = run(fit);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("formula: "), std::string::npos);
  EXPECT_TRUE(fs::exists(path("o/seed-1.json")));
  EXPECT_TRUE(fs::exists(path("o/seed-2.report.csv")));
  EXPECT_EQ(lines(nsindy::read_text(path("o/seed-1.report.csv"))), 6u);

  const auto e = run({"eval", "--checkpoint", path("o/seed-1.json"), "--data", path("d.csv")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("mse: "), std::string::npos);
  EXPECT_NE(e.out.find("active parameters: "), std::string::npos);

  const auto x = run({"export", "--checkpoint", path("o/seed-1.json"), "--decimals", "2"});
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_FALSE(x.out.empty());

  const auto c = run({"curve", "--checkpoint", path("o/seed-1.json"), "--domain", "0,3", "--n", "300"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(lines(c.out), 301u);
  EXPECT_EQ(c.out.substr(0, 15), "x,model,target\n");
}

TEST_F(CliTest, PerfectCheckpointEvaluatesToZero) {
  auto spec = nsindy::make_pr({"cos"}, 1, 2, 1);
  auto p = nsindy::flatten(spec);
  std::fill(p.values.begin(), p.values.end(), 0.0);
  p.values[spec.linear_1.weight_offset + 1] = 1.0;
  p.values[spec.linear_2.weight_offset] = 1.0;
  nsindy::save_checkpoint(path("c.json"), nsindy::make_checkpoint(spec, p, 1, {}, 0));
  ASSERT_EQ(run({"gen", "--case", "fn-cos-x2", "--n", "500", "--out", path("d.csv")}).code, 0);
  const auto e = run({"eval", "--checkpoint", path("c.json"), "--data", path("d.csv")});
  ASSERT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("mse: 0\n"), std::string::npos) << e.out;

  ASSERT_EQ(run({"gen", "--case", "fn-2sinxcosy", "--n", "50", "--out", path("d2.csv")}).code, 0);
  EXPECT_EQ(run({"eval", "--checkpoint", path("c.json"), "--data", path("d2.csv")}).code, nsindy::cli::kDataError);
  EXPECT_EQ(run({"eval", "--checkpoint", path("missing.json"), "--data", path("d.csv")}).code,
            nsindy::cli::kDataError);
}

TEST_F(CliTest, SeedsZeroIsUsageError) {
  EXPECT_EQ(run({"fit", "--preset", "fn-cos-x2-pr", "--seeds", "0", "--out", path("o")}).code, nsindy::cli::kUsage);
  EXPECT_EQ(run({"fit", "--preset", "fn-cos-x2-pr", "--patience", "x:y:z", "--out", path("o")}).code,
            nsindy::cli::kUsage);
}

TEST_F(CliTest, FitIsDeterministic) {
  ASSERT_EQ(run({"gen", "--case", "ode-sinx2", "--n", "10", "--seed", "3", "--out", path("t.csv")}).code, 0);
  auto once = [&](const std::string& dir) {
    fs::create_directories(path(dir));
    const auto r = run({"fit", "--preset", "ode-sinx2", "--data", path("t.csv"), "--epochs", "3", "--seeds", "2",
                        "--out", path(dir), "--threads", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    return r.out + nsindy::read_text(path(dir + "/seed-2.json")) + nsindy::read_text(path(dir + "/seed-2.report.csv"));
  };
  EXPECT_EQ(once("a"), once("b"));
}

TEST_F(CliTest, PrintConfigRoundTrips) {
  for (const auto& id : nsindy::preset_ids()) {
    const auto r = run({"fit", "--preset", id, "--print-config"});
    ASSERT_EQ(r.code, 0) << id << r.err;
    EXPECT_EQ(nsindy::preset_from_json(r.out), nsindy::preset(id)) << id;
    nsindy::write_text(path(id + ".json"), r.out);
    const auto again = run({"fit", "--config", path(id + ".json"), "--print-config"});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(again.out, r.out);
  }
  const auto o = run({"fit", "--preset", "fn-cos-x2-pr", "--epochs", "7", "--init", "normal:0:1.5:weights",
                      "--print-config"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto p = nsindy::preset_from_json(o.out);
  EXPECT_EQ(p.stages[0].epochs, 7);
  EXPECT_FALSE(p.stages[0].init.biases);
}
