#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "nsindy/io.hpp"

using namespace nsindy;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("nsindy_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

Checkpoint random_checkpoint() {
  auto spec = make_prp({"sin", "cos", "exp", "log_safe"}, 2, 2, 6, 2, 2);
  auto p = flatten(spec);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 0.7);
  for (auto& v : p.values) v = n(rng);
  p.mask[2] = 0;
  p.apply_mask();
  TrainConfig c;
  c.epochs = 123;
  c.prune = PruneConfig{INFINITY, 0.05, 3, 30, 0};
  c.patience = PatienceConfig{1e-2, 50};
  c.lr_decay = LrDecay{0.999, 10};
  c.init.biases = false;
  auto ck = make_checkpoint(spec, p, 77, c, 122);
  ck.preset = "fn-2sinxcosy";
  ck.data_case = "fn-2sinxcosy";
  return ck;
}

}  // namespace

TEST_F(IoTest, CheckpointRoundTrip) {
  const auto ck = random_checkpoint();
  save_checkpoint(path("a.json"), ck);
  const auto back = load_checkpoint(path("a.json"));
  EXPECT_EQ(back, ck);
  const auto s1 = restore_network(ck), s2 = restore_network(back);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x = {u(rng), u(rng)};
    EXPECT_EQ(forward(s1, ck.params, x), forward(s2, back.params, x));
  }
}

TEST_F(IoTest, TruncatedCheckpoint) {
  const std::string text = checkpoint_to_json(random_checkpoint());
  write_text(path("t.json"), text.substr(0, text.size() / 2));
  EXPECT_THROW(load_checkpoint(path("t.json")), ParseError);
}

TEST_F(IoTest, VersionMismatch) {
  auto text = checkpoint_to_json(random_checkpoint());
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": \"99\"");
  EXPECT_THROW(checkpoint_from_json(text), VersionMismatchError);
}

TEST_F(IoTest, UnknownFieldsWarn) {
  auto text = checkpoint_to_json(random_checkpoint());
  text.insert(text.find('{') + 1, "\"future_field\": 3,");
  std::vector<std::string> warnings;
  EXPECT_EQ(checkpoint_from_json(text, &warnings), random_checkpoint());
  ASSERT_FALSE(warnings.empty());
  EXPECT_NE(warnings[0].find("future_field"), std::string::npos);
}

TEST_F(IoTest, WrongParameterCount) {
  auto ck = random_checkpoint();
  ck.params.values.pop_back();
  ck.params.mask.pop_back();
  EXPECT_THROW(checkpoint_from_json(checkpoint_to_json(ck)), ParseError);
}

TEST_F(IoTest, ConfigAndPresetRoundTrip) {
  for (const auto& id : preset_ids()) {
    const auto p = preset(id);
    EXPECT_EQ(preset_from_json(preset_to_json(p)), p) << id;
    for (const auto& s : p.stages) EXPECT_EQ(config_from_json(config_to_json(s)), s) << id;
  }
}

TEST_F(IoTest, SamplesRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  SampleSet s;
  s.arity = 2;
  for (int i = 0; i < 1000; ++i) {
    s.inputs.push_back(u(rng));
    s.inputs.push_back(u(rng) * 1e-9);
    s.targets.push_back(u(rng));
  }
  write_samples(path("s.csv"), s);
  const auto back = read_samples(path("s.csv"));
  EXPECT_EQ(back.arity, 2u);
  EXPECT_EQ(back.inputs, s.inputs);
  EXPECT_EQ(back.targets, s.targets);
  EXPECT_EQ(read_text(path("s.csv")).substr(0, 8), "x1,x2,y\n");
}

TEST_F(IoTest, SampleErrors) {
  write_text(path("empty.csv"), "");
  EXPECT_THROW(read_samples(path("empty.csv")), ParseError);
  write_text(path("header.csv"), "x1,x2,y\n");
  EXPECT_THROW(read_samples(path("header.csv")), ParseError);
  write_text(path("bad.csv"), "a,b\n1,2\n");
  try {
    read_samples(path("bad.csv"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
  write_text(path("ragged.csv"), "x1,y\n1,2\n3\n");
  try {
    read_samples(path("ragged.csv"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  write_text(path("text.csv"), "x1,y\n1,abc\n");
  EXPECT_THROW(read_samples(path("text.csv")), ParseError);
  EXPECT_THROW(read_samples(path("missing.csv")), std::runtime_error);
}

TEST_F(IoTest, TrajectoriesRoundTrip) {
  Rng rng(4);
  const auto d = generate_trajectories([](double x) { return std::sin(x * x); }, 7, 30, 0.0, 1.0, -3.0, 3.0, rng);
  write_trajectories(path("t.csv"), d);
  const auto back = read_trajectories(path("t.csv"));
  EXPECT_EQ(back.times, d.times);
  EXPECT_EQ(back.values, d.values);
  EXPECT_EQ(read_text(path("t.csv")).substr(0, 15), "trajectory,t,x\n");

  write_text(path("gap.csv"), "trajectory,t,x\n0,0,1\n0,1,2\n2,0,1\n2,1,2\n");
  EXPECT_THROW(read_trajectories(path("gap.csv")), ParseError);
  write_text(path("grid.csv"), "trajectory,t,x\n0,0,1\n0,1,2\n1,0,1\n1,2,2\n");
  EXPECT_THROW(read_trajectories(path("grid.csv")), ParseError);
}

TEST_F(IoTest, Report) {
  TrainReport r;
  EpochRecord e;
  e.epoch = 0;
  e.mse = 0.5;
  e.pruned = {1, 4};
  e.noise_steps = 2;
  r.history.push_back(e);
  write_report(path("r.csv"), r);
  const auto text = read_text(path("r.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,mse,lasso,lambda,active,event");
  EXPECT_NE(text.find("pruned=1 4;noise=2"), std::string::npos);
}
