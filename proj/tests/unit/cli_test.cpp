#include "flowsep/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowsep/freqdata.hpp"
#include "flowsep/textio.hpp"

namespace flowsep {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("flowsep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }
  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SweepDefaultsWriteFullRecord) {
  ASSERT_EQ(run({"sweep", "--out-dir", path("s")}), 0) << err_.str();
  const auto ts = read_time_series_csv(path("s/sweep.csv"));
  EXPECT_EQ(ts.size(), 225000u);
  EXPECT_TRUE(fs::exists(path("s/manifest.json")));
}

TEST_F(CliTest, SweepZeroAmplitudeIsConstant) {
  write("cfg.txt", "[sweep]\nduration = 2\namplitude = 0\noffset = 0.4\n");
  ASSERT_EQ(run({"sweep", "--config", path("cfg.txt"), "--out-dir", path("s")}), 0);
  for (double v : read_time_series_csv(path("s/sweep.csv")).values) EXPECT_EQ(v, 0.4);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"sweep", "--config", path("missing.txt"), "--out-dir", path("s")}), 2);
  EXPECT_FALSE(err_.str().empty());
  write("bad.txt", "[sweep]\nf_max = 900\n");
  EXPECT_EQ(run({"sweep", "--config", path("bad.txt"), "--out-dir", path("s")}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"identify", "--u", path("u.csv")}), 2);
}

TEST_F(CliTest, IdentifyWireAndErrors) {
  TimeSeries u;
  u.dt = 0.01;
  for (int k = 0; k < 20000; ++k) u.values.push_back(std::sin(0.001 * k * k * 0.01));
  write_time_series_csv(path("u.csv"), u);
  ASSERT_EQ(run({"identify", "--u", path("u.csv"), "--y", path("u.csv"), "--n-out", "8", "--f-lo",
                 "0.5", "--f-hi", "2", "--segment", "2048", "--out-dir", path("id")}),
            0)
      << err_.str();
  const auto frf = read_frf_csv(path("id/frf.csv"));
  for (const auto& s : frf.samples()) {
    EXPECT_NEAR(std::abs(s.value - 1.0), 0.0, 1e-9);
  }
  TimeSeries shorter = u;
  shorter.values.resize(10000);
  write_time_series_csv(path("y_short.csv"), shorter);
  EXPECT_EQ(run({"identify", "--u", path("u.csv"), "--y", path("y_short.csv"), "--out-dir",
                 path("id2")}),
            2);
  TimeSeries flat = u;
  for (auto& v : flat.values) v = 1.0;
  write_time_series_csv(path("flat.csv"), flat);
  EXPECT_EQ(run({"identify", "--u", path("flat.csv"), "--y", path("u.csv"), "--f-lo", "0.5",
                 "--out-dir", path("id3")}),
            3);
}

TEST_F(CliTest, DesignRejectsOrderAboveMinimal) {
  FrequencyResponseSet frf({{0.5, {1.0, -0.5}}, {1.0, {0.5, -0.5}}, {2.0, {0.2, -0.4}},
                            {4.0, {0.06, -0.24}}});
  write_frf_csv(path("frf.csv"), frf);
  EXPECT_EQ(run({"design-lddc", "--frf", path("frf.csv"), "--order", "50", "--out-dir",
                 path("d")}),
            2);
  EXPECT_EQ(run({"design-lddc", "--frf", path("frf.csv"), "--order", "1", "--out-dir",
                 path("d")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(path("d/model_sampled.txt")));
}

TEST_F(CliTest, ReplayReproducesOutputs) {
  write("cfg.txt", "[scenario]\nduration = 5\n[plant]\nnoise_std = 0.005\n");
  ASSERT_EQ(run({"simulate", "--mode", "aic", "--config", path("cfg.txt"), "--seed", "4",
                 "--out-dir", path("a")}),
            0)
      << err_.str();
  EXPECT_EQ(run({"replay", "--manifest", path("a/manifest.json"), "--out-dir", path("b")}), 0)
      << err_.str();
  // Editing an input after the fact is detected.
  write("cfg.txt", "[scenario]\nduration = 6\n");
  EXPECT_NE(run({"replay", "--manifest", path("a/manifest.json"), "--out-dir", path("c")}), 0);
}

TEST_F(CliTest, FileDigestIsStable) {
  write("x.txt", "abc");
  EXPECT_EQ(file_digest(path("x.txt")), file_digest(path("x.txt")));
  EXPECT_EQ(file_digest(path("x.txt")).size(), 16u);
  // FNV-1a 64 of "abc".
  EXPECT_EQ(file_digest(path("x.txt")), "e71fa2190541574b");
}

TEST(CliBinary, RunsAsProcess) {
  const std::string cmd = std::string(FLOWSEP_CLI_PATH) + " --help > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}

}  // namespace
}  // namespace flowsep
