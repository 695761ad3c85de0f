#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EDGERECON_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t data_rows(const std::string& path) {
  const auto text = testutil::read_text(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

}  // namespace

TEST(Cli, GenTracesWritesTheDefaultHorizon) {
  testutil::TempDir dir("cli_gen");
  ASSERT_EQ(run_cli("gen-traces --seed 4 --out " + dir.path().string()), 0);
  EXPECT_EQ(data_rows(dir.file("cameras.csv")), 4000u);
  EXPECT_EQ(data_rows(dir.file("servers.csv")), 4000u);
  EXPECT_TRUE(std::filesystem::exists(dir.file("events.json")));
}

TEST(Cli, FramesFlagShortensTheTraces) {
  testutil::TempDir dir("cli_frames");
  ASSERT_EQ(run_cli("gen-traces --frames 10 --out " + dir.path().string()), 0);
  EXPECT_EQ(data_rows(dir.file("cameras.csv")), 10u);
  EXPECT_EQ(data_rows(dir.file("servers.csv")), 10u);
}

TEST(Cli, SameSeedSameFiles) {
  testutil::TempDir a("cli_a"), b("cli_b");
  ASSERT_EQ(run_cli("run --seed 12 --frames 500 --out " + a.path().string()), 0);
  ASSERT_EQ(run_cli("run --seed 12 --frames 500 --out " + b.path().string()), 0);
  for (const char* f : {"log.csv", "summary.json", "qtable_camera.json", "qtable_server.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a.file(f))) << f;
    EXPECT_EQ(testutil::read_text(a.file(f)), testutil::read_text(b.file(f))) << f;
  }
}

TEST(Cli, CompareWritesATablePerAxis) {
  testutil::TempDir dir("cli_cmp");
  ASSERT_EQ(run_cli("compare --axis server --frames 300 --seed 2 --out " + dir.path().string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir.file("table.txt")));
  EXPECT_TRUE(std::filesystem::exists(dir.file("adaptive_q/log.csv")));
}

TEST(Cli, RunAgainstSavedTraces) {
  testutil::TempDir traces("cli_traces"), out("cli_out"), cfg("cli_cfg");
  ASSERT_EQ(run_cli("gen-traces --frames 200 --out " + traces.path().string()), 0);
  testutil::write_text(cfg.file("c.json"), "{\"n_frames\": 200, \"traces\": {\"cameras\": \"" +
                                               traces.file("cameras.csv") + "\", \"servers\": \"" +
                                               traces.file("servers.csv") + "\"}}");
  EXPECT_EQ(run_cli("run --config " + cfg.file("c.json") + " --out " + out.path().string()), 0);
  EXPECT_EQ(data_rows(out.file("log.csv")), 200u);
}

TEST(Cli, ExitCodes) {
  testutil::TempDir dir("cli_codes");
  const auto out = " --out " + dir.file("o");
  EXPECT_EQ(run_cli("run"), 1);
  EXPECT_EQ(run_cli("launch" + out), 1);
  EXPECT_EQ(run_cli("compare" + out), 1);
  EXPECT_EQ(run_cli("run --frames 0" + out), 1);
  EXPECT_EQ(run_cli("compare --axis diagonal" + out), 1);

  testutil::write_text(dir.file("bad.json"), "{\"n_frames\": ");
  EXPECT_EQ(run_cli("run --config " + dir.file("bad.json") + out), 2);
  testutil::write_text(dir.file("unknown.json"), "{\"frames\": 10}");
  EXPECT_EQ(run_cli("run --config " + dir.file("unknown.json") + out), 2);

  testutil::write_text(dir.file("missing.json"),
                       "{\"traces\": {\"cameras\": \"/nonexistent/c.csv\", \"servers\": \"/nonexistent/s.csv\"}}");
  EXPECT_EQ(run_cli("run --config " + dir.file("missing.json") + out), 3);
  testutil::write_text(dir.file("cams.csv"), "frame,cam_1,cam_2,cam_3,cam_4,cam_5\n0,1,1,7,1,1\n");
  testutil::write_text(dir.file("srvs.csv"), "frame,srv_1_ms,srv_2_ms,srv_3_ms,srv_4_ms\n0,150,150,150,150\n");
  testutil::write_text(dir.file("corrupt.json"), "{\"n_frames\": 1, \"traces\": {\"cameras\": \"" +
                                                     dir.file("cams.csv") + "\", \"servers\": \"" +
                                                     dir.file("srvs.csv") + "\"}}");
  EXPECT_EQ(run_cli("run --config " + dir.file("corrupt.json") + out), 3);
}
