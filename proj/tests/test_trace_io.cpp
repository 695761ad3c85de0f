#include <gtest/gtest.h>

#include "edgerecon/trace_io.hpp"
#include "test_util.hpp"

using namespace edgerecon;

namespace {

DisruptionTraces default_traces(std::uint64_t seed) {
  DisruptionParams p;
  p.seed = seed;
  return generate_traces(p);
}

std::size_t parse_line(const std::string& path) {
  try {
    load_camera_trace(path);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(TraceIo, RoundTripIsLossless) {
  testutil::TempDir dir("roundtrip");
  const auto t = default_traces(11);
  save_traces(t, dir.path().string());
  const auto back = load_traces(dir.path().string());
  EXPECT_TRUE(back.cameras.same_matrix(t.cameras));
  EXPECT_TRUE(back.servers.same_matrix(t.servers));
}

TEST(TraceIo, HeadersFollowTheFileLayout) {
  testutil::TempDir dir("headers");
  save_traces(default_traces(1), dir.path().string());
  const auto cams = testutil::read_text(dir.file("cameras.csv"));
  const auto srvs = testutil::read_text(dir.file("servers.csv"));
  EXPECT_EQ(cams.substr(0, cams.find('\n')), "frame,cam_1,cam_2,cam_3,cam_4,cam_5");
  EXPECT_EQ(srvs.substr(0, srvs.find('\n')), "frame,srv_1_ms,srv_2_ms,srv_3_ms,srv_4_ms");
}

TEST(TraceIo, NonBinaryCellIsAParseErrorWithLineNumber) {
  testutil::TempDir dir("nonbinary");
  const auto path = dir.file("cameras.csv");
  testutil::write_text(path, "frame,cam_1,cam_2\n0,1,1\n1,1,2\n2,0,1\n");
  EXPECT_THROW(load_camera_trace(path), ParseError);
  EXPECT_EQ(parse_line(path), 3u);
}

TEST(TraceIo, WrongCellCountIsAParseError) {
  testutil::TempDir dir("cells");
  const auto path = dir.file("cameras.csv");
  testutil::write_text(path, "frame,cam_1,cam_2\n0,1,1\n1,1\n");
  EXPECT_EQ(parse_line(path), 3u);
}

TEST(TraceIo, BadHeaderIsAParseErrorOnLineOne) {
  testutil::TempDir dir("header");
  const auto path = dir.file("cameras.csv");
  testutil::write_text(path, "t,c1,c2\n0,1,1\n");
  EXPECT_EQ(parse_line(path), 1u);
}

TEST(TraceIo, FrameColumnOutOfSequenceIsASchemaError) {
  testutil::TempDir dir("sequence");
  const auto path = dir.file("cameras.csv");
  testutil::write_text(path, "frame,cam_1,cam_2\n0,1,1\n2,1,1\n");
  EXPECT_THROW(load_camera_trace(path), SchemaError);
}

TEST(TraceIo, FrameCountMismatchBetweenFilesIsASchemaError) {
  testutil::TempDir dir("mismatch");
  testutil::write_text(dir.file("cameras.csv"), "frame,cam_1,cam_2\n0,1,1\n1,1,1\n");
  testutil::write_text(dir.file("servers.csv"), "frame,srv_1_ms\n0,150\n");
  EXPECT_THROW(load_traces(dir.path().string()), SchemaError);
}

TEST(TraceIo, NegativeLatencyIsAParseError) {
  testutil::TempDir dir("negative");
  const auto path = dir.file("servers.csv");
  testutil::write_text(path, "frame,srv_1_ms\n0,150\n1,-3\n");
  try {
    load_server_trace(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(TraceIo, MissingFileIsATraceError) {
  EXPECT_THROW(load_camera_trace("/nonexistent/dir/cameras.csv"), TraceError);
}

TEST(TraceIo, CrlfInputIsAccepted) {
  testutil::TempDir dir("crlf");
  const auto path = dir.file("cameras.csv");
  testutil::write_text(path, "frame,cam_1,cam_2\r\n0,1,0\r\n1,0,1\r\n");
  const auto t = load_camera_trace(path);
  EXPECT_EQ(t.frames, 2);
  EXPECT_EQ(t.at(0, 1), 0);
  EXPECT_EQ(t.at(1, 0), 0);
}
