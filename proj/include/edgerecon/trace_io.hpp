#pragma once

// cameras.csv:  frame,cam_1,...,cam_N      rows of 0/1
// servers.csv:  frame,srv_1_ms,...,srv_M_ms rows of nonnegative decimals
//
// The frame column must count 0, 1, 2, ... in order. Latencies are written in
// shortest round-trip form so save/load is lossless.

#include <filesystem>
#include <string>
#include <utility>

#include "edgerecon/csv.hpp"
#include "edgerecon/disruption.hpp"

namespace edgerecon {

inline constexpr const char* kCamerasFile = "cameras.csv";
inline constexpr const char* kServersFile = "servers.csv";

inline void save_camera_trace(const CameraTrace& trace, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "frame";
  for (int c = 1; c <= trace.n_cameras; ++c) out << ",cam_" << c;
  out << '\n';
  for (int t = 0; t < trace.frames; ++t) {
    out << t;
    for (int c = 0; c < trace.n_cameras; ++c) out << ',' << static_cast<int>(trace.at(t, c));
    out << '\n';
  }
  if (!out) throw TraceError("write failed for '" + path + "'");
}

inline void save_server_trace(const ServerLatencyTrace& trace, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "frame";
  for (int s = 1; s <= trace.n_servers; ++s) out << ",srv_" << s << "_ms";
  out << '\n';
  for (int t = 0; t < trace.frames; ++t) {
    out << t;
    for (int s = 0; s < trace.n_servers; ++s) out << ',' << csv::format_double(trace.at(t, s));
    out << '\n';
  }
  if (!out) throw TraceError("write failed for '" + path + "'");
}

namespace detail {

/// Checks `frame,<prefix>1<suffix>,...` and returns the column count.
inline int check_trace_header(const std::string& path, const std::string& line,
                              std::string_view prefix, std::string_view suffix) {
  const auto cells = csv::split(line);
  if (cells.size() < 2 || cells[0] != "frame")
    throw ParseError(path, 1, "header must start with 'frame' and name at least one column");
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const std::string expected = std::string(prefix) + std::to_string(i) + std::string(suffix);
    if (cells[i] != expected)
      throw ParseError(path, 1, "header column " + std::to_string(i + 1) + " is '" +
                                    std::string(cells[i]) + "', expected '" + expected + "'");
  }
  return static_cast<int>(cells.size() - 1);
}

inline void check_frame_cell(const std::string& path, std::size_t line_no, std::string_view cell,
                             int expected) {
  long long frame = 0;
  if (!csv::parse_int(cell, frame))
    throw ParseError(path, line_no, "frame cell '" + std::string(cell) + "' is not an integer");
  if (frame != expected)
    throw SchemaError(path + ":" + std::to_string(line_no) + ": frame index " +
                      std::to_string(frame) + " does not match row position " +
                      std::to_string(expected));
}

}  // namespace detail

inline CameraTrace load_camera_trace(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path, 1, "empty file");
  const int n = detail::check_trace_header(path, lines[0], "cam_", "");
  if (n > kMaxCameras) throw SchemaError(path + ": more than 32 camera columns");
  const int frames = static_cast<int>(lines.size()) - 1;
  if (frames == 0) throw SchemaError(path + ": no frame rows");
  CameraTrace trace(frames, n);
  for (int t = 0; t < frames; ++t) {
    const std::size_t line_no = static_cast<std::size_t>(t) + 2;
    const auto cells = csv::split(lines[static_cast<std::size_t>(t) + 1]);
    if (cells.size() != static_cast<std::size_t>(n) + 1)
      throw ParseError(path, line_no, "expected " + std::to_string(n + 1) + " cells, got " +
                                          std::to_string(cells.size()));
    detail::check_frame_cell(path, line_no, cells[0], t);
    for (int c = 0; c < n; ++c) {
      const auto cell = cells[static_cast<std::size_t>(c) + 1];
      if (cell != "0" && cell != "1")
        throw ParseError(path, line_no, "availability cell '" + std::string(cell) +
                                            "' for cam_" + std::to_string(c + 1) + " is not 0 or 1");
      trace.at(t, c) = cell == "1" ? 1 : 0;
    }
  }
  return trace;
}

inline ServerLatencyTrace load_server_trace(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path, 1, "empty file");
  const int m = detail::check_trace_header(path, lines[0], "srv_", "_ms");
  const int frames = static_cast<int>(lines.size()) - 1;
  if (frames == 0) throw SchemaError(path + ": no frame rows");
  ServerLatencyTrace trace(frames, m);
  for (int t = 0; t < frames; ++t) {
    const std::size_t line_no = static_cast<std::size_t>(t) + 2;
    const auto cells = csv::split(lines[static_cast<std::size_t>(t) + 1]);
    if (cells.size() != static_cast<std::size_t>(m) + 1)
      throw ParseError(path, line_no, "expected " + std::to_string(m + 1) + " cells, got " +
                                          std::to_string(cells.size()));
    detail::check_frame_cell(path, line_no, cells[0], t);
    for (int s = 0; s < m; ++s) {
      const auto cell = cells[static_cast<std::size_t>(s) + 1];
      double v = 0.0;
      if (!csv::parse_double(cell, v) || v < 0.0)
        throw ParseError(path, line_no, "latency cell '" + std::string(cell) + "' for srv_" +
                                            std::to_string(s + 1) + " is not a nonnegative number");
      trace.at(t, s) = v;
    }
  }
  return trace;
}

/// Writes cameras.csv and servers.csv into `dir` (created if missing).
inline void save_traces(const DisruptionTraces& traces, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  save_camera_trace(traces.cameras, (base / kCamerasFile).string());
  save_server_trace(traces.servers, (base / kServersFile).string());
}

inline DisruptionTraces load_traces(const std::string& cameras_path,
                                    const std::string& servers_path) {
  DisruptionTraces t{load_camera_trace(cameras_path), load_server_trace(servers_path)};
  if (t.cameras.frames != t.servers.frames)
    throw SchemaError("frame count mismatch: " + cameras_path + " has " +
                      std::to_string(t.cameras.frames) + " rows, " + servers_path + " has " +
                      std::to_string(t.servers.frames));
  return t;
}

inline DisruptionTraces load_traces(const std::string& dir) {
  const std::filesystem::path base(dir);
  return load_traces((base / kCamerasFile).string(), (base / kServersFile).string());
}

}  // namespace edgerecon
