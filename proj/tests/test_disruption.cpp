#include <gtest/gtest.h>

#include "edgerecon/disruption.hpp"

using namespace edgerecon;

namespace {

DisruptionParams seeded(std::uint64_t seed) {
  DisruptionParams p;
  p.seed = seed;
  return p;
}

std::string field_of(const DisruptionParams& p) {
  try {
    p.validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(CameraTrace, NoBumpEventsMeansAllOnes) {
  auto p = seeded(3);
  p.n_bump_events = 0;
  const auto t = generate_camera_trace(p);
  ASSERT_EQ(t.frames, 4000);
  ASSERT_EQ(t.n_cameras, 5);
  for (auto v : t.availability) ASSERT_EQ(v, 1);
  EXPECT_TRUE(t.events.empty());
}

TEST(CameraTrace, GroupOneTwoIsDisruptedJointly) {
  // Seeds from 7 upward until one places an event on group {1,2}.
  int checked = 0;
  for (std::uint64_t seed = 7; seed < 40 && checked == 0; ++seed) {
    const auto t = generate_camera_trace(seeded(seed));
    for (const auto& e : t.events) {
      if (e.group != 0) continue;
      ASSERT_EQ(e.cameras, (std::vector<int>{0, 1}));
      for (int f = e.start; f < e.end(); ++f) {
        EXPECT_EQ(t.at(f, 0), 0) << "frame " << f;
        EXPECT_EQ(t.at(f, 1), 0) << "frame " << f;
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(CameraTrace, EveryEventIsOneMaximalZeroRunAndNothingElseIsZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = generate_camera_trace(seeded(seed));
    std::vector<std::uint8_t> expect(t.availability.size(), 1);
    for (const auto& e : t.events)
      for (int f = e.start; f < e.end(); ++f)
        for (int c : e.cameras) expect[static_cast<std::size_t>(f * t.n_cameras + c)] = 0;
    EXPECT_EQ(expect, t.availability) << "seed " << seed;
    for (const auto& e : t.events)
      for (int c : e.cameras) {
        if (e.start > 0) {
          EXPECT_EQ(t.at(e.start - 1, c), 1);
        }
        if (e.end() < t.frames) {
          EXPECT_EQ(t.at(e.end(), c), 1);
        }
      }
  }
}

TEST(CameraTrace, ExactEventCountAndGroupsFromConfig) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = generate_camera_trace(seeded(seed));
    ASSERT_EQ(t.events.size(), 10u);
    for (const auto& e : t.events) {
      EXPECT_GE(e.length, 1);
      EXPECT_GE(e.start, 0);
      EXPECT_LE(e.end(), t.frames);
      EXPECT_GE(e.group, 0);
      EXPECT_LT(e.group, 3);
    }
  }
}

// Expected disrupted share per camera: (events per group) * mean length / frames,
// averaged over the group sizes. Events on one group never overlap, so the
// disrupted frames of a camera are exactly the sum of its events' lengths.
TEST(CameraTrace, PooledDisruptedShareMatchesEventArithmetic) {
  const DisruptionParams p;
  double group_size_sum = 0;
  for (const auto& g : p.correlation_groups) group_size_sum += static_cast<double>(g.size());
  const double expected = p.n_bump_events * p.mean_bump_len *
                          (group_size_sum / static_cast<double>(p.correlation_groups.size())) /
                          (static_cast<double>(p.n_frames) * p.n_cameras);
  double pooled = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto t = generate_camera_trace(seeded(static_cast<std::uint64_t>(s)));
    for (int c = 0; c < t.n_cameras; ++c) {
      int down = 0;
      for (int f = 0; f < t.frames; ++f) down += t.at(f, c) == 0;
      const double share = static_cast<double>(down) / t.frames;
      EXPECT_LE(share, 0.30) << "seed " << s << " camera " << c + 1;
      pooled += share;
    }
  }
  pooled /= seeds * 5;
  EXPECT_NEAR(pooled, expected, 0.0125) << "expected " << expected;
}

TEST(CameraTrace, DeterministicPerSeed) {
  EXPECT_TRUE(generate_camera_trace(seeded(7)).same_matrix(generate_camera_trace(seeded(7))));
  EXPECT_FALSE(generate_camera_trace(seeded(7)).same_matrix(generate_camera_trace(seeded(8))));
}

TEST(CameraTrace, ShortTimelinePlacesWhatFits) {
  auto p = seeded(1);
  p.n_frames = 10;
  const auto t = generate_camera_trace(p);
  EXPECT_EQ(t.frames, 10);
  EXPECT_LE(t.events.size(), 10u);
  EXPECT_GE(t.events.size(), 1u);
  for (const auto& e : t.events) EXPECT_LE(e.end(), 10);
}

TEST(ServerTrace, NoSpikesStaysInsideJitterBand) {
  auto p = seeded(4);
  p.n_spike_events = 0;
  const auto t = generate_server_trace(p);
  ASSERT_EQ(t.n_servers, 4);
  for (double v : t.latency_ms) {
    EXPECT_GE(v, 140.0);
    EXPECT_LE(v, 160.0);
  }
}

TEST(ServerTrace, SpikedEntriesWithinSpikeBand) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = generate_server_trace(seeded(seed));
    ASSERT_EQ(t.events.size(), 10u);
    std::vector<bool> spiked(t.latency_ms.size(), false);
    for (const auto& e : t.events) {
      EXPECT_GE(e.magnitude_ms, 400.0);
      EXPECT_LE(e.magnitude_ms, 1200.0);
      for (int f = e.start; f < e.end(); ++f) {
        const double v = t.at(f, e.server);
        EXPECT_GE(v, 150.0 - 10.0 + 400.0);
        EXPECT_LE(v, 150.0 + 10.0 + 1200.0);
        spiked[static_cast<std::size_t>(f * t.n_servers + e.server)] = true;
      }
    }
    // Every entry not covered by an event sits in the baseline band: a spike
    // never leaks onto a second server.
    for (std::size_t i = 0; i < spiked.size(); ++i)
      if (!spiked[i]) {
        EXPECT_GE(t.latency_ms[i], 140.0);
        EXPECT_LE(t.latency_ms[i], 160.0);
      }
  }
}

TEST(ServerTrace, DeterministicPerSeed) {
  EXPECT_TRUE(generate_server_trace(seeded(7)).same_matrix(generate_server_trace(seeded(7))));
  EXPECT_EQ(generate_server_trace(seeded(7)).events, generate_server_trace(seeded(7)).events);
}

TEST(DisruptionParams, ValidationNamesTheField) {
  auto p = seeded(0);
  p.disruption_threshold = 1.0;
  EXPECT_EQ(field_of(p), "disruption_threshold");
  p = seeded(0);
  p.disruption_threshold = 0.0;
  EXPECT_EQ(field_of(p), "disruption_threshold");
  p = seeded(0);
  p.spike_min_ms = 1200;
  p.spike_max_ms = 400;
  EXPECT_EQ(field_of(p), "spike_range_ms");
  p = seeded(0);
  p.n_bump_events = -1;
  EXPECT_EQ(field_of(p), "n_bump_events");
  p = seeded(0);
  p.n_spike_events = -2;
  EXPECT_EQ(field_of(p), "n_spike_events");
  p = seeded(0);
  p.correlation_groups = {{1, 2}, {2, 3}};
  EXPECT_EQ(field_of(p), "correlation_groups");
  p = seeded(0);
  p.correlation_groups = {{0, 1}};
  EXPECT_EQ(field_of(p), "correlation_groups");
  p = seeded(0);
  p.mean_bump_len = 0.5;
  EXPECT_EQ(field_of(p), "mean_bump_len");
  EXPECT_THROW(generate_camera_trace(p), ConfigError);
  EXPECT_EQ(field_of(seeded(0)), "");
}
