#include "liris/error.hpp"
#include "liris/synth.hpp"
#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <tuple>

#include <unistd.h>

using namespace liris;
using namespace liris::synth;
namespace fs = std::filesystem;

TEST(World, DeterministicAndWithinEnvelope) {
  const SyntheticWorld a = SyntheticWorld::generate(9), b = SyntheticWorld::generate(9);
  ASSERT_EQ(a.obstacles.size(), b.obstacles.size());
  EXPECT_GT(a.obstacles.size(), 1000u);
  const double top = a.params.sensor_height + a.params.profile.y_high;
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_EQ(a.obstacles[i].center, b.obstacles[i].center);
    EXPECT_EQ(a.obstacles[i].radius, b.obstacles[i].radius);
    EXPECT_LE(a.obstacles[i].z_top, top);
    EXPECT_LT(a.obstacles[i].z_bottom, a.obstacles[i].z_top);
    const Obstacle& o = a.obstacles[i];
    EXPECT_GE(std::abs(o.center.y() - road_y(a.params, o.center.x())),
              a.params.road_clearance + o.radius);
  }
  EXPECT_NE(SyntheticWorld::generate(10).obstacles[0].center, a.obstacles[0].center);
}

TEST(Scan, EmptyWorldHasOnlyGroundOrNothing) {
  WorldParams p;
  p.density = 0.0;
  const SyntheticWorld w = SyntheticWorld::generate(1, p);
  EXPECT_TRUE(w.obstacles.empty());
  // All beams pointing up or level: nothing to hit.
  ScanOptions up;
  up.min_elevation_deg = 0.0;
  up.max_elevation_deg = 2.0;
  EXPECT_TRUE(scan_from(w, Pose::from_yaw(0, {0, 0, 1.73}), IrisConfig{}, up).empty());
}

TEST(Scan, Deterministic) {
  const auto& w = scenes::world();
  const Pose pose = scenes::road_pose(w, 12.3, 0.4);
  const PointCloud a = scan_from(w, pose, IrisConfig{});
  const PointCloud b = scan_from(w, pose, IrisConfig{});
  ASSERT_EQ(a.size(), b.size());
  EXPECT_GT(a.size(), 10000u);
  EXPECT_EQ(std::memcmp(a.points.data(), b.points.data(), a.size() * sizeof(Point)), 0);
  ScanOptions j;
  j.jitter = true;
  j.rays_per_bin = 2;
  const PointCloud c = scan_from(w, pose, IrisConfig{}, j), d = scan_from(w, pose, IrisConfig{}, j);
  ASSERT_EQ(c.size(), d.size());
  EXPECT_EQ(std::memcmp(c.points.data(), d.points.data(), c.size() * sizeof(Point)), 0);
}

TEST(Scan, YawedPoseRotatesCloud) {
  const auto& w = scenes::world();
  for (double deg : {30.0, 33.7, -141.25}) {
    const double delta = scenes::deg(deg);
    const PointCloud a = scan_from(w, scenes::road_pose(w, 40, 0), IrisConfig{});
    const PointCloud b = scan_from(w, scenes::road_pose(w, 40, delta), IrisConfig{});
    ASSERT_EQ(a.size(), b.size());
    const double c = std::cos(-delta), s = std::sin(-delta);
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double x = c * a.points[i].x - s * a.points[i].y;
      const double y = s * a.points[i].x + c * a.points[i].y;
      worst = std::max({worst, std::abs(x - b.points[i].x), std::abs(y - b.points[i].y),
                        std::abs(double(a.points[i].z) - b.points[i].z)});
    }
    EXPECT_LT(worst, 1e-4) << deg;
  }
  // Whole-bin yaw permutes iris columns exactly.
  const PointCloud a = scan_from(w, scenes::road_pose(w, 40, 0), IrisConfig{});
  const PointCloud b = scan_from(w, scenes::road_pose(w, 40, scenes::deg(30)), IrisConfig{});
  EXPECT_EQ(generate_iris(b, IrisConfig{}), generate_iris(a, IrisConfig{}).shifted_columns(-30));
}

TEST(Scan, SubBinYawRoundsToNearestShift) {
  const auto& w = scenes::world();
  const auto base = scenes::scan_descriptor(0, w, scenes::road_pose(w, -60, 0));
  for (double deg : {0.3, 12.49, 12.51, 200.8, 359.6}) {
    const auto yawed = scenes::scan_descriptor(1, w, scenes::road_pose(w, -60, scenes::deg(deg)));
    const MatchResult r = match_pair(yawed, base);
    EXPECT_EQ(r.shift, static_cast<int>(std::lround(deg)) % 360) << deg;
    EXPECT_EQ(r.distance, 0.0) << deg;
  }
}

TEST(Scan, PointsWithinRangeAndProfile) {
  const auto& w = scenes::world();
  const IrisConfig cfg;
  const PointCloud c = scan_from(w, scenes::road_pose(w, -100, 1.0), cfg);
  for (const Point& p : c.points) {
    EXPECT_LT(std::hypot(p.x, p.y), cfg.max_range);
    EXPECT_GE(p.z, -w.params.sensor_height - 1e-4);
    EXPECT_LE(p.z, cfg.profile.y_high + 1e-4);
  }
}

TEST(Trajectory, StructureAndGroundTruth) {
  const auto& w = scenes::world();
  const Trajectory t = loop_trajectory(w, 100, 0.3);
  ASSERT_EQ(t.poses.size(), 100u);
  ASSERT_EQ(t.kinds.size(), 100u);
  ASSERT_EQ(t.ground_truth.size(), 100u);
  int same = 0, opposite = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_TRUE(t.poses[i].is_valid());
    EXPECT_EQ(t.ground_truth.positions[i], t.poses[i].translation);
    if (i < 70) {
      EXPECT_EQ(t.kinds[i], FrameKind::Original);
      EXPECT_EQ(t.source[i], -1);
      if (i > 0) EXPECT_NEAR(t.ground_truth.distance(i, i - 1), 1.0, 1e-3);
      continue;
    }
    const auto src = static_cast<std::size_t>(t.source[i]);
    EXPECT_LT(src, 70u);
    EXPECT_NEAR(t.ground_truth.distance(i, src), 0.0, 1e-9);
    const Eigen::Matrix3d rel = t.poses[src].rotation.transpose() * t.poses[i].rotation;
    const double yaw = std::atan2(rel(1, 0), rel(0, 0));
    if (t.kinds[i] == FrameKind::SameDirection) {
      ++same;
      EXPECT_NEAR(yaw, 0.0, 1e-9);
    } else {
      ++opposite;
      EXPECT_NEAR(std::abs(yaw), std::numbers::pi, 1e-9);
    }
  }
  EXPECT_EQ(same, 15);
  EXPECT_EQ(opposite, 15);
}

TEST(Trajectory, NoRevisitsMeansOnlyNeighbourPositives) {
  const auto& w = scenes::world();
  const Trajectory t = loop_trajectory(w, 200, 0.0);
  // Positives are the brute-force pairs within 4 m, all of them near the diagonal.
  const ProtocolBCounts c = count_protocol_b(t.ground_truth);
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t j = 0; j < 200; ++j)
      if (i != j && t.ground_truth.distance(i, j) <= 4.0) {
        ++pos;
        EXPECT_LE(i > j ? i - j : j - i, 5u);
      }
  EXPECT_EQ(c.positive, pos);
  EXPECT_EQ(count_protocol_a(t.ground_truth, 30).true_loops, 0u);
}

TEST(Trajectory, NoiseMovesRevisitsWithinBounds) {
  const auto& w = scenes::world();
  TrajectoryOptions o;
  o.lateral_noise = 1.0;
  o.yaw_noise_deg = 5.0;
  o.seed = 3;
  const Trajectory t = loop_trajectory(w, 100, 0.4, o);
  double moved = 0;
  for (std::size_t i = 60; i < 100; ++i) {
    const double d = t.ground_truth.distance(i, static_cast<std::size_t>(t.source[i]));
    EXPECT_LE(d, 1.0 + 1e-9);
    moved += d;
  }
  EXPECT_GT(moved, 0.0);
  const Trajectory again = loop_trajectory(w, 100, 0.4, o);
  for (std::size_t i = 0; i < 100; ++i)
    EXPECT_EQ(again.poses[i].translation, t.poses[i].translation);
}

TEST(Trajectory, Errors) {
  const auto& w = scenes::world();
  EXPECT_THROW(loop_trajectory(w, 1, 0.0), ContractError);
  EXPECT_THROW(loop_trajectory(w, 10, 1.0), ContractError);
  EXPECT_THROW(loop_trajectory(w, 100000, 0.1), ContractError);
}

TEST(Export, KittiLayout) {
  const auto& w = scenes::world();
  const Trajectory t = loop_trajectory(w, 3, 0.0);
  std::vector<PointCloud> clouds;
  for (const Pose& p : t.poses) clouds.push_back(scan_from(w, p, IrisConfig{}));
  const fs::path dir = fs::temp_directory_path() / ("liris_synth_" + std::to_string(::getpid()));
  export_kitti_sequence(dir, clouds, t.poses);
  EXPECT_TRUE(fs::exists(dir / "000000.bin"));
  EXPECT_TRUE(fs::exists(dir / "000002.bin"));
  EXPECT_EQ(read_kitti_poses(dir / "poses.txt").size(), 3u);
  EXPECT_EQ(read_kitti_bin(dir / "000001.bin").size(), clouds[1].size());
  fs::remove_all(dir);
}
