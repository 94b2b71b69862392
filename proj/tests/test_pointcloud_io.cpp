#include "liris/error.hpp"
#include "liris/pointcloud_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include <unistd.h>

using namespace liris;
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> le_floats(std::initializer_list<float> values) {
  std::vector<unsigned char> out;
  for (float v : values) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
  }
  return out;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("liris_io_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(KittiBin, TwoRecords) {
  const auto bytes = le_floats({1.0f, 2.0f, 3.0f, 0.5f, -1.0f, 0.0f, 0.25f, 0.9f});
  ASSERT_EQ(bytes.size(), 32u);
  const PointCloud c = parse_kitti_bin(bytes.data(), bytes.size());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[0], (Point{1.0f, 2.0f, 3.0f, 0.5f}));
  EXPECT_EQ(c.points[1], (Point{-1.0f, 0.0f, 0.25f, 0.9f}));
  EXPECT_EQ(c.dropped_nonfinite, 0u);
}

TEST(KittiBin, EmptyFile) {
  const fs::path p = temp_path("empty.bin");
  std::ofstream(p, std::ios::binary).close();
  EXPECT_TRUE(read_kitti_bin(p).empty());
  fs::remove(p);
}

TEST(KittiBin, TruncatedRecordNamesOffset) {
  std::vector<unsigned char> bytes(17, 0);
  try {
    parse_kitti_bin(bytes.data(), bytes.size(), "frame.bin");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("frame.bin"), std::string::npos) << msg;
    EXPECT_NE(msg.find("16"), std::string::npos) << msg;
  }
}

TEST(KittiBin, DropsNonFinite) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const float inf = std::numeric_limits<float>::infinity();
  const auto bytes = le_floats({1, 1, 1, 0, nan, 0, 0, 0, 0, inf, 0, 0, 2, 2, 2, 0});
  const PointCloud c = parse_kitti_bin(bytes.data(), bytes.size());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.dropped_nonfinite, 2u);
  EXPECT_EQ(c.points[1].x, 2.0f);
}

TEST(KittiBin, MissingFileThrows) {
  EXPECT_ANY_THROW(read_kitti_bin("/nonexistent/liris/0.bin"));
}

TEST(KittiBin, RoundTripIsBitIdentical) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-100.f, 100.f);
  PointCloud c;
  for (int i = 0; i < 1000; ++i) c.points.push_back({u(rng), u(rng), u(rng), u(rng)});
  const fs::path p = temp_path("rt.bin");
  write_kitti_bin(p, c);
  EXPECT_EQ(fs::file_size(p), 16000u);
  const PointCloud back = read_kitti_bin(p);
  ASSERT_EQ(back.size(), c.size());
  EXPECT_EQ(std::memcmp(back.points.data(), c.points.data(), c.size() * sizeof(Point)), 0);
  fs::remove(p);
}

TEST(KittiPoses, IdentityAndTranslation) {
  const auto poses = parse_kitti_poses("1 0 0 0 0 1 0 0 0 0 1 0\n\n1 0 0 5 0 1 0 0 0 0 1 -2\n");
  ASSERT_EQ(poses.size(), 2u);
  EXPECT_TRUE(poses[0].rotation.isIdentity());
  EXPECT_TRUE(poses[0].translation.isZero());
  EXPECT_TRUE(poses[1].rotation.isIdentity());
  EXPECT_EQ(poses[1].translation, Eigen::Vector3d(5, 0, -2));
}

TEST(KittiPoses, WrongTokenCountNamesLine) {
  try {
    parse_kitti_poses("1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 0 0 1 0 0 0 0 1\n", "poses.txt");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("poses.txt:2"), std::string::npos) << e.what();
  }
}

TEST(KittiPoses, RoundTrip) {
  std::vector<Pose> poses;
  for (int i = 0; i < 20; ++i) poses.push_back(Pose::from_yaw(0.1 * i, {i * 1.5, -i * 0.25, 0.01 * i}));
  const fs::path p = temp_path("poses.txt");
  write_kitti_poses(p, poses);
  const auto back = read_kitti_poses(p);
  ASSERT_EQ(back.size(), poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    EXPECT_TRUE(back[i].rotation.isApprox(poses[i].rotation, 1e-12));
    EXPECT_TRUE(back[i].translation.isApprox(poses[i].translation, 1e-12));
  }
  fs::remove(p);
}

TEST(Pose, Validity) {
  EXPECT_TRUE(Pose::from_yaw(1.3, Eigen::Vector3d::Zero()).is_valid());
  Pose reflect;
  reflect.rotation(0, 0) = -1;
  EXPECT_FALSE(reflect.is_valid());
  Pose scaled;
  scaled.rotation *= 1.001;
  EXPECT_FALSE(scaled.is_valid());
}

TEST(Keyframes, GreedyExample) {
  std::vector<Pose> poses;
  for (double x : {0.0, 0.4, 0.8, 1.2, 1.6, 2.4}) poses.push_back(Pose::from_yaw(0, {x, 0, 0}));
  EXPECT_EQ(select_keyframes(poses, 1.0), (std::vector<std::size_t>{0, 3, 5}));
}

TEST(Keyframes, EdgeCases) {
  EXPECT_TRUE(select_keyframes({}, 1.0).empty());
  EXPECT_EQ(select_keyframes({Pose{}}, 1.0), (std::vector<std::size_t>{0}));
  EXPECT_THROW(select_keyframes({Pose{}}, 0.0), ContractError);
}

TEST(Keyframes, StrictlyIncreasingAndSpaced) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> step(0.0, 0.7);
  std::vector<Pose> poses;
  Eigen::Vector3d at = Eigen::Vector3d::Zero();
  for (int i = 0; i < 500; ++i) {
    at += Eigen::Vector3d(step(rng), step(rng), 0.1 * step(rng));
    poses.push_back(Pose::from_yaw(0, at));
  }
  for (double spacing : {0.5, 1.0, 3.0}) {
    const auto keys = select_keyframes(poses, spacing);
    ASSERT_FALSE(keys.empty());
    EXPECT_EQ(keys[0], 0u);
    for (std::size_t k = 1; k < keys.size(); ++k) {
      EXPECT_LT(keys[k - 1], keys[k]);
      EXPECT_GE((poses[keys[k]].translation - poses[keys[k - 1]].translation).norm(), spacing);
      // Nothing in between qualified earlier.
      for (std::size_t j = keys[k - 1] + 1; j < keys[k]; ++j)
        EXPECT_LT((poses[j].translation - poses[keys[k - 1]].translation).norm(), spacing);
    }
  }
}

TEST(SensorProfile, Defaults) {
  EXPECT_EQ(SensorProfile::hdl64().y_low, -3.0);
  EXPECT_EQ(SensorProfile::hdl64().y_high, 5.0);
  EXPECT_EQ(SensorProfile::vlp16().y_low, -2.0);
  EXPECT_EQ(SensorProfile::vlp16().y_high, 22.0);
  EXPECT_EQ(SensorProfile::hdl64().height_axis, HeightAxis::Z);
  EXPECT_EQ(SensorProfile::by_name("vlp16").y_high, 22.0);
  EXPECT_THROW(SensorProfile::by_name("ouster"), ContractError);
  SensorProfile bad = SensorProfile::hdl64();
  bad.y_low = bad.y_high;
  EXPECT_THROW(bad.validate(), ContractError);
}
