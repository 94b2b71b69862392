#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace liris {

struct Point {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  float reflectance = 0.f;

  friend bool operator==(const Point&, const Point&) = default;
};

/// One LiDAR frame in the sensor frame.
struct PointCloud {
  std::vector<Point> points;
  /// Records dropped at load time because a coordinate was NaN or Inf.
  std::size_t dropped_nonfinite = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  /// RᵀR = I and det(R) = 1, entrywise within `tol`.
  bool is_valid(double tol = 1e-6) const;

  /// Pure yaw (about +z) at the given position.
  static Pose from_yaw(double yaw_rad, const Eigen::Vector3d& position);
};

enum class HeightAxis { X = 0, Y = 1, Z = 2 };

/// Vertical envelope encoded into the 8 occupancy sub-bins.
struct SensorProfile {
  std::string name;
  double y_low = -3.0;
  double y_high = 5.0;
  HeightAxis height_axis = HeightAxis::Z;

  void validate() const;

  /// Velodyne HDL-64E on KITTI: [-3 m, 5 m].
  static SensorProfile hdl64();
  /// Velodyne VLP-16: [-2 m, 22 m].
  static SensorProfile vlp16();
  /// Looks up "hdl64" / "vlp16"; throws ContractError otherwise.
  static SensorProfile by_name(const std::string& name);
};

/// Reads a KITTI velodyne scan: little-endian float32 (x, y, z, reflectance)
/// records of 16 bytes. Non-finite records are dropped and counted.
PointCloud read_kitti_bin(const std::filesystem::path& path);

/// Parses the same layout from memory. `origin` names the source in errors.
PointCloud parse_kitti_bin(const unsigned char* data, std::size_t size,
                           const std::string& origin = "<memory>");

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud);

/// Reads a KITTI poses file: 12 numbers per non-empty line, row-major [R|t].
std::vector<Pose> read_kitti_poses(const std::filesystem::path& path);
std::vector<Pose> parse_kitti_poses(const std::string& text,
                                    const std::string& origin = "<memory>");

void write_kitti_poses(const std::filesystem::path& path, const std::vector<Pose>& poses);

/// Greedy keyframe selection: frame 0, then each first frame at least
/// `spacing` meters from the last selected one.
std::vector<std::size_t> select_keyframes(const std::vector<Pose>& poses,
                                          double spacing = 1.0);

}  // namespace liris
