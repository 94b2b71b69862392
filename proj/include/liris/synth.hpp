#pragma once

#include "liris/eval.hpp"
#include "liris/iris.hpp"
#include "liris/pointcloud_io.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace liris::synth {

/// Vertical cylinder standing on (or floating above) the ground plane z = 0.
struct Obstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;    // footprint, meters
  double z_bottom = 0.0;  // world heights, meters
  double z_top = 1.0;
};

struct WorldParams {
  double extent = 300.0;           // obstacles fill [-extent, extent]²
  double density = 0.01;           // obstacles per m²
  double min_radius = 0.3;
  double max_radius = 2.5;
  double canopy_fraction = 0.2;    // share of obstacles with a raised bottom
  double road_clearance = 3.0;     // free band either side of the road
  double road_amplitude = 20.0;    // road is y = A sin(2πx / λ)
  double road_wavelength = 160.0;
  double sensor_height = 1.73;     // sensor above ground, meters
  SensorProfile profile = SensorProfile::hdl64();
};

struct SyntheticWorld {
  std::uint64_t seed = 0;
  double extent = 300.0;
  double sensor_height = 1.73;
  WorldParams params;
  std::vector<Obstacle> obstacles;

  /// Deterministic in (seed, params). Obstacle tops stay inside the
  /// profile's envelope as seen from the sensor height.
  static SyntheticWorld generate(std::uint64_t seed, const WorldParams& params = {});
};

/// Lateral road position y(x) of the world's road.
double road_y(const WorldParams& params, double x);

struct ScanOptions {
  int rays_per_bin = 1;             // azimuth rays per angular bin
  bool jitter = false;              // randomise ray azimuths within their slot
  std::uint64_t jitter_seed = 0;
  int beams = 64;                   // elevation channels
  double min_elevation_deg = -24.8;
  double max_elevation_deg = 2.0;
};

/// First-hit scan from `pose` (treated as planar: position plus yaw), in the
/// sensor frame. Ray azimuths are laid out in the world frame around the
/// sensor position, on the angular bin centres of `config` unless jittered;
/// the yaw only rotates the returned cloud by -yaw.
PointCloud scan_from(const SyntheticWorld& world, const Pose& pose, const IrisConfig& config,
                     const ScanOptions& options = {});

enum class FrameKind { Original, SameDirection, OppositeDirection };

struct TrajectoryOptions {
  double spacing = 1.0;          // meters between consecutive keyframes
  double lateral_noise = 0.0;    // revisit offset, uniform in ±lateral_noise m
  double yaw_noise_deg = 0.0;    // revisit yaw perturbation, uniform in ±deg
  std::uint64_t seed = 0;
};

struct Trajectory {
  std::vector<Pose> poses;
  GroundTruth ground_truth;
  std::vector<FrameKind> kinds;
  std::vector<long> source;  // original frame a revisit re-traverses, or -1
};

/// Road-following path whose last round(revisit_fraction · length) frames
/// re-traverse earlier ones: the first half in the original direction
/// (starting from frame 0), the second half backwards from the end of the
/// original run with a 180° yaw offset.
Trajectory loop_trajectory(const SyntheticWorld& world, int length, double revisit_fraction,
                           const TrajectoryOptions& options = {});

/// Writes NNNNNN.bin per cloud plus poses.txt into `dir` (created if needed).
void export_kitti_sequence(const std::filesystem::path& dir, const std::vector<PointCloud>& clouds,
                           const std::vector<Pose>& poses);

}  // namespace liris::synth
