#include "liris/synth.hpp"

#include "liris/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

namespace liris::synth {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_double(std::uint64_t h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  return splitmix64(h ^ bits);
}

double yaw_of(const Pose& pose) { return std::atan2(pose.rotation(1, 0), pose.rotation(0, 0)); }

// Uniform in [lo, hi) from the top 53 bits; identical on every platform.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double road_y(const WorldParams& params, double x) {
  return params.road_amplitude * std::sin(2.0 * kPi * x / params.road_wavelength);
}

SyntheticWorld SyntheticWorld::generate(std::uint64_t seed, const WorldParams& params) {
  if (!(params.extent > 0.0) || params.density < 0.0 || !(params.min_radius > 0.0) ||
      params.max_radius < params.min_radius)
    throw ContractError("invalid synthetic world parameters");
  params.profile.validate();
  SyntheticWorld world;
  world.seed = seed;
  world.extent = params.extent;
  world.sensor_height = params.sensor_height;
  world.params = params;

  std::mt19937_64 rng(splitmix64(seed));
  const double area = 4.0 * params.extent * params.extent;
  const auto target = static_cast<std::size_t>(std::llround(params.density * area));
  // Tallest top that still encodes below y_high from the sensor.
  const double top_limit = params.sensor_height + params.profile.y_high;
  std::size_t attempts = 0;
  while (world.obstacles.size() < target && attempts < 20 * target + 100) {
    ++attempts;
    Obstacle o;
    o.center = {uniform(rng, -params.extent, params.extent),
                uniform(rng, -params.extent, params.extent)};
    o.radius = uniform(rng, params.min_radius, params.max_radius);
    const bool canopy = uniform(rng, 0.0, 1.0) < params.canopy_fraction;
    if (canopy) {
      o.z_bottom = uniform(rng, 2.0, 4.0);
      o.z_top = std::min(top_limit, o.z_bottom + uniform(rng, 1.0, 5.0));
    } else {
      o.z_bottom = 0.0;
      o.z_top = uniform(rng, 0.5, top_limit);
    }
    if (std::abs(o.center.y() - road_y(params, o.center.x())) <
        params.road_clearance + o.radius)
      continue;
    world.obstacles.push_back(o);
  }
  return world;
}

PointCloud scan_from(const SyntheticWorld& world, const Pose& pose, const IrisConfig& config,
                     const ScanOptions& options) {
  config.validate();
  if (options.rays_per_bin < 1 || options.beams < 1)
    throw ContractError("scan options need at least one ray per bin and one beam");

  const Eigen::Vector2d origin = pose.translation.head<2>();
  const double height = pose.translation.z();
  const double yaw = yaw_of(pose);
  const double range = config.max_range;

  struct Candidate {
    const Obstacle* obstacle;
    double entry;
  };
  std::vector<const Obstacle*> nearby;
  for (const Obstacle& o : world.obstacles) {
    const double d = (o.center - origin).norm();
    if (d <= o.radius) continue;  // sensor inside the footprint: ignore
    if (d - o.radius < range) nearby.push_back(&o);
  }

  std::vector<double> tan_elev(static_cast<std::size_t>(options.beams));
  for (int b = 0; b < options.beams; ++b) {
    const double t = options.beams == 1 ? 0.0 : static_cast<double>(b) / (options.beams - 1);
    const double e = options.min_elevation_deg +
                     t * (options.max_elevation_deg - options.min_elevation_deg);
    tan_elev[static_cast<std::size_t>(b)] = std::tan(e * kPi / 180.0);
  }

  std::uint64_t h = splitmix64(world.seed ^ splitmix64(options.jitter_seed));
  h = hash_double(h, origin.x());
  h = hash_double(h, origin.y());
  h = hash_double(h, height);
  h = hash_double(h, yaw);
  std::mt19937_64 rng(h);

  PointCloud cloud;
  std::vector<Candidate> hits;
  // Ray azimuths are fixed in the world frame, so the pose's yaw only
  // rotates the resulting cloud.
  const double bin = 2.0 * kPi / config.angular_bins;
  const double slot = bin / options.rays_per_bin;
  for (int c = 0; c < config.angular_bins; ++c) {
    for (int k = 0; k < options.rays_per_bin; ++k) {
      double phi = c * bin + (k + 0.5) * slot;
      if (options.jitter) phi += uniform(rng, -0.5, 0.5) * slot;
      const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));

      hits.clear();
      for (const Obstacle* o : nearby) {
        const Eigen::Vector2d m = origin - o->center;
        const double b = m.dot(dir);
        const double disc = b * b - (m.squaredNorm() - o->radius * o->radius);
        if (disc < 0.0) continue;
        const double entry = -b - std::sqrt(disc);
        if (entry > 0.0 && entry < range) hits.push_back({o, entry});
      }
      std::sort(hits.begin(), hits.end(),
                [](const Candidate& a, const Candidate& b) { return a.entry < b.entry; });

      const float cx = static_cast<float>(std::cos(phi - yaw));
      const float sy = static_cast<float>(std::sin(phi - yaw));
      for (double te : tan_elev) {
        const double ground = te < 0.0 ? height / -te : INFINITY;
        double hit_range = -1.0, hit_z = 0.0;
        for (const Candidate& cand : hits) {
          if (ground < cand.entry) break;
          const double z = height + cand.entry * te;
          if (z >= cand.obstacle->z_bottom && z <= cand.obstacle->z_top) {
            hit_range = cand.entry;
            hit_z = z;
            break;
          }
        }
        if (hit_range < 0.0 && ground < range) {
          hit_range = ground;
          hit_z = 0.0;
        }
        if (hit_range < 0.0) continue;
        // Planar coordinates from the rounded unit direction: keep the
        // float radius on the intended side of bin boundaries.
        Point p;
        p.x = static_cast<float>(hit_range * cx);
        p.y = static_cast<float>(hit_range * sy);
        p.z = static_cast<float>(hit_z - height);
        p.reflectance = 0.5f;
        cloud.points.push_back(p);
      }
    }
  }
  return cloud;
}

Trajectory loop_trajectory(const SyntheticWorld& world, int length, double revisit_fraction,
                           const TrajectoryOptions& options) {
  if (length < 2) throw ContractError("trajectory length must be >= 2");
  if (!(revisit_fraction >= 0.0 && revisit_fraction < 1.0))
    throw ContractError("revisit_fraction must lie in [0, 1)");
  if (!(options.spacing > 0.0)) throw ContractError("trajectory spacing must be > 0");

  const int revisits = static_cast<int>(std::lround(length * revisit_fraction));
  const int originals = length - revisits;
  if (originals < 1) throw ContractError("revisit_fraction leaves no original frames");
  const int same = (revisits + 1) / 2;
  const int opposite = revisits - same;

  // Arc-length parametrisation of the road over the world's x range.
  const WorldParams& wp = world.params;
  const double step = 0.01;
  std::vector<double> xs, arc;
  double s = 0.0;
  for (double x = -world.extent; x <= world.extent; x += step) {
    if (!xs.empty()) {
      const double dy = road_y(wp, x) - road_y(wp, xs.back());
      s += std::sqrt(step * step + dy * dy);
    }
    xs.push_back(x);
    arc.push_back(s);
  }
  const double path_len = (originals - 1) * options.spacing;
  if (path_len > s) throw ContractError("trajectory does not fit inside the world extent");
  const double start = 0.5 * (s - path_len);

  auto road_pose = [&](double at) {
    const auto it = std::lower_bound(arc.begin(), arc.end(), at);
    const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - arc.begin(), 1,
                                                                       static_cast<std::ptrdiff_t>(arc.size()) - 1));
    const double t = (at - arc[i - 1]) / (arc[i] - arc[i - 1]);
    const double x = xs[i - 1] + t * (xs[i] - xs[i - 1]);
    const double dydx = wp.road_amplitude * 2.0 * kPi / wp.road_wavelength *
                        std::cos(2.0 * kPi * x / wp.road_wavelength);
    return std::make_pair(Eigen::Vector2d(x, road_y(wp, x)), std::atan2(dydx, 1.0));
  };

  Trajectory traj;
  std::mt19937_64 rng(splitmix64(options.seed ^ 0x5eedULL));
  auto push = [&](double at, double yaw_offset, FrameKind kind, long source) {
    auto [xy, heading] = road_pose(at);
    double yaw = heading + yaw_offset;
    if (kind != FrameKind::Original) {
      const Eigen::Vector2d normal(-std::sin(heading), std::cos(heading));
      xy += normal * uniform(rng, -options.lateral_noise, options.lateral_noise);
      yaw += uniform(rng, -options.yaw_noise_deg, options.yaw_noise_deg) * kPi / 180.0;
    }
    traj.poses.push_back(Pose::from_yaw(yaw, {xy.x(), xy.y(), world.sensor_height}));
    traj.kinds.push_back(kind);
    traj.source.push_back(source);
  };

  for (int i = 0; i < originals; ++i) push(start + i * options.spacing, 0.0, FrameKind::Original, -1);
  for (int i = 0; i < same; ++i) {
    const int src = i % originals;
    push(start + src * options.spacing, 0.0, FrameKind::SameDirection, src);
  }
  for (int i = 0; i < opposite; ++i) {
    const int src = ((originals - 1 - i) % originals + originals) % originals;
    push(start + src * options.spacing, kPi, FrameKind::OppositeDirection, src);
  }
  traj.ground_truth = GroundTruth::from_poses(traj.poses);
  return traj;
}

void export_kitti_sequence(const std::filesystem::path& dir, const std::vector<PointCloud>& clouds,
                           const std::vector<Pose>& poses) {
  if (!poses.empty() && poses.size() != clouds.size())
    throw ContractError("export: cloud and pose counts differ");
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.bin", i);
    write_kitti_bin(dir / name, clouds[i]);
  }
  if (!poses.empty()) write_kitti_poses(dir / "poses.txt", poses);
}

}  // namespace liris::synth
