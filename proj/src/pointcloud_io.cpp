#include "liris/pointcloud_io.hpp"

#include "liris/error.hpp"

#include <Eigen/Geometry>

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace liris {
namespace {

constexpr std::size_t kRecordBytes = 16;

float load_f32_le(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(u);
}

void store_f32_le(float v, unsigned char* p) {
  const auto u = std::bit_cast<std::uint32_t>(v);
  p[0] = static_cast<unsigned char>(u);
  p[1] = static_cast<unsigned char>(u >> 8);
  p[2] = static_cast<unsigned char>(u >> 16);
  p[3] = static_cast<unsigned char>(u >> 24);
}

}  // namespace

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if (((gram - Eigen::Matrix3d::Identity()).array().abs() > tol).any()) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Pose::from_yaw(double yaw_rad, const Eigen::Vector3d& position) {
  Pose p;
  p.rotation = Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  p.translation = position;
  return p;
}

void SensorProfile::validate() const {
  if (!(std::isfinite(y_low) && std::isfinite(y_high) && y_low < y_high))
    throw ContractError("sensor profile '" + name + "': y_low must be < y_high");
}

SensorProfile SensorProfile::hdl64() { return {"hdl64", -3.0, 5.0, HeightAxis::Z}; }
SensorProfile SensorProfile::vlp16() { return {"vlp16", -2.0, 22.0, HeightAxis::Z}; }

SensorProfile SensorProfile::by_name(const std::string& name) {
  if (name == "hdl64") return hdl64();
  if (name == "vlp16") return vlp16();
  throw ContractError("unknown sensor profile: " + name);
}

PointCloud parse_kitti_bin(const unsigned char* data, std::size_t size,
                           const std::string& origin) {
  if (size % kRecordBytes != 0) {
    throw FormatError(origin + ": truncated point record at byte offset " +
                      std::to_string(size - size % kRecordBytes) + " (file length " +
                      std::to_string(size) + " is not a multiple of 16)");
  }
  PointCloud cloud;
  cloud.points.reserve(size / kRecordBytes);
  for (std::size_t off = 0; off < size; off += kRecordBytes) {
    const Point p{load_f32_le(data + off), load_f32_le(data + off + 4),
                  load_f32_le(data + off + 8), load_f32_le(data + off + 12)};
    if (std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
        std::isfinite(p.reflectance)) {
      cloud.points.push_back(p);
    } else {
      ++cloud.dropped_nonfinite;
    }
  }
  return cloud;
}

PointCloud read_kitti_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open point cloud file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed: " + path.string());
  return parse_kitti_bin(bytes.data(), bytes.size(), path.string());
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud) {
  std::vector<unsigned char> bytes(cloud.points.size() * kRecordBytes);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point& p = cloud.points[i];
    unsigned char* out = bytes.data() + i * kRecordBytes;
    store_f32_le(p.x, out);
    store_f32_le(p.y, out + 4);
    store_f32_le(p.z, out + 8);
    store_f32_le(p.reflectance, out + 12);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write point cloud file: " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Pose> parse_kitti_poses(const std::string& text, const std::string& origin) {
  std::vector<Pose> poses;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<double> v;
    std::string tok;
    while (tokens >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(origin + ":" + std::to_string(line_no) +
                          ": not a number: '" + tok + "'");
      }
    }
    if (v.empty()) continue;
    if (v.size() != 12) {
      throw FormatError(origin + ":" + std::to_string(line_no) + ": expected 12 values, got " +
                        std::to_string(v.size()));
    }
    Pose p;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p.rotation(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
      p.translation(r) = v[static_cast<std::size_t>(r * 4 + 3)];
    }
    poses.push_back(p);
  }
  return poses;
}

std::vector<Pose> read_kitti_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open poses file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kitti_poses(ss.str(), path.string());
}

void write_kitti_poses(const std::filesystem::path& path, const std::vector<Pose>& poses) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write poses file: " + path.string());
  os.precision(17);
  for (const Pose& p : poses) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) os << p.rotation(r, c) << ' ';
      os << p.translation(r) << (r == 2 ? '\n' : ' ');
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::size_t> select_keyframes(const std::vector<Pose>& poses, double spacing) {
  if (!(spacing > 0.0)) throw ContractError("keyframe spacing must be > 0");
  std::vector<std::size_t> keys;
  if (poses.empty()) return keys;
  keys.push_back(0);
  for (std::size_t i = 1; i < poses.size(); ++i) {
    if ((poses[i].translation - poses[keys.back()].translation).norm() >= spacing)
      keys.push_back(i);
  }
  return keys;
}

}  // namespace liris
