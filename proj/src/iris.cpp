#include "liris/iris.hpp"

#include "liris/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace liris {

void IrisConfig::validate() const {
  if (radial_bins < 1) throw ContractError("radial_bins must be >= 1");
  if (angular_bins < 1) throw ContractError("angular_bins must be >= 1");
  if (!(max_range > 0.0) || !std::isfinite(max_range))
    throw ContractError("max_range must be a positive finite number");
  profile.validate();
}

IrisImage::IrisImage(int rows, int cols) : IrisImage(rows, cols, {}) {}

IrisImage::IrisImage(int rows, int cols, std::vector<std::uint8_t> pixels)
    : rows_(rows), cols_(cols), pixels_(std::move(pixels)) {
  if (rows < 0 || cols < 0) throw ContractError("IrisImage: negative dimensions");
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (pixels_.empty()) pixels_.assign(n, 0);
  if (pixels_.size() != n) throw ContractError("IrisImage: pixel count does not match dimensions");
}

IrisImage IrisImage::shifted_columns(int m) const {
  IrisImage out(rows_, cols_);
  if (cols_ == 0) return out;
  const int s = ((m % cols_) + cols_) % cols_;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out.at(r, (c + s) % cols_) = at(r, c);
  }
  return out;
}

int height_sub_bin(double height, const SensorProfile& profile) {
  const double h = std::clamp(height, profile.y_low, profile.y_high);
  const double t = 8.0 * (h - profile.y_low) / (profile.y_high - profile.y_low);
  return std::clamp(static_cast<int>(std::floor(t)), 0, 7);
}

std::uint8_t encode_bin(std::span<const double> heights, const SensorProfile& profile) {
  unsigned code = 0;
  for (double h : heights) code |= 1u << height_sub_bin(h, profile);
  return static_cast<std::uint8_t>(code);
}

IrisImage generate_iris(const PointCloud& cloud, const IrisConfig& config) {
  config.validate();
  IrisImage image(config.radial_bins, config.angular_bins);
  const auto axis = static_cast<int>(config.profile.height_axis);

  for (const Point& p : cloud.points) {
    const double coords[3] = {p.x, p.y, p.z};
    if (!std::isfinite(coords[0]) || !std::isfinite(coords[1]) || !std::isfinite(coords[2]))
      continue;
    // Planar coordinates are the two axes orthogonal to the height axis, in
    // right-handed order so yaw about the height axis is counter-clockwise.
    const double u = coords[(axis + 1) % 3];
    const double v = coords[(axis + 2) % 3];
    const double r = std::sqrt(u * u + v * v);
    if (r >= config.max_range) continue;
    double theta = std::atan2(v, u);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    const int row =
        std::min(static_cast<int>(r * config.radial_bins / config.max_range), config.radial_bins - 1);
    int col = static_cast<int>(theta * config.angular_bins / (2.0 * std::numbers::pi));
    if (col >= config.angular_bins) col = 0;
    image.at(row, col) |= static_cast<std::uint8_t>(1u << height_sub_bin(coords[axis], config.profile));
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const IrisImage& image) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write PGM: " + path.string());
  os << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  const auto px = image.pixels();
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

IrisImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM: " + path.string());
  auto next_token = [&]() {
    std::string tok;
    while (in >> std::ws) {
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      in >> tok;
      break;
    }
    return tok;
  };
  if (next_token() != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");
  int cols = 0, rows = 0, maxval = 0;
  try {
    cols = std::stoi(next_token());
    rows = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (maxval != 255 || rows < 0 || cols < 0)
    throw FormatError(path.string() + ": only 8-bit PGM (maxval 255) is supported");
  in.get();  // single whitespace after maxval
  std::vector<std::uint8_t> px(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (in.gcount() != static_cast<std::streamsize>(px.size()))
    throw FormatError(path.string() + ": truncated PGM pixel data");
  return IrisImage(rows, cols, std::move(px));
}

}  // namespace liris
