#pragma once

#include "liris/gabor.hpp"
#include "liris/matcher.hpp"
#include "liris/pointcloud_io.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace liris {

struct GroundTruth {
  std::vector<Eigen::Vector3d> positions;
  double loop_radius = 4.0;  // meters

  static GroundTruth from_poses(const std::vector<Pose>& poses, double loop_radius = 4.0);
  std::size_t size() const { return positions.size(); }
  double distance(std::size_t i, std::size_t j) const {
    return (positions[i] - positions[j]).norm();
  }
  void validate() const;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // thresholds strictly increasing

  /// Highest F1 over the sweep; nullopt for an empty curve.
  std::optional<std::pair<double, PRPoint>> best_f1() const;
  /// Highest recall among points with precision >= min_precision (0 if none).
  double max_recall_at_precision(double min_precision) const;
};

/// Symmetric n×n matrix of match_pair distances with a zero diagonal.
class AffinityMatrix {
 public:
  explicit AffinityMatrix(std::size_t n = 0) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

/// Entry (i, j), i < j, is match_pair(descriptors[i], descriptors[j]).distance.
AffinityMatrix compute_affinity(std::span<const FrameDescriptor> descriptors, int window = 2,
                                int threads = 1);

/// `count` evenly spaced thresholds spanning [min, max] of `distances`
/// (a single threshold when the range is degenerate or empty).
std::vector<double> default_thresholds(std::span<const double> distances, int count = 200);

// Protocol A: online loop detection with recent-frame exclusion.

/// Best match of frame i among frames [0, i - exclude_recent), or nothing.
struct OnlineMatch {
  std::size_t candidate = 0;  // index into the descriptor list
  double distance = 1.0;
  int shift = 0;
};

std::vector<std::optional<OnlineMatch>> run_online_queries(
    std::span<const FrameDescriptor> descriptors, std::size_t exclude_recent = 30,
    int window = 2, int threads = 1);

/// Same answers as run_online_queries (shift left 0), read off an affinity matrix.
std::vector<std::optional<OnlineMatch>> online_queries_from_affinity(
    const AffinityMatrix& affinity, std::size_t exclude_recent = 30);

struct ProtocolACounts {
  std::size_t frames = 0;
  std::size_t queried = 0;     // frames with a nonempty eligible set
  std::size_t true_loops = 0;  // frames with an eligible prior frame closer than loop_radius
};
ProtocolACounts count_protocol_a(const GroundTruth& gt, std::size_t exclude_recent = 30);

/// Frame i is a ground-truth loop iff some frame j < i - exclude_recent lies
/// strictly within loop_radius.
std::vector<bool> protocol_a_loop_frames(const GroundTruth& gt, std::size_t exclude_recent);

/// Predicted loop iff best distance <= threshold; TP iff the matched frame is
/// within loop_radius. FN = ground-truth loops - TP. `mask`, when given,
/// restricts which frames are scored.
PRCurve protocol_a_curve(std::span<const std::optional<OnlineMatch>> matches,
                         const GroundTruth& gt, std::size_t exclude_recent,
                         std::span<const double> thresholds,
                         const std::vector<bool>* mask = nullptr);

PRCurve protocol_a(std::span<const FrameDescriptor> descriptors, const GroundTruth& gt,
                   std::size_t exclude_recent, std::span<const double> thresholds,
                   int window = 2, int threads = 1);

// Protocol B: exhaustive pairwise re-identification. Counts are over
// ordered pairs (i, j), i != j.

struct ProtocolBCounts {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
};
ProtocolBCounts count_protocol_b(const GroundTruth& gt);

PRCurve protocol_b_curve(const AffinityMatrix& affinity, const GroundTruth& gt,
                         std::span<const double> thresholds);

PRCurve protocol_b(std::span<const FrameDescriptor> descriptors, const GroundTruth& gt,
                   std::span<const double> thresholds, int window = 2, int threads = 1);

// Matching-time benchmark.

struct TimingStats {
  std::size_t pairs = 0;
  double mean = 0.0;  // seconds per pair
  double median = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Order statistics of `samples` (nearest-rank p95).
TimingStats summarize_timings(std::vector<double> samples);

/// Trial t takes frame t mod n as the probe and, for every other frame,
/// times feature extraction from that frame's iris plus its spectrum and
/// match_pair against the probe. Iris generation is not timed.
/// Returns per-pair samples in seconds.
std::vector<double> benchmark_matching(std::span<const FrameDescriptor> descriptors,
                                       std::size_t trials, const LoGGaborBank& bank,
                                       int window = 2);

// Output formats.

void write_affinity_csv(const std::filesystem::path& path, const AffinityMatrix& m);
/// 8-bit PGM, pixel = round(255 · distance): darker is more similar.
void write_affinity_pgm(const std::filesystem::path& path, const AffinityMatrix& m);
void write_pr_csv(const std::filesystem::path& path, const PRCurve& curve);
void write_timing_csv(const std::filesystem::path& path, std::span<const double> samples);

}  // namespace liris
