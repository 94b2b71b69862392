#pragma once

#include "liris/gabor.hpp"
#include "liris/iris.hpp"
#include "liris/spectral_align.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace liris {

/// One keyframe: its iris, binary signature and cached iris spectrum.
struct FrameDescriptor {
  FrameDescriptor() = default;
  FrameDescriptor(std::uint64_t id, IrisImage iris_image, BinaryFeatureMap feature_map);

  std::uint64_t frame_id = 0;
  IrisImage iris;
  BinaryFeatureMap features;
  IrisSpectrum spectrum;
};

FrameDescriptor make_descriptor(std::uint64_t id, IrisImage iris, const LoGGaborBank& bank);

struct MatchResult {
  double distance = 1.0;  // normalised Hamming, [0, 1]
  int shift = 0;          // columns in [0, cols); q ≈ p rotated by +shift
  std::uint64_t candidate_id = 0;
};

/// Number of differing bits. Throws ContractError on shape mismatch.
std::uint64_t hamming_bits(const BinaryFeatureMap& a, const BinaryFeatureMap& b);
/// Differing bits over total bits.
double hamming(const BinaryFeatureMap& a, const BinaryFeatureMap& b);
/// Differing bits between a and b re-indexed as b(.., (c + s) mod cols).
std::uint64_t hamming_bits_at_shift(const BinaryFeatureMap& a, const BinaryFeatureMap& b, int s);

/// Rotation-compensated distance: phase correlation gives the column offset
/// dx of q relative to p, then the Hamming distance is minimised over
/// offsets s within ±window of dx. Ties prefer the offset closest to dx,
/// then the smaller offset in [0, cols). candidate_id is q.frame_id.
MatchResult match_pair(const FrameDescriptor& p, const FrameDescriptor& q, int window = 2);

/// Keyframe history, append-only with strictly increasing frame ids.
class DescriptorDatabase {
 public:
  void append(FrameDescriptor descriptor);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const FrameDescriptor& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const FrameDescriptor> entries() const { return entries_; }

 private:
  std::vector<FrameDescriptor> entries_;
};

/// Best match of `probe` among `candidates`, evaluated as
/// match_pair(candidate, probe). Equal distances resolve to the earliest
/// candidate. The returned index is into `candidates`.
struct IndexedMatch {
  std::size_t index = 0;
  MatchResult result;
};
std::optional<IndexedMatch> best_match(std::span<const FrameDescriptor> candidates,
                                       const FrameDescriptor& probe, int window = 2,
                                       int threads = 1);

/// Loop-closure query against every entry except the `exclude_recent` most
/// recently inserted. Full linear scan. Returns nothing if no entry is
/// eligible.
std::optional<MatchResult> query(const DescriptorDatabase& db, const FrameDescriptor& probe,
                                 std::size_t exclude_recent = 30, int window = 2,
                                 int threads = 1);

// LIRIS1 descriptor file: "LIRIS1\0", u32 LE frame count, rows, cols,
// num_filters; then per frame a u64 LE frame id, rows·cols iris bytes and
// the feature bits LSB-first in [filter][plane][row][col] order, padded to
// a byte boundary.
void write_database(std::ostream& os, const DescriptorDatabase& db);
void write_database(const std::filesystem::path& path, const DescriptorDatabase& db);
DescriptorDatabase read_database(std::istream& is, int threads = 1);
DescriptorDatabase read_database(const std::filesystem::path& path, int threads = 1);

}  // namespace liris
