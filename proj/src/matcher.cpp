#include "liris/matcher.hpp"

#include "liris/error.hpp"
#include "liris/parallel.hpp"
#include "liris/simd/kernels.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <tuple>

namespace liris {
namespace {

constexpr std::array<char, 7> kMagic = {'L', 'I', 'R', 'I', 'S', '1', '\0'};

void check_same_shape(const BinaryFeatureMap& a, const BinaryFeatureMap& b) {
  if (!a.same_shape(b)) throw ContractError("feature maps differ in shape");
}

}  // namespace

FrameDescriptor::FrameDescriptor(std::uint64_t id, IrisImage iris_image,
                                 BinaryFeatureMap feature_map)
    : frame_id(id), iris(std::move(iris_image)), features(std::move(feature_map)) {
  if (features.rows() != iris.rows() || features.cols() != iris.cols())
    throw ContractError("descriptor: iris and feature dimensions disagree");
  spectrum = IrisSpectrum(iris);
}

FrameDescriptor make_descriptor(std::uint64_t id, IrisImage iris, const LoGGaborBank& bank) {
  BinaryFeatureMap features = extract_binary_features(iris, bank);
  return FrameDescriptor(id, std::move(iris), std::move(features));
}

std::uint64_t hamming_bits(const BinaryFeatureMap& a, const BinaryFeatureMap& b) {
  check_same_shape(a, b);
  return simd::kernels().xor_popcount(a.words().data(), b.words().data(), a.words().size());
}

double hamming(const BinaryFeatureMap& a, const BinaryFeatureMap& b) {
  const std::uint64_t bits = hamming_bits(a, b);
  return a.total_bits() == 0 ? 0.0 : static_cast<double>(bits) / static_cast<double>(a.total_bits());
}

std::uint64_t hamming_bits_at_shift(const BinaryFeatureMap& a, const BinaryFeatureMap& b, int s) {
  check_same_shape(a, b);
  thread_local std::vector<std::uint64_t> rotated;
  rotated.resize(b.words().size());
  const int wpl = b.words_per_lane();
  for (int l = 0; l < b.lane_count(); ++l) {
    rotate_lane(b.lane(l),
                std::span<std::uint64_t>(rotated).subspan(static_cast<std::size_t>(l) * wpl, wpl),
                b.cols(), s);
  }
  return simd::kernels().xor_popcount(a.words().data(), rotated.data(), rotated.size());
}

MatchResult match_pair(const FrameDescriptor& p, const FrameDescriptor& q, int window) {
  if (!p.features.same_shape(q.features) || p.iris.rows() != q.iris.rows() ||
      p.iris.cols() != q.iris.cols())
    throw ContractError("match_pair: descriptor dimensions differ");
  if (window < 0) throw ContractError("match_pair: window must be >= 0");
  const int cols = p.iris.cols();
  MatchResult best;
  best.candidate_id = q.frame_id;
  if (cols == 0) {
    best.distance = 0.0;
    return best;
  }
  const int dx = phase_correlate(p.spectrum, q.spectrum).dx;
  const double total = static_cast<double>(p.features.total_bits());

  // (bits, cyclic distance from dx, offset) ordered lexicographically.
  std::tuple<std::uint64_t, int, int> best_key{UINT64_MAX, 0, 0};
  const int reach = std::min(window, cols / 2);
  for (int d = -reach; d <= reach; ++d) {
    const int s = ((dx + d) % cols + cols) % cols;
    const int cyclic = std::min(std::abs(d), cols - std::abs(d));
    const std::uint64_t bits = hamming_bits_at_shift(p.features, q.features, s);
    const std::tuple<std::uint64_t, int, int> key{bits, cyclic, s};
    if (key < best_key) best_key = key;
  }
  best.distance = total == 0.0 ? 0.0 : static_cast<double>(std::get<0>(best_key)) / total;
  best.shift = std::get<2>(best_key);
  return best;
}

void DescriptorDatabase::append(FrameDescriptor descriptor) {
  if (!entries_.empty()) {
    if (descriptor.frame_id <= entries_.back().frame_id)
      throw ContractError("database frame ids must be strictly increasing");
    if (!descriptor.features.same_shape(entries_.front().features))
      throw ContractError("database entries must share feature dimensions");
  }
  entries_.push_back(std::move(descriptor));
}

std::optional<IndexedMatch> best_match(std::span<const FrameDescriptor> candidates,
                                       const FrameDescriptor& probe, int window, int threads) {
  if (candidates.empty()) return std::nullopt;
  std::vector<MatchResult> results(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    results[i] = match_pair(candidates[i], probe, window);
    results[i].candidate_id = candidates[i].frame_id;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].distance < results[best].distance) best = i;
  }
  return IndexedMatch{best, results[best]};
}

std::optional<MatchResult> query(const DescriptorDatabase& db, const FrameDescriptor& probe,
                                 std::size_t exclude_recent, int window, int threads) {
  if (!db.empty() && probe.frame_id <= db.entries().back().frame_id)
    throw ContractError("query: probe frame id must exceed every database id");
  if (db.size() <= exclude_recent) return std::nullopt;
  auto m = best_match(db.entries().first(db.size() - exclude_recent), probe, window, threads);
  if (!m) return std::nullopt;
  return m->result;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  os.write(b, 8);
}

void read_exact(std::istream& is, void* dst, std::size_t n, const char* what) {
  is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw FormatError(std::string("descriptor file truncated in ") + what);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  read_exact(is, b, 4, what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is, const char* what) {
  unsigned char b[8];
  read_exact(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_database(std::ostream& os, const DescriptorDatabase& db) {
  int rows = 0, cols = 0, filters = 0;
  if (!db.empty()) {
    rows = db[0].iris.rows();
    cols = db[0].iris.cols();
    filters = db[0].features.num_filters();
  }
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, static_cast<std::uint32_t>(db.size()));
  put_u32(os, static_cast<std::uint32_t>(rows));
  put_u32(os, static_cast<std::uint32_t>(cols));
  put_u32(os, static_cast<std::uint32_t>(filters));

  std::vector<unsigned char> packed;
  for (const FrameDescriptor& d : db.entries()) {
    if (d.iris.rows() != rows || d.iris.cols() != cols || d.features.num_filters() != filters)
      throw ContractError("write_database: entries differ in dimensions");
    put_u64(os, d.frame_id);
    const auto px = d.iris.pixels();
    os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    packed.assign((d.features.total_bits() + 7) / 8, 0);
    std::size_t bit = 0;
    for (int l = 0; l < d.features.lane_count(); ++l) {
      const auto lane = d.features.lane(l);
      for (int c = 0; c < cols; ++c, ++bit) {
        if ((lane[static_cast<std::size_t>(c / 64)] >> (c % 64)) & 1u)
          packed[bit / 8] |= static_cast<unsigned char>(1u << (bit % 8));
      }
    }
    os.write(reinterpret_cast<const char*>(packed.data()),
             static_cast<std::streamsize>(packed.size()));
  }
  if (!os) throw std::runtime_error("write_database: stream error");
}

void write_database(const std::filesystem::path& path, const DescriptorDatabase& db) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write descriptor file: " + path.string());
  write_database(os, db);
}

DescriptorDatabase read_database(std::istream& is, int threads) {
  std::array<char, 7> magic{};
  read_exact(is, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw FormatError("not a LIRIS1 descriptor file (bad magic)");
  const std::uint32_t count = get_u32(is, "header");
  const std::uint32_t rows = get_u32(is, "header");
  const std::uint32_t cols = get_u32(is, "header");
  const std::uint32_t filters = get_u32(is, "header");
  if (rows > 1u << 16 || cols > 1u << 16 || filters > 64)
    throw FormatError("descriptor header dimensions out of range");

  struct Raw {
    std::uint64_t id;
    std::vector<std::uint8_t> pixels;
    BinaryFeatureMap features;
  };
  std::vector<Raw> raw;
  const std::size_t npx = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> packed;
  for (std::uint32_t f = 0; f < count; ++f) {
    Raw r{get_u64(is, "frame id"), std::vector<std::uint8_t>(npx),
          BinaryFeatureMap(static_cast<int>(filters), static_cast<int>(rows), static_cast<int>(cols))};
    read_exact(is, r.pixels.data(), npx, "iris pixels");
    packed.resize((r.features.total_bits() + 7) / 8);
    read_exact(is, packed.data(), packed.size(), "feature bits");
    std::size_t bit = 0;
    for (int l = 0; l < r.features.lane_count(); ++l) {
      auto lane = r.features.lane(l);
      for (int c = 0; c < static_cast<int>(cols); ++c, ++bit) {
        if ((packed[bit / 8] >> (bit % 8)) & 1u)
          lane[static_cast<std::size_t>(c / 64)] |= std::uint64_t{1} << (c % 64);
      }
    }
    raw.push_back(std::move(r));
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("descriptor file has trailing bytes after the last frame");

  std::vector<FrameDescriptor> built(raw.size());
  parallel_for(raw.size(), threads, [&](std::size_t i) {
    built[i] = FrameDescriptor(raw[i].id,
                               IrisImage(static_cast<int>(rows), static_cast<int>(cols),
                                         std::move(raw[i].pixels)),
                               std::move(raw[i].features));
  });
  DescriptorDatabase db;
  for (auto& d : built) db.append(std::move(d));
  return db;
}

DescriptorDatabase read_database(const std::filesystem::path& path, int threads) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open descriptor file: " + path.string());
  try {
    return read_database(is, threads);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace liris
