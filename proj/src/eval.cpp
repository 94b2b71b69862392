#include "liris/eval.hpp"

#include "liris/error.hpp"
#include "liris/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace liris {

GroundTruth GroundTruth::from_poses(const std::vector<Pose>& poses, double loop_radius) {
  GroundTruth gt;
  gt.loop_radius = loop_radius;
  gt.positions.reserve(poses.size());
  for (const Pose& p : poses) gt.positions.push_back(p.translation);
  gt.validate();
  return gt;
}

void GroundTruth::validate() const {
  if (!(loop_radius > 0.0)) throw ContractError("loop_radius must be > 0");
}

std::optional<std::pair<double, PRPoint>> PRCurve::best_f1() const {
  std::optional<std::pair<double, PRPoint>> best;
  for (const PRPoint& p : points) {
    const double sum = p.precision + p.recall;
    const double f1 = sum > 0.0 ? 2.0 * p.precision * p.recall / sum : 0.0;
    if (!best || f1 > best->first) best = std::make_pair(f1, p);
  }
  return best;
}

double PRCurve::max_recall_at_precision(double min_precision) const {
  double r = 0.0;
  for (const PRPoint& p : points) {
    if (p.precision >= min_precision) r = std::max(r, p.recall);
  }
  return r;
}

AffinityMatrix compute_affinity(std::span<const FrameDescriptor> descriptors, int window,
                                int threads) {
  const std::size_t n = descriptors.size();
  AffinityMatrix m(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      m.set(i, j, match_pair(descriptors[i], descriptors[j], window).distance);
  });
  return m;
}

std::vector<double> default_thresholds(std::span<const double> distances, int count) {
  if (distances.empty()) return {0.0};
  const auto [lo_it, hi_it] = std::minmax_element(distances.begin(), distances.end());
  const double lo = *lo_it, hi = *hi_it;
  if (count < 2 || !(hi > lo)) return {lo};
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  t.back() = hi;
  // Guard against repeated values from rounding on tiny ranges.
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

namespace {

void check_thresholds(std::span<const double> thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1]))
      throw ContractError("thresholds must be strictly increasing");
  }
}

PRPoint make_point(double threshold, std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  PRPoint p;
  p.threshold = threshold;
  p.tp = tp;
  p.fp = fp;
  p.fn = fn;
  p.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  p.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return p;
}

// Count of values <= t in a sorted vector.
std::uint64_t count_at_most(const std::vector<double>& sorted, double t) {
  return static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
}

}  // namespace

std::vector<std::optional<OnlineMatch>> run_online_queries(
    std::span<const FrameDescriptor> descriptors, std::size_t exclude_recent, int window,
    int threads) {
  const std::size_t n = descriptors.size();
  std::vector<std::optional<OnlineMatch>> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    if (i <= exclude_recent) return;
    const auto m = best_match(descriptors.first(i - exclude_recent), descriptors[i], window, 1);
    if (m) out[i] = OnlineMatch{m->index, m->result.distance, m->result.shift};
  });
  return out;
}

std::vector<std::optional<OnlineMatch>> online_queries_from_affinity(
    const AffinityMatrix& affinity, std::size_t exclude_recent) {
  const std::size_t n = affinity.size();
  std::vector<std::optional<OnlineMatch>> out(n);
  for (std::size_t i = exclude_recent + 1; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < i - exclude_recent; ++j) {
      if (affinity.at(j, i) < affinity.at(best, i)) best = j;
    }
    out[i] = OnlineMatch{best, affinity.at(best, i), 0};
  }
  return out;
}

std::vector<bool> protocol_a_loop_frames(const GroundTruth& gt, std::size_t exclude_recent) {
  const std::size_t n = gt.size();
  std::vector<bool> loops(n, false);
  for (std::size_t i = exclude_recent + 1; i < n; ++i) {
    for (std::size_t j = 0; j < i - exclude_recent; ++j) {
      if (gt.distance(i, j) < gt.loop_radius) {
        loops[i] = true;
        break;
      }
    }
  }
  return loops;
}

ProtocolACounts count_protocol_a(const GroundTruth& gt, std::size_t exclude_recent) {
  gt.validate();
  ProtocolACounts c;
  c.frames = gt.size();
  c.queried = gt.size() > exclude_recent + 1 ? gt.size() - exclude_recent - 1 : 0;
  const auto loops = protocol_a_loop_frames(gt, exclude_recent);
  c.true_loops = static_cast<std::size_t>(std::count(loops.begin(), loops.end(), true));
  return c;
}

PRCurve protocol_a_curve(std::span<const std::optional<OnlineMatch>> matches,
                         const GroundTruth& gt, std::size_t exclude_recent,
                         std::span<const double> thresholds, const std::vector<bool>* mask) {
  gt.validate();
  if (matches.size() != gt.size())
    throw ContractError("protocol A: descriptor and ground-truth counts differ");
  if (mask && mask->size() != gt.size()) throw ContractError("protocol A: mask size differs");
  check_thresholds(thresholds);

  const auto loops = protocol_a_loop_frames(gt, exclude_recent);
  std::uint64_t gt_loops = 0;
  std::vector<double> correct, wrong;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    if (loops[i]) ++gt_loops;
    if (!matches[i]) continue;
    const bool hit = gt.distance(i, matches[i]->candidate) < gt.loop_radius;
    (hit ? correct : wrong).push_back(matches[i]->distance);
  }
  std::sort(correct.begin(), correct.end());
  std::sort(wrong.begin(), wrong.end());

  PRCurve curve;
  for (double t : thresholds) {
    const std::uint64_t tp = count_at_most(correct, t);
    const std::uint64_t fp = count_at_most(wrong, t);
    curve.points.push_back(make_point(t, tp, fp, gt_loops - tp));
  }
  return curve;
}

PRCurve protocol_a(std::span<const FrameDescriptor> descriptors, const GroundTruth& gt,
                   std::size_t exclude_recent, std::span<const double> thresholds, int window,
                   int threads) {
  if (descriptors.size() != gt.size())
    throw ContractError("protocol A: descriptor and ground-truth counts differ");
  const auto matches = run_online_queries(descriptors, exclude_recent, window, threads);
  return protocol_a_curve(matches, gt, exclude_recent, thresholds);
}

ProtocolBCounts count_protocol_b(const GroundTruth& gt) {
  gt.validate();
  ProtocolBCounts c;
  const std::size_t n = gt.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (gt.distance(i, j) <= gt.loop_radius) {
        c.positive += 2;
      } else {
        c.negative += 2;
      }
    }
  }
  return c;
}

PRCurve protocol_b_curve(const AffinityMatrix& affinity, const GroundTruth& gt,
                         std::span<const double> thresholds) {
  gt.validate();
  if (affinity.size() != gt.size())
    throw ContractError("protocol B: affinity and ground-truth sizes differ");
  check_thresholds(thresholds);
  std::vector<double> pos, neg;
  const std::size_t n = gt.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      (gt.distance(i, j) <= gt.loop_radius ? pos : neg).push_back(affinity.at(i, j));
    }
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const std::uint64_t positives = 2 * pos.size();
  PRCurve curve;
  for (double t : thresholds) {
    const std::uint64_t tp = 2 * count_at_most(pos, t);
    const std::uint64_t fp = 2 * count_at_most(neg, t);
    curve.points.push_back(make_point(t, tp, fp, positives - tp));
  }
  return curve;
}

PRCurve protocol_b(std::span<const FrameDescriptor> descriptors, const GroundTruth& gt,
                   std::span<const double> thresholds, int window, int threads) {
  if (descriptors.size() != gt.size())
    throw ContractError("protocol B: descriptor and ground-truth counts differ");
  return protocol_b_curve(compute_affinity(descriptors, window, threads), gt, thresholds);
}

TimingStats summarize_timings(std::vector<double> samples) {
  TimingStats s;
  s.pairs = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const std::size_t n = samples.size();
  s.mean = sum / static_cast<double>(n);
  s.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
  s.min = samples.front();
  s.max = samples.back();
  return s;
}

std::vector<double> benchmark_matching(std::span<const FrameDescriptor> descriptors,
                                       std::size_t trials, const LoGGaborBank& bank,
                                       int window) {
  if (descriptors.size() < 2) throw ContractError("benchmark needs at least 2 descriptors");
  if (trials == 0) throw ContractError("benchmark needs at least 1 trial");
  using Clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(trials * (descriptors.size() - 1));
  volatile double sink = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const FrameDescriptor& probe = descriptors[t % descriptors.size()];
    for (std::size_t j = 0; j < descriptors.size(); ++j) {
      if (j == t % descriptors.size()) continue;
      const FrameDescriptor& other = descriptors[j];
      const auto start = Clock::now();
      FrameDescriptor candidate(other.frame_id, other.iris,
                                extract_binary_features(other.iris, bank));
      const MatchResult r = match_pair(probe, candidate, window);
      const auto stop = Clock::now();
      sink = sink + r.distance;
      samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
  }
  return samples;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.precision(9);
  return os;
}

}  // namespace

void write_affinity_csv(const std::filesystem::path& path, const AffinityMatrix& m) {
  auto os = open_output(path);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? "," : "") << m.at(i, j);
    os << '\n';
  }
}

void write_affinity_pgm(const std::filesystem::path& path, const AffinityMatrix& m) {
  const int n = static_cast<int>(m.size());
  IrisImage img(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = std::clamp(m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), 0.0, 1.0);
      img.at(i, j) = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  write_pgm(path, img);
}

void write_pr_csv(const std::filesystem::path& path, const PRCurve& curve) {
  auto os = open_output(path);
  os << "threshold,precision,recall,tp,fp,fn\n";
  for (const PRPoint& p : curve.points) {
    os << p.threshold << ',' << p.precision << ',' << p.recall << ',' << p.tp << ',' << p.fp
       << ',' << p.fn << '\n';
  }
}

void write_timing_csv(const std::filesystem::path& path, std::span<const double> samples) {
  auto os = open_output(path);
  os << "pair,seconds\n";
  for (std::size_t i = 0; i < samples.size(); ++i) os << i << ',' << samples[i] << '\n';
}

}  // namespace liris
