// liris: extract | eval | bench | synth

#include "liris/config.hpp"
#include "liris/error.hpp"
#include "liris/eval.hpp"
#include "liris/gabor.hpp"
#include "liris/matcher.hpp"
#include "liris/parallel.hpp"
#include "liris/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace liris;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that feed RunConfig. Unset optionals leave the file/default value.
struct ConfigFlags {
  std::string config_file;
  std::optional<std::string> profile, height_axis;
  std::optional<double> y_low, y_high, max_range, base_wavelength, wavelength_multiplier,
      sigma_on_f, loop_radius, keyframe_spacing;
  std::optional<int> radial_bins, angular_bins, num_filters, window, thresholds, threads;
  std::optional<long long> exclude_recent;

  void add_iris(CLI::App* app) {
    app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--profile", profile, "sensor profile: hdl64 | vlp16");
    app->add_option("--y-low", y_low, "lowest encoded height, m");
    app->add_option("--y-high", y_high, "highest encoded height, m");
    app->add_option("--height-axis", height_axis, "vertical axis: x | y | z");
    app->add_option("--radial-bins", radial_bins);
    app->add_option("--angular-bins", angular_bins);
    app->add_option("--max-range", max_range, "m");
  }
  void add_gabor(CLI::App* app) {
    app->add_option("--filters", num_filters, "number of log-Gabor filters");
    app->add_option("--base-wavelength", base_wavelength, "pixels");
    app->add_option("--wavelength-multiplier", wavelength_multiplier);
    app->add_option("--sigma-on-f", sigma_on_f);
  }
  void add_threads(CLI::App* app) {
    app->add_option("--threads", threads, "worker threads (default: LIRIS_THREADS or all cores)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) cfg = load_config(config_file, cfg);
    auto put = [&](const char* key, const auto& opt) {
      if (opt) {
        std::ostringstream os;
        os.precision(17);
        os << *opt;
        cfg.set(key, os.str());
      }
    };
    put("profile", profile);
    put("height_axis", height_axis);
    put("y_low", y_low);
    put("y_high", y_high);
    put("radial_bins", radial_bins);
    put("angular_bins", angular_bins);
    put("max_range", max_range);
    put("num_filters", num_filters);
    put("base_wavelength", base_wavelength);
    put("wavelength_multiplier", wavelength_multiplier);
    put("sigma_on_f", sigma_on_f);
    put("window", window);
    put("exclude_recent", exclude_recent);
    put("loop_radius", loop_radius);
    put("thresholds", thresholds);
    put("keyframe_spacing", keyframe_spacing);
    put("threads", threads);
    cfg.validate();
    return cfg;
  }
};

// Writes through a sibling temporary so failures leave no partial output.
template <typename Fn>
void write_atomically(const fs::path& target, Fn&& write) {
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    write(tmp);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

std::vector<std::pair<std::uint64_t, fs::path>> list_frames(const fs::path& seq_dir) {
  if (!fs::is_directory(seq_dir)) throw UsageError("not a directory: " + seq_dir.string());
  fs::path dir = seq_dir;
  if (fs::is_directory(seq_dir / "velodyne")) dir = seq_dir / "velodyne";
  std::vector<std::pair<std::uint64_t, fs::path>> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".bin") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit))
      throw FormatError(entry.path().string() + ": frame name is not numeric");
    frames.emplace_back(std::stoull(stem), entry.path());
  }
  std::sort(frames.begin(), frames.end());
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].first == frames[i - 1].first)
      throw FormatError("duplicate frame number in " + dir.string() + ": " +
                        frames[i].second.filename().string());
  }
  return frames;
}

fs::path find_poses(const fs::path& seq_dir) {
  for (const fs::path& p : {seq_dir / "poses.txt", seq_dir.parent_path() / "poses.txt"}) {
    if (fs::is_regular_file(p)) return p;
  }
  return {};
}

int cmd_extract(const fs::path& seq_dir, const fs::path& out_db, const fs::path& poses_out,
                const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  auto frames = list_frames(seq_dir);

  std::vector<Pose> poses;
  const fs::path poses_path = find_poses(seq_dir);
  if (!poses_path.empty()) poses = read_kitti_poses(poses_path);

  if (cfg.keyframe_spacing > 0.0) {
    if (poses.empty()) throw UsageError("--keyframe-spacing needs poses.txt in " + seq_dir.string());
    if (poses.size() != frames.size())
      throw FormatError(poses_path.string() + ": " + std::to_string(poses.size()) +
                        " poses for " + std::to_string(frames.size()) + " frames");
    const auto keys = select_keyframes(poses, cfg.keyframe_spacing);
    decltype(frames) kept;
    std::vector<Pose> kept_poses;
    for (std::size_t k : keys) {
      kept.push_back(frames[k]);
      kept_poses.push_back(poses[k]);
    }
    frames = std::move(kept);
    poses = std::move(kept_poses);
  }

  const LoGGaborBank& bank = cached_filter_bank(cfg.gabor, cfg.iris.angular_bins);
  std::vector<FrameDescriptor> built(frames.size());
  std::vector<std::size_t> dropped(frames.size(), 0);
  parallel_for(frames.size(), cfg.resolved_threads(), [&](std::size_t i) {
    const PointCloud cloud = read_kitti_bin(frames[i].second);
    dropped[i] = cloud.dropped_nonfinite;
    built[i] = make_descriptor(frames[i].first, generate_iris(cloud, cfg.iris), bank);
  });
  DescriptorDatabase db;
  for (auto& d : built) db.append(std::move(d));

  write_atomically(out_db, [&](const fs::path& p) { write_database(p, db); });
  if (!poses_out.empty()) {
    if (poses.empty()) throw UsageError("--poses-out needs poses.txt in " + seq_dir.string());
    write_atomically(poses_out, [&](const fs::path& p) { write_kitti_poses(p, poses); });
  }
  std::size_t total_dropped = 0;
  for (std::size_t d : dropped) total_dropped += d;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("extracted %zu frames into %s in %.3f s (dropped %zu non-finite points)\n",
              db.size(), out_db.string().c_str(), secs, total_dropped);
  return 0;
}

void print_point(const char* label, const PRPoint& p) {
  std::printf("%s threshold=%.6f precision=%.6f recall=%.6f tp=%llu fp=%llu fn=%llu\n", label,
              p.threshold, p.precision, p.recall, static_cast<unsigned long long>(p.tp),
              static_cast<unsigned long long>(p.fp), static_cast<unsigned long long>(p.fn));
}

int cmd_eval(const fs::path& db_path, const fs::path& poses_path, const std::string& protocol,
             const fs::path& out_dir, std::optional<double> online_threshold,
             const RunConfig& cfg) {
  const int threads = cfg.resolved_threads();
  const auto poses = read_kitti_poses(poses_path);
  const DescriptorDatabase db = read_database(db_path, threads);
  if (db.size() != poses.size()) {
    throw FormatError("descriptor file has " + std::to_string(db.size()) + " frames but " +
                      poses_path.string() + " has " + std::to_string(poses.size()) + " poses");
  }
  const GroundTruth gt = GroundTruth::from_poses(poses, cfg.loop_radius);
  fs::create_directories(out_dir);

  const AffinityMatrix affinity = compute_affinity(db.entries(), cfg.window, threads);
  PRCurve curve;
  std::string counts;
  if (protocol == "A") {
    const auto matches = online_queries_from_affinity(affinity, cfg.exclude_recent);
    std::vector<double> distances;
    for (const auto& m : matches)
      if (m) distances.push_back(m->distance);
    std::vector<double> thresholds = default_thresholds(distances, cfg.threshold_count);
    if (online_threshold) {
      thresholds.push_back(*online_threshold);
      std::sort(thresholds.begin(), thresholds.end());
      thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    }
    curve = protocol_a_curve(matches, gt, cfg.exclude_recent, thresholds);
    const auto c = count_protocol_a(gt, cfg.exclude_recent);
    counts = "frames=" + std::to_string(c.frames) + " true_loops=" + std::to_string(c.true_loops);
  } else {
    std::vector<double> distances;
    for (std::size_t i = 0; i < affinity.size(); ++i)
      for (std::size_t j = i + 1; j < affinity.size(); ++j) distances.push_back(affinity.at(i, j));
    std::vector<double> thresholds = default_thresholds(distances, cfg.threshold_count);
    if (online_threshold) {
      thresholds.push_back(*online_threshold);
      std::sort(thresholds.begin(), thresholds.end());
      thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    }
    curve = protocol_b_curve(affinity, gt, thresholds);
    const auto c = count_protocol_b(gt);
    counts = "frames=" + std::to_string(db.size()) + " positives=" + std::to_string(c.positive) +
             " negatives=" + std::to_string(c.negative);
  }

  write_atomically(out_dir / ("pr_" + protocol + ".csv"),
                   [&](const fs::path& p) { write_pr_csv(p, curve); });
  write_atomically(out_dir / "affinity.csv",
                   [&](const fs::path& p) { write_affinity_csv(p, affinity); });
  write_atomically(out_dir / "affinity.pgm",
                   [&](const fs::path& p) { write_affinity_pgm(p, affinity); });

  const auto best = curve.best_f1();
  std::printf("protocol=%s %s best_f1=%.6f threshold=%.6f\n", protocol.c_str(), counts.c_str(),
              best ? best->first : 0.0, best ? best->second.threshold : 0.0);
  if (online_threshold) {
    for (const PRPoint& p : curve.points)
      if (p.threshold == *online_threshold) print_point("at", p);
  }
  return 0;
}

int cmd_bench(const fs::path& db_path, std::size_t trials, const fs::path& out_csv,
              RunConfig cfg) {
  if (trials == 0) throw UsageError("--trials must be >= 1");
  const DescriptorDatabase db = read_database(db_path, cfg.resolved_threads());
  if (db.size() < 2) throw UsageError("benchmark needs a descriptor file with >= 2 frames");
  cfg.gabor.num_filters = db[0].features.num_filters();
  cfg.validate();
  const LoGGaborBank& bank = cached_filter_bank(cfg.gabor, db[0].iris.cols());
  const auto samples = benchmark_matching(db.entries(), trials, bank, cfg.window);
  const TimingStats s = summarize_timings(samples);
  if (!out_csv.empty())
    write_atomically(out_csv, [&](const fs::path& p) { write_timing_csv(p, samples); });
  std::printf("pairs=%zu mean=%.6f median=%.6f p95=%.6f min=%.6f max=%.6f (seconds per pair)\n",
              s.pairs, s.mean, s.median, s.p95, s.min, s.max);
  return 0;
}

struct SynthFlags {
  int frames = 100;
  double revisit = 0.3;
  std::uint64_t seed = 1;
  bool jitter = false;
  double lateral_noise = 0.0;
  double yaw_noise = 0.0;
  double density = 0.01;
};

int cmd_synth(const fs::path& out_dir, const SynthFlags& f, const RunConfig& cfg) {
  if (f.frames < 2) throw UsageError("--frames must be >= 2");
  synth::WorldParams wp;
  wp.profile = cfg.iris.profile;
  wp.density = f.density;
  wp.extent = std::max(150.0, 0.5 * f.frames * 1.2 + cfg.iris.max_range);
  const auto world = synth::SyntheticWorld::generate(f.seed, wp);
  synth::TrajectoryOptions topt;
  topt.lateral_noise = f.lateral_noise;
  topt.yaw_noise_deg = f.yaw_noise;
  topt.seed = f.seed;
  const auto traj = synth::loop_trajectory(world, f.frames, f.revisit, topt);
  synth::ScanOptions sopt;
  sopt.jitter = f.jitter;
  sopt.jitter_seed = f.seed;
  std::vector<PointCloud> clouds(traj.poses.size());
  parallel_for(clouds.size(), cfg.resolved_threads(), [&](std::size_t i) {
    clouds[i] = synth::scan_from(world, traj.poses[i], cfg.iris, sopt);
  });
  synth::export_kitti_sequence(out_dir, clouds, traj.poses);
  std::FILE* kinds = std::fopen((out_dir / "kinds.csv").string().c_str(), "w");
  if (kinds == nullptr) throw std::runtime_error("cannot write kinds.csv");
  std::fprintf(kinds, "frame,kind,source\n");
  for (std::size_t i = 0; i < traj.kinds.size(); ++i) {
    const char* k = traj.kinds[i] == synth::FrameKind::Original        ? "original"
                    : traj.kinds[i] == synth::FrameKind::SameDirection ? "same"
                                                                       : "opposite";
    std::fprintf(kinds, "%zu,%s,%ld\n", i, k, traj.source[i]);
  }
  std::fclose(kinds);
  std::printf("wrote %zu frames to %s\n", clouds.size(), out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR-Iris place recognition: descriptors, matching and evaluation"};
  app.require_subcommand(1);

  ConfigFlags flags;

  auto* extract = app.add_subcommand("extract", "build a descriptor file from a KITTI sequence");
  std::string seq_dir, out_db, poses_out;
  extract->add_option("seq_dir", seq_dir, "directory of NNNNNN.bin frames")->required();
  extract->add_option("-o,--out", out_db, "output descriptor file")->required();
  extract->add_option("--keyframe-spacing", flags.keyframe_spacing,
                      "keep frames >= this many meters apart (needs poses.txt; 0 = all)");
  extract->add_option("--poses-out", poses_out, "write the kept frames' poses here");
  flags.add_iris(extract);
  flags.add_gabor(extract);
  flags.add_threads(extract);

  auto* eval = app.add_subcommand("eval", "precision-recall and affinity outputs");
  std::string db_path, poses_path, out_dir = ".", protocol = "A";
  std::optional<double> online_threshold;
  eval->add_option("db", db_path, "descriptor file")->required()->check(CLI::ExistingFile);
  eval->add_option("--poses", poses_path, "KITTI poses, one per frame")->required()->check(CLI::ExistingFile);
  eval->add_option("--protocol", protocol, "A (online) or B (pairwise)")
      ->check(CLI::IsMember({"A", "B"}));
  eval->add_option("--out-dir", out_dir, "directory for CSV/PGM outputs");
  eval->add_option("--exclude", flags.exclude_recent, "Protocol A: recent keyframes excluded");
  eval->add_option("--loop-radius", flags.loop_radius, "ground-truth loop radius, m");
  eval->add_option("--thresholds", flags.thresholds, "number of swept thresholds");
  eval->add_option("--window", flags.window, "Hamming search half-width, columns");
  eval->add_option("--threshold", online_threshold, "also report the curve at this d_f");
  eval->add_option("--config", flags.config_file)->check(CLI::ExistingFile);
  flags.add_threads(eval);

  auto* bench = app.add_subcommand("bench", "time feature extraction + matching per pair");
  std::string bench_db, bench_csv;
  std::size_t trials = 1;
  bench->add_option("db", bench_db, "descriptor file")->required()->check(CLI::ExistingFile);
  bench->add_option("--trials", trials, "probe frames to time against all others");
  bench->add_option("--out", bench_csv, "per-pair timing CSV");
  bench->add_option("--window", flags.window);
  flags.add_gabor(bench);
  bench->add_option("--config", flags.config_file)->check(CLI::ExistingFile);
  flags.add_threads(bench);

  auto* synth_cmd = app.add_subcommand("synth", "export a synthetic loop sequence as KITTI files");
  std::string synth_dir;
  SynthFlags sf;
  synth_cmd->add_option("out_dir", synth_dir)->required();
  synth_cmd->add_option("--frames", sf.frames);
  synth_cmd->add_option("--revisit", sf.revisit, "fraction of frames that revisit");
  synth_cmd->add_option("--seed", sf.seed);
  synth_cmd->add_flag("--jitter", sf.jitter, "off-grid ray azimuths");
  synth_cmd->add_option("--lateral-noise", sf.lateral_noise, "revisit lateral offset, m");
  synth_cmd->add_option("--yaw-noise", sf.yaw_noise, "revisit yaw perturbation, degrees");
  synth_cmd->add_option("--density", sf.density, "obstacles per m^2");
  flags.add_iris(synth_cmd);
  flags.add_threads(synth_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const RunConfig cfg = flags.resolve();
    if (*extract) return cmd_extract(seq_dir, out_db, poses_out, cfg);
    if (*eval) return cmd_eval(db_path, poses_path, protocol, out_dir, online_threshold, cfg);
    if (*bench) return cmd_bench(bench_db, trials, bench_csv, cfg);
    if (*synth_cmd) return cmd_synth(synth_dir, sf, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
