#pragma once

#include "liris/gabor.hpp"
#include "liris/iris.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace liris {

/// Settings shared by the command-line tools. Built from an optional
/// `key = value` file, then overridden by flags.
struct RunConfig {
  IrisConfig iris;
  GaborConfig gabor;
  int window = 2;                 // Hamming search half-width, columns
  std::size_t exclude_recent = 30;
  double loop_radius = 4.0;       // meters
  int threshold_count = 200;
  double keyframe_spacing = 0.0;  // meters; 0 keeps every frame
  int threads = 0;                // 0 = LIRIS_THREADS or hardware concurrency

  /// Sets one key (e.g. "radial_bins", "profile", "sigma_on_f"). Throws
  /// ContractError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);

  /// Throws ContractError on the first invalid value.
  void validate() const;

  int resolved_threads() const;
};

/// Parses `key = value` lines. `#` starts a comment, `[section]` headers are
/// accepted and ignored, values may be double-quoted. Throws FormatError
/// naming `origin` and the line on malformed input.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin = "<config>");

/// Applies every key of a config file on top of `base`.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace liris
