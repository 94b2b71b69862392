#include "liris/config.hpp"

#include "liris/error.hpp"
#include "liris/parallel.hpp"

#include <fstream>
#include <sstream>

namespace liris {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ContractError("config key '" + key + "': not a number: '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ContractError("config key '" + key + "': not an integer: '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "profile") {
    const HeightAxis axis = iris.profile.height_axis;
    iris.profile = SensorProfile::by_name(value);
    iris.profile.height_axis = axis;
  } else if (key == "y_low") {
    iris.profile.y_low = to_double(key, value);
  } else if (key == "y_high") {
    iris.profile.y_high = to_double(key, value);
  } else if (key == "height_axis") {
    if (value == "x") iris.profile.height_axis = HeightAxis::X;
    else if (value == "y") iris.profile.height_axis = HeightAxis::Y;
    else if (value == "z") iris.profile.height_axis = HeightAxis::Z;
    else throw ContractError("height_axis must be x, y or z");
  } else if (key == "radial_bins") {
    iris.radial_bins = static_cast<int>(to_int(key, value));
  } else if (key == "angular_bins") {
    iris.angular_bins = static_cast<int>(to_int(key, value));
  } else if (key == "max_range") {
    iris.max_range = to_double(key, value);
  } else if (key == "num_filters") {
    gabor.num_filters = static_cast<int>(to_int(key, value));
  } else if (key == "base_wavelength") {
    gabor.base_wavelength = to_double(key, value);
  } else if (key == "wavelength_multiplier") {
    gabor.wavelength_multiplier = to_double(key, value);
  } else if (key == "sigma_on_f") {
    gabor.sigma_on_f = to_double(key, value);
  } else if (key == "window") {
    window = static_cast<int>(to_int(key, value));
  } else if (key == "exclude_recent") {
    const long long v = to_int(key, value);
    if (v < 0) throw ContractError("exclude_recent must be >= 0");
    exclude_recent = static_cast<std::size_t>(v);
  } else if (key == "loop_radius") {
    loop_radius = to_double(key, value);
  } else if (key == "thresholds") {
    threshold_count = static_cast<int>(to_int(key, value));
  } else if (key == "keyframe_spacing") {
    keyframe_spacing = to_double(key, value);
  } else if (key == "threads") {
    threads = static_cast<int>(to_int(key, value));
  } else {
    throw ContractError("unknown config key: " + key);
  }
}

void RunConfig::validate() const {
  iris.validate();
  gabor.validate();
  if (iris.angular_bins < 2.0 * gabor.base_wavelength)
    throw ContractError("angular_bins must be >= 2 * base_wavelength");
  if (window < 0) throw ContractError("window must be >= 0");
  if (!(loop_radius > 0.0)) throw ContractError("loop_radius must be > 0");
  if (threshold_count < 1) throw ContractError("thresholds must be >= 1");
  if (!(keyframe_spacing >= 0.0)) throw ContractError("keyframe_spacing must be >= 0");
  if (threads < 0) throw ContractError("threads must be >= 0");
}

int RunConfig::resolved_threads() const { return threads > 0 ? threads : default_thread_count(); }

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw FormatError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : parse_key_values(ss.str(), path.string())) {
    try {
      base.set(k, v);
    } catch (const ContractError& e) {
      throw ContractError(path.string() + ": " + e.what());
    }
  }
  return base;
}

}  // namespace liris
