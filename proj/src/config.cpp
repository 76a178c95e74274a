#include "airsig/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace airsig::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <typename T>
void parse_into(const std::string& value, T& target, const std::string& key) {
  std::istringstream ss(value);
  ss >> target;
  if (!ss || !(ss >> std::ws).eof())
    throw ConfigError("bad value for '" + key + "': " + value);
}

void parse_into(const std::string& value, std::uint8_t& target,
                const std::string& key) {
  int v = 0;
  parse_into(value, v, key);
  if (v < 0 || v > 255) throw ConfigError("value out of byte range: " + key);
  target = static_cast<std::uint8_t>(v);
}

}  // namespace

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);

  std::map<std::string, std::function<void(const std::string&)>> setters;
  auto bind = [&](const std::string& key, auto& field) {
    setters[key] = [&field, key](const std::string& v) {
      parse_into(v, field, key);
    };
  };

  bind("rig.focal_length", base.rig.focal_length);
  bind("rig.cx", base.rig.cx);
  bind("rig.cy", base.rig.cy);
  bind("rig.baseline", base.rig.baseline);
  bind("rig.image_width", base.rig.image_width);
  bind("rig.image_height", base.rig.image_height);

  bind("bands.orange.r_lo", base.bands.orange.r_lo);
  bind("bands.orange.r_hi", base.bands.orange.r_hi);
  bind("bands.orange.g_lo", base.bands.orange.g_lo);
  bind("bands.orange.g_hi", base.bands.orange.g_hi);
  bind("bands.orange.b_lo", base.bands.orange.b_lo);
  bind("bands.orange.b_hi", base.bands.orange.b_hi);
  bind("bands.green.r_lo", base.bands.green.r_lo);
  bind("bands.green.r_hi", base.bands.green.r_hi);
  bind("bands.green.g_lo", base.bands.green.g_lo);
  bind("bands.green.g_hi", base.bands.green.g_hi);
  bind("bands.green.b_lo", base.bands.green.b_lo);
  bind("bands.green.b_hi", base.bands.green.b_hi);

  bind("synth.pen_length", base.synth.pen_length);
  bind("synth.frame_rate", base.synth.frame_rate);
  bind("synth.sigma_intra", base.synth.sigma_intra);
  bind("synth.sigma_forge", base.synth.sigma_forge);
  bind("synth.occlusion_fraction", base.synth.occlusion_fraction);
  bind("synth.ball_radius", base.synth.ball_radius);
  bind("synth.signers", base.signers);
  bind("synth.genuine_per_signer", base.genuine_per_signer);
  bind("synth.forgeries_per_signer", base.forgeries_per_signer);
  bind("synth.seed", base.synth_seed);

  bind("split.seed", base.split_seed);
  bind("traj.spline_length", base.spline_length);

  bind("train.learning_rate", base.train.learning_rate);
  bind("train.beta1", base.train.beta1);
  bind("train.beta2", base.train.beta2);
  bind("train.adam_epsilon", base.train.adam_epsilon);
  bind("train.batch_size", base.train.batch_size);
  bind("train.max_epochs", base.train.max_epochs);
  bind("train.seed", base.train.seed);
  bind("train.dropout", base.dropout);

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(row) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(row) + ": unknown key '" +
                        key + "'");
    it->second(value);
  }
  return base;
}

}  // namespace airsig::cfg
