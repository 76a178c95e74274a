#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "airsig/detect.hpp"
#include "airsig/nn.hpp"
#include "airsig/stereo.hpp"
#include "airsig/synth.hpp"

namespace airsig::cfg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything the CLI needs, with library defaults. A config file overrides
// defaults; command-line flags override the file.
struct PipelineConfig {
  stereo::CameraRig rig;
  detect::BandPair bands;
  synth::SynthParams synth;
  nn::TrainConfig train;

  int signers = 8;
  int genuine_per_signer = 25;
  int forgeries_per_signer = 12;
  std::uint64_t synth_seed = 1;
  std::uint64_t split_seed = 1;
  std::size_t spline_length = traj::kDefaultSplineLength;
  double dropout = 0.25;
};

// Flat `key = value` lines, '#' comments. Unknown keys are an error.
PipelineConfig load_config(const std::string& path,
                           PipelineConfig base = PipelineConfig{});

}  // namespace airsig::cfg
