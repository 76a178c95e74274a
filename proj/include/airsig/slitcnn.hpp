#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airsig/nn.hpp"
#include "airsig/trajectory.hpp"

namespace airsig::slitcnn {

enum class Variant { tip_only, tiptail_single, two_stream };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Architecture hyperparameters. Defaults follow the published network:
// conv(rows x 30, 64) -> conv(1 x 8, 128) -> pool 2 -> fc 128 per stream,
// then fc 512 -> classes.
struct ModelSpec {
  Variant variant = Variant::two_stream;
  std::size_t t = traj::kDefaultSplineLength;
  std::size_t num_classes = 0;
  std::size_t conv1_channels = 64;
  std::size_t conv1_width = 30;
  std::size_t conv2_channels = 128;
  std::size_t conv2_width = 8;
  std::size_t stream_fc = 128;
  std::size_t fuse_fc = 512;
  double dropout = 0.25;

  std::size_t streams() const { return variant == Variant::two_stream ? 2 : 1; }
  std::size_t input_rows() const {
    return variant == Variant::tiptail_single ? 6 : 3;
  }
  std::size_t conv1_out_w() const { return t - conv1_width + 1; }
  std::size_t conv2_out_w() const { return conv1_out_w() - conv2_width + 1; }
  std::size_t pooled_w() const { return conv2_out_w() / 2; }
  std::size_t flatten_size() const { return conv2_channels * pooled_w(); }

  void validate() const;  // throws std::invalid_argument
};

struct StreamParams {
  nn::Tensor conv1_w, conv1_b;  // [64,1,rows,30], [64]
  nn::Tensor conv2_w, conv2_b;  // [128,64,1,8], [128]
  nn::Tensor fc_w, fc_b;        // [128, flatten], [128]
};

struct Parameters {
  std::vector<StreamParams> streams;
  nn::Tensor head1_w, head1_b;  // [512, 128*S], [512]
  nn::Tensor head2_w, head2_b;  // [classes, 512], [classes]
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainedModel {
  ModelSpec spec;
  Parameters params;
  std::vector<nn::AdamState> adam;  // optimizer state after training
  std::vector<EpochStats> history;
  std::int64_t best_epoch = -1;
};

// Views over all learnable tensors, ordered stably.
std::vector<std::pair<std::string, nn::Tensor*>> named_parameters(Parameters&);
std::vector<std::pair<std::string, const nn::Tensor*>> named_parameters(
    const Parameters&);

// Fan-in-scaled uniform weights, zero biases; deterministic in seed.
TrainedModel build_model(const ModelSpec& spec, std::uint64_t seed);

std::size_t parameter_count(const Parameters& params);

// Labelled trajectories; each sample is a t x 6 (or t x 3) matrix.
struct LabeledSet {
  std::vector<traj::Mat> samples;
  std::vector<int> labels;

  std::size_t size() const { return samples.size(); }
};

// Inference forward pass: class probabilities, one row per batch entry.
// Throws std::invalid_argument on shape mismatch.
nn::Tensor forward(const TrainedModel& model,
                   const std::vector<const traj::Mat*>& batch);
nn::Tensor forward(const TrainedModel& model, const traj::Mat& sample);

std::vector<int> predict(const TrainedModel& model, const LabeledSet& set,
                         std::size_t batch_size = 32);

// Mean cross-entropy and parameter gradients for one batch, dropout
// disabled. This is the hook the finite-difference suite drives.
double batch_loss(const TrainedModel& model,
                  const std::vector<const traj::Mat*>& batch,
                  const std::vector<int>& labels);
Parameters batch_gradients(const TrainedModel& model,
                           const std::vector<const traj::Mat*>& batch,
                           const std::vector<int>& labels, double* loss_out);

// Shuffled mini-batch Adam on cross-entropy; snapshots at every validation
// improvement and returns the best snapshot. Deterministic in cfg.seed.
TrainedModel train(TrainedModel model, const LabeledSet& train_set,
                   const LabeledSet& val_set, const nn::TrainConfig& cfg);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history);

}  // namespace airsig::slitcnn
