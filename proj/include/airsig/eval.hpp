#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "airsig/trajectory.hpp"

namespace airsig::eval {

// --- Dataset manifest ----------------------------------------------------------
// One line per sample: signer_id,sample_id,kind,target_id,path. For genuine
// samples target_id == signer_id; for forgeries signer_id is the forger and
// target_id the imitated signer.
struct ManifestEntry {
  enum class Kind { genuine, forgery };
  int signer_id = 0;
  int sample_id = 0;
  Kind kind = Kind::genuine;
  int target_id = 0;
  std::string path;
};
using Manifest = std::vector<ManifestEntry>;

void write_manifest(const std::string& path, const Manifest& manifest);
Manifest read_manifest(const std::string& path);

// --- Dataset partitioning --------------------------------------------------------
struct SignerSplit {
  std::vector<int> train, validation, test;  // genuine sample ids
  std::vector<int> forgeries;                // forgery sample ids (by target)
};

struct DatasetSplit {
  std::map<int, SignerSplit> signers;
};

// 16/4/5 genuine partition per signer (proportional when fewer samples);
// all forgeries reserved for verification. Deterministic in seed.
DatasetSplit make_split(const Manifest& manifest, std::uint64_t seed);

void write_split(const std::string& path, const DatasetSplit& split);
DatasetSplit read_split(const std::string& path);

// --- Recognition -----------------------------------------------------------------
// Fraction of predictions equal to labels; throws on empty input.
double recognition_accuracy(const std::vector<int>& predicted,
                            const std::vector<int>& labels);

// --- Verification trials -----------------------------------------------------------
enum class TrialMode { random_forgery, skilled_forgery };

// Test-set view for scoring: label-indexed genuine test samples and
// forgeries tagged with their target label.
struct EvalSet {
  std::vector<std::pair<int, const traj::Mat*>> test_genuine;
  std::vector<std::pair<int, const traj::Mat*>> forgeries;
  std::size_t num_classes = 0;
};

struct TrialScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

// score_fn(sample) -> per-class probabilities; the trial score for a claimed
// identity is the claimed class's probability. Genuine trials claim the true
// signer; random mode claims every other signer in turn; skilled mode claims
// each forgery's target.
using ScoreFn = std::function<std::vector<double>(const traj::Mat&)>;
TrialScores verification_trials(const ScoreFn& score_fn, const EvalSet& set,
                                TrialMode mode);

// --- ROC / EER -----------------------------------------------------------------------
struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;  // impostor scores >= threshold
  double frr = 0.0;  // genuine scores < threshold
};

struct RocResult {
  std::vector<RocPoint> points;  // thresholds ascending
  double eer = 0.0;
};

// Threshold sweep over the union of scores with linear interpolation at the
// FAR/FRR crossing. Throws on an empty score set.
RocResult roc_eer(std::vector<double> genuine_scores,
                  std::vector<double> impostor_scores);

// --- Report ------------------------------------------------------------------------------
struct VerificationReport {
  double recognition_accuracy = 0.0;
  RocResult roc_random, roc_skilled;
  std::size_t genuine_trials = 0;
  std::size_t random_impostor_trials = 0;
  std::size_t skilled_impostor_trials = 0;
};

void write_report(const std::string& path, const VerificationReport& report);
VerificationReport read_report(const std::string& path);

// ROC curves (TAR vs FAR) as a standalone SVG.
void write_roc_svg(const std::string& path, const VerificationReport& report);

}  // namespace airsig::eval
