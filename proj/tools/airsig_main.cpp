// airsig — batch pipeline CLI: synthetic capture, detection, reconstruction,
// interpolation, augmentation, SliTCNN training and verification evaluation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "airsig/augment.hpp"
#include "airsig/config.hpp"
#include "airsig/detect.hpp"
#include "airsig/errors.hpp"
#include "airsig/eval.hpp"
#include "airsig/gradcheck.hpp"
#include "airsig/image.hpp"
#include "airsig/slitcnn.hpp"
#include "airsig/stereo.hpp"
#include "airsig/synth.hpp"
#include "airsig/trajectory.hpp"

namespace fs = std::filesystem;
using namespace airsig;

namespace {

// Exit codes: 2 config, 3 I/O, 4 data parse, 5 contract/domain violation.
enum ExitCode {
  kOk = 0,
  kOtherError = 1,
  kConfigError = 2,
  kIoError = 3,
  kParseError = 4,
  kContractError = 5,
};

struct CommonOpts {
  std::string config_path;
};

cfg::PipelineConfig resolve_config(const CommonOpts& common) {
  cfg::PipelineConfig config;
  if (!common.config_path.empty())
    config = cfg::load_config(common.config_path);
  if (!config.rig.valid())
    throw cfg::ConfigError("camera rig parameters are inconsistent");
  return config;
}

std::string two_digits(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

std::string four_digits(std::size_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", v);
  return buf;
}

int forger_for(int signer, int forgery_index, int signers) {
  return (signer + 1 + forgery_index % (signers - 1)) % signers;
}

// --- synth-generate ----------------------------------------------------------

struct SynthGenerateOpts {
  CommonOpts common;
  std::string out_dir;
  std::optional<int> signers, genuine, forgeries;
  std::optional<std::uint64_t> seed;
  std::string mode = "tiptail";
};

int cmd_synth_generate(const SynthGenerateOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);
  const int signers = opt.signers.value_or(config.signers);
  const int genuine = opt.genuine.value_or(config.genuine_per_signer);
  const int forgeries = opt.forgeries.value_or(config.forgeries_per_signer);
  const std::uint64_t seed = opt.seed.value_or(config.synth_seed);
  if (signers < 1) throw std::invalid_argument("need at least one signer");
  if (forgeries > 0 && signers < 2)
    throw std::invalid_argument("forgeries need at least two signers");

  const bool raw_mode = opt.mode == "raw";
  fs::create_directories(opt.out_dir);

  std::vector<synth::SignerModel> models;
  for (int s = 0; s < signers; ++s)
    models.push_back(synth::make_signer(s, seed, config.synth));

  auto emit = [&](const std::vector<synth::PenSample>& samples,
                  const std::string& rel_path) {
    const fs::path full = fs::path(opt.out_dir) / rel_path;
    if (raw_mode) {
      const auto frames = synth::render_stereo_frames(config.rig, samples,
                                                      config.synth);
      std::vector<detect::FrameDetection> dets;
      dets.reserve(frames.size());
      for (const auto& f : frames)
        dets.push_back(detect::detect_frame(f.left, f.right, config.bands));
      traj::write_raw_csv(full.string(),
                          detect::detections_to_raw(dets, config.rig.image_width,
                                                    config.rig.image_height));
    } else {
      traj::write_tiptail_csv(full.string(),
                              synth::tip_tail_from_samples(samples).points);
    }
  };

  eval::Manifest manifest;
  for (int s = 0; s < signers; ++s) {
    const std::string dir = "signer" + two_digits(s);
    fs::create_directories(fs::path(opt.out_dir) / dir);
    for (int g = 0; g < genuine; ++g) {
      const std::string rel = dir + "/genuine_" + two_digits(g) + ".csv";
      emit(synth::sample_genuine(models[s], g, config.synth), rel);
      manifest.push_back({s, g, eval::ManifestEntry::Kind::genuine, s, rel});
    }
    for (int f = 0; f < forgeries; ++f) {
      const int forger = forger_for(s, f, signers);
      const std::string rel = dir + "/forgery_" + two_digits(f) + ".csv";
      emit(synth::sample_forgery(models[s], models[forger], f, config.synth),
           rel);
      manifest.push_back({forger, f, eval::ManifestEntry::Kind::forgery, s,
                          rel});
    }
  }
  eval::write_manifest((fs::path(opt.out_dir) / "manifest.csv").string(),
                       manifest);
  std::cout << "generated " << signers << " signers x (" << genuine
            << " genuine + " << forgeries << " forgeries) in " << opt.out_dir
            << "\n";
  return kOk;
}

// --- render-stereo -----------------------------------------------------------

struct RenderStereoOpts {
  CommonOpts common;
  std::string out_dir;
  int signer = 0;
  int sample = 0;
  std::string kind = "genuine";
  std::optional<std::uint64_t> seed;
  double noise = 0.0;
  std::string truth_path;
};

int cmd_render_stereo(const RenderStereoOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);
  const std::uint64_t seed = opt.seed.value_or(config.synth_seed);

  const synth::SignerModel model =
      synth::make_signer(opt.signer, seed, config.synth);
  std::vector<synth::PenSample> samples;
  if (opt.kind == "genuine") {
    samples = synth::sample_genuine(model, opt.sample, config.synth);
  } else if (opt.kind == "forgery") {
    const int signers = std::max(config.signers, opt.signer + 1);
    const int forger_id = forger_for(opt.signer, opt.sample, signers);
    const synth::SignerModel forger =
        synth::make_signer(forger_id, seed, config.synth);
    samples = synth::sample_forgery(model, forger, opt.sample, config.synth);
  } else {
    throw std::invalid_argument("kind must be genuine or forgery");
  }

  synth::RenderOptions render;
  render.noise_amplitude = opt.noise;
  render.noise_seed = seed;
  const auto frames =
      synth::render_stereo_frames(config.rig, samples, config.synth, render);

  fs::create_directories(opt.out_dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string stem = four_digits(i);
    img::write_ppm((fs::path(opt.out_dir) / (stem + "_L.ppm")).string(),
                   frames[i].left);
    img::write_ppm((fs::path(opt.out_dir) / (stem + "_R.ppm")).string(),
                   frames[i].right);
  }
  if (!opt.truth_path.empty())
    traj::write_tiptail_csv(opt.truth_path,
                            synth::tip_tail_from_samples(samples).points);
  std::cout << "rendered " << frames.size() << " stereo frames to "
            << opt.out_dir << "\n";
  return kOk;
}

// --- detect --------------------------------------------------------------------

struct DetectOpts {
  CommonOpts common;
  std::string frames_dir;
  std::string out_path;
};

int cmd_detect(const DetectOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);

  std::vector<std::pair<std::string, fs::path>> lefts;
  for (const auto& entry : fs::directory_iterator(opt.frames_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= 10 && name.ends_with("_L.ppm"))
      lefts.emplace_back(name.substr(0, name.size() - 6), entry.path());
  }
  if (lefts.empty())
    throw IoError("no NNNN_L.ppm frames found in " + opt.frames_dir);
  std::sort(lefts.begin(), lefts.end());

  std::vector<detect::FrameDetection> dets;
  int width = 0, height = 0;
  for (const auto& [stem, left_path] : lefts) {
    const fs::path right_path =
        fs::path(opt.frames_dir) / (stem + "_R.ppm");
    const img::ImageRgb left = img::read_ppm(left_path.string());
    const img::ImageRgb right = img::read_ppm(right_path.string());
    width = left.width;
    height = left.height;
    dets.push_back(detect::detect_frame(left, right, config.bands));
  }
  traj::write_raw_csv(opt.out_path,
                      detect::detections_to_raw(dets, width, height));
  std::cout << "detected " << dets.size() << " frames -> " << opt.out_path
            << "\n";
  return kOk;
}

// --- reconstruct ----------------------------------------------------------------

struct ReconstructOpts {
  CommonOpts common;
  std::string in_path, out_path;
};

int cmd_reconstruct(const ReconstructOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);

  auto convert = [&](const fs::path& in, const fs::path& out,
                     traj::DeriveStats* stats) {
    traj::RawSequence seq = traj::read_raw_csv(in.string());
    seq.frame_width = config.rig.image_width;
    seq.frame_height = config.rig.image_height;
    const traj::TipTailTrajectory traj3d =
        traj::derive_tip_tail(seq, config.rig, stats);
    traj::write_tiptail_csv(out.string(), traj3d.points);
    return traj3d.points.rows;
  };

  if (fs::is_directory(opt.in_path)) {
    fs::create_directories(opt.out_path);
    std::size_t files = 0;
    traj::DeriveStats total;
    for (const auto& entry : fs::recursive_directory_iterator(opt.in_path)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), opt.in_path);
      if (entry.path().filename() == "manifest.csv") {
        fs::create_directories(fs::path(opt.out_path) / rel.parent_path());
        fs::copy_file(entry.path(), fs::path(opt.out_path) / rel,
                      fs::copy_options::overwrite_existing);
        continue;
      }
      if (entry.path().extension() != ".csv") continue;
      fs::create_directories(fs::path(opt.out_path) / rel.parent_path());
      traj::DeriveStats stats;
      convert(entry.path(), fs::path(opt.out_path) / rel, &stats);
      total.occluded_dropped += stats.occluded_dropped;
      total.degenerate_dropped += stats.degenerate_dropped;
      ++files;
    }
    std::cout << "reconstructed " << files << " files ("
              << total.occluded_dropped << " occluded, "
              << total.degenerate_dropped << " degenerate rows dropped)\n";
  } else {
    traj::DeriveStats stats;
    const std::size_t rows = convert(opt.in_path, opt.out_path, &stats);
    std::cout << "reconstructed " << rows << " rows ("
              << stats.occluded_dropped << " occluded, "
              << stats.degenerate_dropped << " degenerate dropped) -> "
              << opt.out_path << "\n";
  }
  return kOk;
}

// --- trace ---------------------------------------------------------------------

struct TraceOpts {
  std::string in_path, out_path;
  int size = 224;
};

int cmd_trace(const TraceOpts& opt) {
  const traj::RawSequence seq = traj::read_raw_csv(opt.in_path);
  img::write_pgm(opt.out_path, traj::render_trace_image(seq, opt.size));
  std::cout << "wrote " << opt.size << "x" << opt.size << " trace -> "
            << opt.out_path << "\n";
  return kOk;
}

// --- interpolate ------------------------------------------------------------------

struct InterpolateOpts {
  CommonOpts common;
  std::string in_path, out_path;
  std::optional<std::size_t> t;
};

int cmd_interpolate(const InterpolateOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);
  const std::size_t t = opt.t.value_or(config.spline_length);

  auto convert = [&](const fs::path& in, const fs::path& out) {
    const traj::Mat points = traj::read_tiptail_csv(in.string());
    traj::write_tiptail_csv(out.string(),
                            traj::bspline_resample(points, t).points);
  };

  if (fs::is_directory(opt.in_path)) {
    fs::create_directories(opt.out_path);
    std::size_t count = 0;
    for (const auto& entry : fs::recursive_directory_iterator(opt.in_path)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), opt.in_path);
      if (entry.path().filename() == "manifest.csv") {
        fs::create_directories(fs::path(opt.out_path) / rel.parent_path());
        fs::copy_file(entry.path(), fs::path(opt.out_path) / rel,
                      fs::copy_options::overwrite_existing);
        continue;
      }
      if (entry.path().extension() != ".csv") continue;
      fs::create_directories(fs::path(opt.out_path) / rel.parent_path());
      convert(entry.path(), fs::path(opt.out_path) / rel);
      ++count;
    }
    std::cout << "interpolated " << count << " files to length " << t << "\n";
  } else {
    convert(opt.in_path, opt.out_path);
    std::cout << "interpolated to length " << t << " -> " << opt.out_path
              << "\n";
  }
  return kOk;
}

// --- augment --------------------------------------------------------------------------

struct AugmentOpts {
  std::string in_dir, out_dir;
};

std::string format_grid_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

int cmd_augment(const AugmentOpts& opt) {
  const augment::AugmentGrid grid;
  fs::create_directories(opt.out_dir);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(opt.in_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv" ||
        entry.path().filename() == "manifest.csv")
      continue;
    const fs::path rel = fs::relative(entry.path(), opt.in_dir);
    fs::create_directories(fs::path(opt.out_dir) / rel.parent_path());

    traj::InterpolatedTrajectory traj;
    traj.points = traj::read_tiptail_csv(entry.path().string());
    const auto members = augment::augment_30(traj, grid);

    std::size_t member = 0;
    for (const double angle : grid.angles_deg)
      for (const char* plane : {"xz", "yz"})
        for (const double factor : grid.scale_factors) {
          const std::string name =
              rel.stem().string() + "_a" + format_grid_value(angle) + "_" +
              plane + "_f" + format_grid_value(factor) + ".csv";
          traj::write_tiptail_csv(
              (fs::path(opt.out_dir) / rel.parent_path() / name).string(),
              members[member].points);
          ++member;
        }
    ++files;
  }
  std::cout << "augmented " << files << " files x30 -> " << opt.out_dir
            << "\n";
  return kOk;
}

// --- split -----------------------------------------------------------------------------

struct SplitOpts {
  CommonOpts common;
  std::string manifest_path, out_path;
  std::optional<std::uint64_t> seed;
};

int cmd_split(const SplitOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);
  const eval::Manifest manifest = eval::read_manifest(opt.manifest_path);
  const eval::DatasetSplit split =
      eval::make_split(manifest, opt.seed.value_or(config.split_seed));
  eval::write_split(opt.out_path, split);
  std::cout << "split " << split.signers.size() << " signers -> "
            << opt.out_path << "\n";
  return kOk;
}

// --- dataset loading shared by train / evaluate ------------------------------------------

struct LoadedDataset {
  std::vector<int> class_of_signer_sorted;  // sorted signer ids
  slitcnn::LabeledSet train, validation, test;
  // forgeries as (target class index, sample)
  std::vector<std::pair<int, traj::Mat>> forgeries;
  std::size_t t = 0;
};

int class_index(const std::vector<int>& sorted_ids, int signer) {
  const auto it =
      std::lower_bound(sorted_ids.begin(), sorted_ids.end(), signer);
  if (it == sorted_ids.end() || *it != signer)
    throw std::invalid_argument("signer id missing from label space: " +
                                std::to_string(signer));
  return static_cast<int>(it - sorted_ids.begin());
}

LoadedDataset load_dataset(const std::string& data_dir,
                           const std::string& split_path,
                           bool load_forgeries) {
  const eval::Manifest manifest =
      eval::read_manifest((fs::path(data_dir) / "manifest.csv").string());
  const eval::DatasetSplit split = eval::read_split(split_path);

  LoadedDataset ds;
  for (const auto& e : manifest)
    if (e.kind == eval::ManifestEntry::Kind::genuine)
      ds.class_of_signer_sorted.push_back(e.signer_id);
  std::sort(ds.class_of_signer_sorted.begin(), ds.class_of_signer_sorted.end());
  ds.class_of_signer_sorted.erase(std::unique(ds.class_of_signer_sorted.begin(),
                                              ds.class_of_signer_sorted.end()),
                                  ds.class_of_signer_sorted.end());

  auto role_of = [&](int signer, int sample) -> std::string {
    const auto it = split.signers.find(signer);
    if (it == split.signers.end()) return "";
    const auto& s = it->second;
    auto has = [sample](const std::vector<int>& v) {
      return std::find(v.begin(), v.end(), sample) != v.end();
    };
    if (has(s.train)) return "train";
    if (has(s.validation)) return "val";
    if (has(s.test)) return "test";
    return "";
  };

  for (const auto& e : manifest) {
    const fs::path path = fs::path(data_dir) / e.path;
    if (e.kind == eval::ManifestEntry::Kind::forgery) {
      if (!load_forgeries) continue;
      traj::Mat m = traj::read_tiptail_csv(path.string());
      ds.t = m.rows;
      ds.forgeries.emplace_back(class_index(ds.class_of_signer_sorted,
                                            e.target_id),
                                std::move(m));
      continue;
    }
    const std::string role = role_of(e.signer_id, e.sample_id);
    if (role.empty()) continue;
    traj::Mat m = traj::read_tiptail_csv(path.string());
    ds.t = m.rows;
    const int label = class_index(ds.class_of_signer_sorted, e.signer_id);
    slitcnn::LabeledSet* set = role == "train"  ? &ds.train
                               : role == "val" ? &ds.validation
                                                : &ds.test;
    set->samples.push_back(std::move(m));
    set->labels.push_back(label);
  }
  return ds;
}

// --- train -----------------------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  std::string data_dir, split_path, out_path, history_path;
  std::string variant = "two-stream";
  bool augment = false;
  std::optional<std::size_t> epochs, batch;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainOpts& opt) {
  cfg::PipelineConfig config = resolve_config(opt.common);
  nn::TrainConfig train_cfg = config.train;
  if (opt.epochs) train_cfg.max_epochs = *opt.epochs;
  if (opt.batch) train_cfg.batch_size = *opt.batch;
  if (opt.lr) train_cfg.learning_rate = *opt.lr;
  if (opt.seed) train_cfg.seed = *opt.seed;

  LoadedDataset ds = load_dataset(opt.data_dir, opt.split_path, false);
  if (ds.train.size() == 0 || ds.validation.size() == 0)
    throw std::invalid_argument("train/validation split is empty");

  if (opt.augment) {
    slitcnn::LabeledSet expanded;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      traj::InterpolatedTrajectory traj;
      traj.points = ds.train.samples[i];
      for (auto& member : augment::augment_30(traj)) {
        expanded.samples.push_back(std::move(member.points));
        expanded.labels.push_back(ds.train.labels[i]);
      }
    }
    ds.train = std::move(expanded);
  }

  slitcnn::ModelSpec spec;
  spec.variant = slitcnn::variant_from_name(opt.variant);
  spec.t = ds.t;
  spec.num_classes = ds.class_of_signer_sorted.size();
  spec.dropout = config.dropout;

  slitcnn::TrainedModel model = slitcnn::build_model(spec, train_cfg.seed);
  model = slitcnn::train(std::move(model), ds.train, ds.validation, train_cfg);

  slitcnn::save_model(opt.out_path, model);
  if (!opt.history_path.empty())
    slitcnn::write_history_csv(opt.history_path, model.history);

  double best_acc = 0.0;
  for (const auto& e : model.history)
    best_acc = std::max(best_acc, e.val_accuracy);
  std::cout << "trained " << opt.variant << " on " << ds.train.size()
            << " samples (" << spec.num_classes << " classes, t=" << spec.t
            << "); best val accuracy " << best_acc << " at epoch "
            << model.best_epoch << " -> " << opt.out_path << "\n";
  return kOk;
}

// --- evaluate --------------------------------------------------------------------------

struct EvaluateOpts {
  CommonOpts common;
  std::string data_dir, split_path, model_path, report_path, svg_path;
};

int cmd_evaluate(const EvaluateOpts& opt) {
  const slitcnn::TrainedModel model = slitcnn::load_model(opt.model_path);
  LoadedDataset ds = load_dataset(opt.data_dir, opt.split_path, true);
  if (ds.test.size() == 0)
    throw std::invalid_argument("test split is empty");

  const std::vector<int> predicted = slitcnn::predict(model, ds.test);
  eval::VerificationReport report;
  report.recognition_accuracy =
      eval::recognition_accuracy(predicted, ds.test.labels);

  eval::EvalSet eval_set;
  eval_set.num_classes = model.spec.num_classes;
  for (std::size_t i = 0; i < ds.test.size(); ++i)
    eval_set.test_genuine.emplace_back(ds.test.labels[i], &ds.test.samples[i]);
  for (const auto& [target, mat] : ds.forgeries)
    eval_set.forgeries.emplace_back(target, &mat);

  const eval::ScoreFn score = [&](const traj::Mat& m) {
    const nn::Tensor probs = slitcnn::forward(model, m);
    return std::vector<double>(probs.data.begin(), probs.data.end());
  };

  const auto random_trials = eval::verification_trials(
      score, eval_set, eval::TrialMode::random_forgery);
  report.roc_random = eval::roc_eer(random_trials.genuine,
                                    random_trials.impostor);
  report.genuine_trials = random_trials.genuine.size();
  report.random_impostor_trials = random_trials.impostor.size();

  if (!eval_set.forgeries.empty()) {
    const auto skilled_trials = eval::verification_trials(
        score, eval_set, eval::TrialMode::skilled_forgery);
    report.roc_skilled = eval::roc_eer(skilled_trials.genuine,
                                       skilled_trials.impostor);
    report.skilled_impostor_trials = skilled_trials.impostor.size();
  }

  eval::write_report(opt.report_path, report);
  if (!opt.svg_path.empty()) eval::write_roc_svg(opt.svg_path, report);
  std::printf(
      "accuracy %.4f  eer_random %.4f  eer_skilled %.4f -> %s\n",
      report.recognition_accuracy, report.roc_random.eer,
      report.roc_skilled.eer, opt.report_path.c_str());
  return kOk;
}

// --- roc -------------------------------------------------------------------------------

struct RocOpts {
  std::string report_path, out_path;
};

int cmd_roc(const RocOpts& opt) {
  eval::write_roc_svg(opt.out_path, eval::read_report(opt.report_path));
  std::cout << "wrote " << opt.out_path << "\n";
  return kOk;
}

// --- gradcheck -------------------------------------------------------------------------

int cmd_gradcheck() {
  bool ok = true;
  for (const auto& r : gradcheck::run_layer_checks()) {
    std::printf("layer %-22s max_rel_error %.3e\n", r.name.c_str(),
                r.max_rel_error);
    ok = ok && r.max_rel_error < gradcheck::kTolerance;
  }
  const auto model = gradcheck::run_model_check();
  std::printf("model %-22s max_rel_error %.3e\n", model.name.c_str(),
              model.max_rel_error);
  ok = ok && model.max_rel_error < gradcheck::kTolerance;
  std::printf("gradcheck %s (tolerance %.0e)\n", ok ? "PASS" : "FAIL",
              gradcheck::kTolerance);
  return ok ? kOk : kContractError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"air-signature pipeline (stereo capture -> SliTCNN)"};
  app.require_subcommand(1);

  SynthGenerateOpts synth_opt;
  auto* synth_cmd = app.add_subcommand(
      "synth-generate", "generate a synthetic signature dataset + manifest");
  synth_cmd->add_option("--out", synth_opt.out_dir)->required();
  synth_cmd->add_option("--signers", synth_opt.signers);
  synth_cmd->add_option("--genuine", synth_opt.genuine);
  synth_cmd->add_option("--forgeries", synth_opt.forgeries);
  synth_cmd->add_option("--seed", synth_opt.seed);
  synth_cmd->add_option("--mode", synth_opt.mode)
      ->check(CLI::IsMember({"tiptail", "raw"}));
  synth_cmd->add_option("--config", synth_opt.common.config_path);

  RenderStereoOpts render_opt;
  auto* render_cmd = app.add_subcommand(
      "render-stereo", "render one signature as stereo PPM frame pairs");
  render_cmd->add_option("--out", render_opt.out_dir)->required();
  render_cmd->add_option("--signer", render_opt.signer)->required();
  render_cmd->add_option("--sample", render_opt.sample);
  render_cmd->add_option("--kind", render_opt.kind)
      ->check(CLI::IsMember({"genuine", "forgery"}));
  render_cmd->add_option("--seed", render_opt.seed);
  render_cmd->add_option("--noise", render_opt.noise);
  render_cmd->add_option("--truth", render_opt.truth_path,
                         "also write the exact tip-tail CSV");
  render_cmd->add_option("--config", render_opt.common.config_path);

  DetectOpts detect_opt;
  auto* detect_cmd = app.add_subcommand(
      "detect", "detect balls in NNNN_L/R.ppm frames -> raw sequence CSV");
  detect_cmd->add_option("--frames", detect_opt.frames_dir)->required();
  detect_cmd->add_option("--out", detect_opt.out_path)->required();
  detect_cmd->add_option("--config", detect_opt.common.config_path);

  ReconstructOpts recon_opt;
  auto* recon_cmd = app.add_subcommand(
      "reconstruct", "triangulate raw sequence CSVs -> tip-tail CSVs");
  recon_cmd->add_option("--in", recon_opt.in_path)->required();
  recon_cmd->add_option("--out", recon_opt.out_path)->required();
  recon_cmd->add_option("--config", recon_opt.common.config_path);

  TraceOpts trace_opt;
  auto* trace_cmd = app.add_subcommand(
      "trace", "render the 2D signature trace of a raw sequence as PGM");
  trace_cmd->add_option("--in", trace_opt.in_path)->required();
  trace_cmd->add_option("--out", trace_opt.out_path)->required();
  trace_cmd->add_option("--size", trace_opt.size);

  InterpolateOpts interp_opt;
  auto* interp_cmd = app.add_subcommand(
      "interpolate", "resample tip-tail CSVs to a fixed spline length");
  interp_cmd->add_option("--in", interp_opt.in_path)->required();
  interp_cmd->add_option("--out", interp_opt.out_path)->required();
  interp_cmd->add_option("--t", interp_opt.t);
  interp_cmd->add_option("--config", interp_opt.common.config_path);

  AugmentOpts augment_opt;
  auto* augment_cmd = app.add_subcommand(
      "augment", "expand interpolated CSVs by the x30 rotation/scale grid");
  augment_cmd->add_option("--in", augment_opt.in_dir)->required();
  augment_cmd->add_option("--out", augment_opt.out_dir)->required();

  SplitOpts split_opt;
  auto* split_cmd = app.add_subcommand(
      "split", "partition a manifest into train/val/test (16/4/5)");
  split_cmd->add_option("--manifest", split_opt.manifest_path)->required();
  split_cmd->add_option("--out", split_opt.out_path)->required();
  split_cmd->add_option("--seed", split_opt.seed);
  split_cmd->add_option("--config", split_opt.common.config_path);

  TrainOpts train_opt;
  auto* train_cmd =
      app.add_subcommand("train", "train a SliTCNN variant from scratch");
  train_cmd->add_option("--data", train_opt.data_dir)->required();
  train_cmd->add_option("--split", train_opt.split_path)->required();
  train_cmd->add_option("--out", train_opt.out_path)->required();
  train_cmd->add_option("--history", train_opt.history_path);
  train_cmd->add_option("--variant", train_opt.variant)
      ->check(CLI::IsMember({"tip-only", "tiptail", "two-stream"}));
  train_cmd->add_flag("--augment", train_opt.augment,
                      "expand the training split x30 in memory");
  train_cmd->add_option("--epochs", train_opt.epochs);
  train_cmd->add_option("--batch", train_opt.batch);
  train_cmd->add_option("--lr", train_opt.lr);
  train_cmd->add_option("--seed", train_opt.seed);
  train_cmd->add_option("--config", train_opt.common.config_path);

  EvaluateOpts eval_opt;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "closed-set accuracy + random/skilled forgery ROC & EER");
  eval_cmd->add_option("--data", eval_opt.data_dir)->required();
  eval_cmd->add_option("--split", eval_opt.split_path)->required();
  eval_cmd->add_option("--model", eval_opt.model_path)->required();
  eval_cmd->add_option("--report", eval_opt.report_path)->required();
  eval_cmd->add_option("--roc-svg", eval_opt.svg_path);
  eval_cmd->add_option("--config", eval_opt.common.config_path);

  RocOpts roc_opt;
  auto* roc_cmd =
      app.add_subcommand("roc", "re-plot ROC SVG from a saved report");
  roc_cmd->add_option("--report", roc_opt.report_path)->required();
  roc_cmd->add_option("--out", roc_opt.out_path)->required();

  auto* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of every layer and a tiny model");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return cmd_synth_generate(synth_opt);
    if (render_cmd->parsed()) return cmd_render_stereo(render_opt);
    if (detect_cmd->parsed()) return cmd_detect(detect_opt);
    if (recon_cmd->parsed()) return cmd_reconstruct(recon_opt);
    if (trace_cmd->parsed()) return cmd_trace(trace_opt);
    if (interp_cmd->parsed()) return cmd_interpolate(interp_opt);
    if (augment_cmd->parsed()) return cmd_augment(augment_opt);
    if (split_cmd->parsed()) return cmd_split(split_opt);
    if (train_cmd->parsed()) return cmd_train(train_opt);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_opt);
    if (roc_cmd->parsed()) return cmd_roc(roc_opt);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck();
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContractError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContractError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOtherError;
  }
  return kOtherError;
}
