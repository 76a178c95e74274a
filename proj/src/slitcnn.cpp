#include "airsig/slitcnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "airsig/errors.hpp"

namespace airsig::slitcnn {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::tip_only: return "tip-only";
    case Variant::tiptail_single: return "tiptail";
    case Variant::two_stream: return "two-stream";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "tip-only" || name == "tip_only") return Variant::tip_only;
  if (name == "tiptail" || name == "tiptail_single")
    return Variant::tiptail_single;
  if (name == "two-stream" || name == "two_stream") return Variant::two_stream;
  throw std::invalid_argument("unknown variant: " + name);
}

void ModelSpec::validate() const {
  if (t < 64) throw std::invalid_argument("ModelSpec: t must be >= 64");
  if (num_classes < 2)
    throw std::invalid_argument("ModelSpec: need at least 2 classes");
  if (t < conv1_width + conv2_width)
    throw std::invalid_argument("ModelSpec: t too short for the conv stack");
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::invalid_argument("ModelSpec: dropout must be in [0,1)");
}

std::vector<std::pair<std::string, nn::Tensor*>> named_parameters(
    Parameters& p) {
  std::vector<std::pair<std::string, nn::Tensor*>> out;
  for (std::size_t s = 0; s < p.streams.size(); ++s) {
    const std::string prefix = "stream" + std::to_string(s) + ".";
    out.emplace_back(prefix + "conv1_w", &p.streams[s].conv1_w);
    out.emplace_back(prefix + "conv1_b", &p.streams[s].conv1_b);
    out.emplace_back(prefix + "conv2_w", &p.streams[s].conv2_w);
    out.emplace_back(prefix + "conv2_b", &p.streams[s].conv2_b);
    out.emplace_back(prefix + "fc_w", &p.streams[s].fc_w);
    out.emplace_back(prefix + "fc_b", &p.streams[s].fc_b);
  }
  out.emplace_back("head.fc1_w", &p.head1_w);
  out.emplace_back("head.fc1_b", &p.head1_b);
  out.emplace_back("head.fc2_w", &p.head2_w);
  out.emplace_back("head.fc2_b", &p.head2_b);
  return out;
}

std::vector<std::pair<std::string, const nn::Tensor*>> named_parameters(
    const Parameters& p) {
  std::vector<std::pair<std::string, const nn::Tensor*>> out;
  for (auto& [name, tensor] : named_parameters(const_cast<Parameters&>(p)))
    out.emplace_back(name, tensor);
  return out;
}

namespace {

void init_uniform(nn::Tensor& w, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : w.data) v = rng.uniform(-bound, bound);
}

}  // namespace

TrainedModel build_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t rows = spec.input_rows();

  TrainedModel model;
  model.spec = spec;
  Rng rng = Rng::from(seed, 0x534c4954ULL, 0);  // "SLIT"

  model.params.streams.resize(spec.streams());
  for (auto& s : model.params.streams) {
    s.conv1_w = nn::Tensor({spec.conv1_channels, 1, rows, spec.conv1_width});
    s.conv1_b = nn::Tensor({spec.conv1_channels});
    init_uniform(s.conv1_w, rows * spec.conv1_width, rng);
    s.conv2_w = nn::Tensor(
        {spec.conv2_channels, spec.conv1_channels, 1, spec.conv2_width});
    s.conv2_b = nn::Tensor({spec.conv2_channels});
    init_uniform(s.conv2_w, spec.conv1_channels * spec.conv2_width, rng);
    s.fc_w = nn::Tensor({spec.stream_fc, spec.flatten_size()});
    s.fc_b = nn::Tensor({spec.stream_fc});
    init_uniform(s.fc_w, spec.flatten_size(), rng);
  }
  const std::size_t concat = spec.stream_fc * spec.streams();
  model.params.head1_w = nn::Tensor({spec.fuse_fc, concat});
  model.params.head1_b = nn::Tensor({spec.fuse_fc});
  init_uniform(model.params.head1_w, concat, rng);
  model.params.head2_w = nn::Tensor({spec.num_classes, spec.fuse_fc});
  model.params.head2_b = nn::Tensor({spec.num_classes});
  init_uniform(model.params.head2_w, spec.fuse_fc, rng);
  return model;
}

std::size_t parameter_count(const Parameters& params) {
  std::size_t n = 0;
  for (const auto& s : params.streams)
    n += s.conv1_w.numel() + s.conv1_b.numel() + s.conv2_w.numel() +
         s.conv2_b.numel() + s.fc_w.numel() + s.fc_b.numel();
  return n + params.head1_w.numel() + params.head1_b.numel() +
         params.head2_w.numel() + params.head2_b.numel();
}

namespace {

// Per-stream forward intermediates kept for the backward pass.
struct StreamCache {
  nn::Tensor x;            // [N,1,rows,t]
  nn::Tensor c1, r1;       // conv1 pre/post activation
  nn::LayerNormResult ln;
  nn::Tensor c2, r2;
  nn::MaxPoolResult pool;
  nn::Tensor flat, rflat;  // [N,flatten] before/after activation
  nn::Tensor fc;           // [N,stream_fc]
  nn::DropoutResult drop;
};

struct ForwardCache {
  std::vector<StreamCache> streams;
  nn::Tensor concat;   // [N, stream_fc * S]
  nn::Tensor h1, rh1;  // fuse fc pre/post activation
  nn::Tensor logits;
};

// Packs the per-sample trajectory channels into the per-stream input
// layout [N, 1, rows, t] (coordinates down, time across).
std::vector<nn::Tensor> assemble_inputs(
    const ModelSpec& spec, const std::vector<const traj::Mat*>& batch) {
  const std::size_t n_batch = batch.size();
  const std::size_t rows = spec.input_rows();
  const std::size_t min_cols = spec.variant == Variant::tip_only ? 3 : 6;

  std::vector<nn::Tensor> inputs(
      spec.streams(), nn::Tensor({n_batch, 1, rows, spec.t}));
  for (std::size_t n = 0; n < n_batch; ++n) {
    const traj::Mat& m = *batch[n];
    if (m.rows != spec.t)
      throw std::invalid_argument(
          "forward: trajectory length " + std::to_string(m.rows) +
          " does not match model t=" + std::to_string(spec.t));
    if (m.cols < min_cols)
      throw std::invalid_argument("forward: trajectory has too few columns");
    for (std::size_t s = 0; s < spec.streams(); ++s) {
      const std::size_t base = spec.variant == Variant::two_stream ? 3 * s : 0;
      double* dst = inputs[s].data.data() + n * rows * spec.t;
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t tau = 0; tau < spec.t; ++tau)
          dst[r * spec.t + tau] = m.at(tau, base + r);
    }
  }
  return inputs;
}

nn::Tensor reshape(const nn::Tensor& x, std::vector<std::size_t> shape) {
  nn::Tensor y = x;
  y.shape = std::move(shape);
  return y;
}

ForwardCache forward_pass(const ModelSpec& spec, const Parameters& params,
                          std::vector<nn::Tensor> inputs, bool training,
                          Rng* dropout_rng) {
  const std::size_t n_batch = inputs[0].dim(0);
  ForwardCache cache;
  cache.streams.resize(spec.streams());
  cache.concat = nn::Tensor({n_batch, spec.stream_fc * spec.streams()});

  for (std::size_t s = 0; s < spec.streams(); ++s) {
    StreamCache& sc = cache.streams[s];
    const StreamParams& sp = params.streams[s];
    sc.x = std::move(inputs[s]);
    sc.c1 = nn::conv2d(sc.x, sp.conv1_w, sp.conv1_b);
    sc.r1 = nn::leaky_relu(sc.c1);
    sc.ln = nn::layer_norm(sc.r1);
    sc.c2 = nn::conv2d(sc.ln.y, sp.conv2_w, sp.conv2_b);
    sc.r2 = nn::leaky_relu(sc.c2);
    sc.pool = nn::max_pool2(sc.r2);
    sc.flat = reshape(sc.pool.y, {n_batch, spec.flatten_size()});
    sc.rflat = nn::leaky_relu(sc.flat);
    sc.fc = nn::linear(sc.rflat, sp.fc_w, sp.fc_b);
    if (training && dropout_rng) {
      sc.drop = nn::dropout(sc.fc, spec.dropout, true, *dropout_rng);
    } else {
      sc.drop.y = sc.fc;
    }
    for (std::size_t n = 0; n < n_batch; ++n)
      std::copy(sc.drop.y.data.begin() + n * spec.stream_fc,
                sc.drop.y.data.begin() + (n + 1) * spec.stream_fc,
                cache.concat.data.begin() + n * spec.stream_fc * spec.streams() +
                    s * spec.stream_fc);
  }

  cache.h1 = nn::linear(cache.concat, params.head1_w, params.head1_b);
  cache.rh1 = nn::leaky_relu(cache.h1);
  cache.logits = nn::linear(cache.rh1, params.head2_w, params.head2_b);
  return cache;
}

Parameters zero_gradients(const ModelSpec& spec, const Parameters& like) {
  Parameters g;
  g.streams.resize(like.streams.size());
  for (std::size_t s = 0; s < like.streams.size(); ++s) {
    g.streams[s].conv1_w = nn::Tensor(like.streams[s].conv1_w.shape);
    g.streams[s].conv1_b = nn::Tensor(like.streams[s].conv1_b.shape);
    g.streams[s].conv2_w = nn::Tensor(like.streams[s].conv2_w.shape);
    g.streams[s].conv2_b = nn::Tensor(like.streams[s].conv2_b.shape);
    g.streams[s].fc_w = nn::Tensor(like.streams[s].fc_w.shape);
    g.streams[s].fc_b = nn::Tensor(like.streams[s].fc_b.shape);
  }
  g.head1_w = nn::Tensor(like.head1_w.shape);
  g.head1_b = nn::Tensor(like.head1_b.shape);
  g.head2_w = nn::Tensor(like.head2_w.shape);
  g.head2_b = nn::Tensor(like.head2_b.shape);
  (void)spec;
  return g;
}

void backward_pass(const ModelSpec& spec, const Parameters& params,
                   const ForwardCache& cache, const nn::Tensor& dlogits,
                   Parameters& grads) {
  const std::size_t n_batch = dlogits.dim(0);

  auto g2 = nn::linear_backward(cache.rh1, params.head2_w, dlogits);
  grads.head2_w = std::move(g2.dweights);
  grads.head2_b = std::move(g2.dbias);
  const nn::Tensor dh1 = nn::leaky_relu_backward(cache.h1, g2.dx);
  auto g1 = nn::linear_backward(cache.concat, params.head1_w, dh1);
  grads.head1_w = std::move(g1.dweights);
  grads.head1_b = std::move(g1.dbias);

  for (std::size_t s = 0; s < spec.streams(); ++s) {
    const StreamCache& sc = cache.streams[s];
    const StreamParams& sp = params.streams[s];
    StreamParams& sg = grads.streams[s];

    nn::Tensor ddrop({n_batch, spec.stream_fc});
    for (std::size_t n = 0; n < n_batch; ++n)
      std::copy(g1.dx.data.begin() + n * spec.stream_fc * spec.streams() +
                    s * spec.stream_fc,
                g1.dx.data.begin() + n * spec.stream_fc * spec.streams() +
                    (s + 1) * spec.stream_fc,
                ddrop.data.begin() + n * spec.stream_fc);

    const nn::Tensor dfc = nn::dropout_backward(sc.drop, spec.dropout, ddrop);
    auto gfc = nn::linear_backward(sc.rflat, sp.fc_w, dfc);
    sg.fc_w = std::move(gfc.dweights);
    sg.fc_b = std::move(gfc.dbias);
    const nn::Tensor dflat = nn::leaky_relu_backward(sc.flat, gfc.dx);
    const nn::Tensor dpool = reshape(dflat, sc.pool.y.shape);
    const nn::Tensor dr2 = nn::max_pool2_backward(sc.pool, sc.r2.shape, dpool);
    const nn::Tensor dc2 = nn::leaky_relu_backward(sc.c2, dr2);
    auto gc2 = nn::conv2d_backward(sc.ln.y, sp.conv2_w, dc2);
    sg.conv2_w = std::move(gc2.dkernels);
    sg.conv2_b = std::move(gc2.dbias);
    const nn::Tensor dr1 = nn::layer_norm_backward(sc.ln, gc2.dx);
    const nn::Tensor dc1 = nn::leaky_relu_backward(sc.c1, dr1);
    auto gc1 = nn::conv2d_backward(sc.x, sp.conv1_w, dc1);
    sg.conv1_w = std::move(gc1.dkernels);
    sg.conv1_b = std::move(gc1.dbias);
  }
}

double validation_accuracy(const TrainedModel& model, const LabeledSet& set,
                           std::size_t batch_size) {
  std::size_t correct = 0;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    const std::size_t end = std::min(set.size(), start + batch_size);
    std::vector<const traj::Mat*> batch;
    batch.reserve(end - start);
    for (std::size_t i = start; i < end; ++i)
      batch.push_back(&set.samples[i]);
    const nn::Tensor probs = forward(model, batch);
    const std::size_t classes = probs.dim(1);
    for (std::size_t i = start; i < end; ++i) {
      const double* row = probs.data.data() + (i - start) * classes;
      const std::size_t arg =
          std::max_element(row, row + classes) - row;
      if (static_cast<int>(arg) == set.labels[i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace

nn::Tensor forward(const TrainedModel& model,
                   const std::vector<const traj::Mat*>& batch) {
  if (batch.empty()) throw std::invalid_argument("forward: empty batch");
  auto inputs = assemble_inputs(model.spec, batch);
  ForwardCache cache =
      forward_pass(model.spec, model.params, std::move(inputs), false, nullptr);
  // softmax via the loss helper, labels unused
  nn::Tensor probs(cache.logits.shape);
  const std::size_t n_batch = cache.logits.dim(0);
  const std::size_t classes = cache.logits.dim(1);
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* ls = cache.logits.data.data() + n * classes;
    double* ps = probs.data.data() + n * classes;
    const double mx = *std::max_element(ls, ls + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      ps[c] = std::exp(ls[c] - mx);
      sum += ps[c];
    }
    for (std::size_t c = 0; c < classes; ++c) ps[c] /= sum;
  }
  return probs;
}

nn::Tensor forward(const TrainedModel& model, const traj::Mat& sample) {
  return forward(model, std::vector<const traj::Mat*>{&sample});
}

std::vector<int> predict(const TrainedModel& model, const LabeledSet& set,
                         std::size_t batch_size) {
  std::vector<int> out(set.size());
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    const std::size_t end = std::min(set.size(), start + batch_size);
    std::vector<const traj::Mat*> batch;
    for (std::size_t i = start; i < end; ++i)
      batch.push_back(&set.samples[i]);
    const nn::Tensor probs = forward(model, batch);
    const std::size_t classes = probs.dim(1);
    for (std::size_t i = start; i < end; ++i) {
      const double* row = probs.data.data() + (i - start) * classes;
      out[i] = static_cast<int>(std::max_element(row, row + classes) - row);
    }
  }
  return out;
}

double batch_loss(const TrainedModel& model,
                  const std::vector<const traj::Mat*>& batch,
                  const std::vector<int>& labels) {
  auto inputs = assemble_inputs(model.spec, batch);
  ForwardCache cache =
      forward_pass(model.spec, model.params, std::move(inputs), false, nullptr);
  return nn::softmax_cross_entropy(cache.logits, labels).loss;
}

Parameters batch_gradients(const TrainedModel& model,
                           const std::vector<const traj::Mat*>& batch,
                           const std::vector<int>& labels, double* loss_out) {
  auto inputs = assemble_inputs(model.spec, batch);
  ForwardCache cache =
      forward_pass(model.spec, model.params, std::move(inputs), false, nullptr);
  auto xent = nn::softmax_cross_entropy(cache.logits, labels);
  if (loss_out) *loss_out = xent.loss;
  Parameters grads = zero_gradients(model.spec, model.params);
  backward_pass(model.spec, model.params, cache, xent.dlogits, grads);
  return grads;
}

TrainedModel train(TrainedModel model, const LabeledSet& train_set,
                   const LabeledSet& val_set, const nn::TrainConfig& cfg) {
  if (train_set.size() == 0 || val_set.size() == 0)
    throw std::invalid_argument("train: empty split");
  if (train_set.size() != train_set.labels.size() ||
      val_set.size() != val_set.labels.size())
    throw std::invalid_argument("train: label count mismatch");
  const int classes = static_cast<int>(model.spec.num_classes);
  for (const int l : train_set.labels)
    if (l < 0 || l >= classes)
      throw std::invalid_argument("train: label out of range");
  for (const int l : val_set.labels)
    if (l < 0 || l >= classes)
      throw std::invalid_argument("train: label out of range");

  Rng rng = Rng::from(cfg.seed, 0x54524e00ULL, 0);  // "TRN"
  auto tensors = named_parameters(model.params);
  model.adam.assign(tensors.size(), nn::AdamState{});

  Parameters best = model.params;
  double best_acc = -1.0;
  std::int64_t step = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  model.history.clear();
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const traj::Mat*> batch;
      std::vector<int> labels;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&train_set.samples[order[i]]);
        labels.push_back(train_set.labels[order[i]]);
      }
      auto inputs = assemble_inputs(model.spec, batch);
      ForwardCache cache = forward_pass(model.spec, model.params,
                                        std::move(inputs), true, &rng);
      auto xent = nn::softmax_cross_entropy(cache.logits, labels);
      loss_sum += xent.loss * static_cast<double>(batch.size());

      Parameters grads = zero_gradients(model.spec, model.params);
      backward_pass(model.spec, model.params, cache, xent.dlogits, grads);

      ++step;
      auto grad_tensors = named_parameters(grads);
      for (std::size_t i = 0; i < tensors.size(); ++i)
        nn::adam_step(*tensors[i].second, *grad_tensors[i].second,
                      model.adam[i], cfg, step);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_accuracy = validation_accuracy(model, val_set, cfg.batch_size);
    model.history.push_back(stats);
    if (stats.val_accuracy > best_acc) {
      best_acc = stats.val_accuracy;
      best = model.params;
      model.best_epoch = static_cast<std::int64_t>(epoch);
    }
  }
  model.params = std::move(best);
  return model;
}

void save_model(const std::string& path, const TrainedModel& model) {
  std::vector<nn::NamedTensor> tensors;
  for (auto& [name, tensor] : named_parameters(model.params))
    tensors.push_back({name, tensor});
  nn::save_checkpoint(path, static_cast<std::uint32_t>(model.spec.variant),
                      static_cast<std::uint32_t>(model.spec.t),
                      static_cast<std::uint32_t>(model.spec.num_classes),
                      tensors);
}

TrainedModel load_model(const std::string& path) {
  const nn::LoadedCheckpoint ckpt = nn::load_checkpoint(path);
  if (ckpt.variant_tag > 2)
    throw ParseError("checkpoint has unknown variant tag");
  ModelSpec spec;
  spec.variant = static_cast<Variant>(ckpt.variant_tag);
  spec.t = ckpt.t;
  spec.num_classes = ckpt.num_classes;

  TrainedModel model = build_model(spec, 0);
  auto tensors = named_parameters(model.params);
  if (tensors.size() != ckpt.tensors.size())
    throw ParseError("checkpoint tensor count mismatch");
  for (auto& [name, tensor] : tensors) {
    const auto it = std::find_if(
        ckpt.tensors.begin(), ckpt.tensors.end(),
        [&name = name](const auto& nt) { return nt.first == name; });
    if (it == ckpt.tensors.end())
      throw ParseError("checkpoint missing tensor: " + name);
    if (it->second.shape != tensor->shape)
      throw ParseError("checkpoint tensor shape mismatch: " + name);
    *tensor = it->second;
  }
  return model;
}

void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,train_loss,val_accuracy\n";
  char buf[96];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", e.epoch, e.train_loss,
                  e.val_accuracy);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace airsig::slitcnn
