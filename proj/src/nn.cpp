#include "airsig/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "airsig/errors.hpp"

namespace airsig::nn {

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
  std::size_t n = 1;
  for (const std::size_t d : shape) n *= d;
  data.assign(n, 0.0);
}

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Dot product with four accumulators; keeps the FMA pipeline busy and gives
// the vectorizer independent lanes.
double dot(const double* __restrict a, const double* __restrict b,
           std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double a, const double* __restrict x, double* __restrict y,
          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& kernels, const Tensor& bias) {
  check(x.rank() == 4, "conv2d: input must be [N,Ci,H,W]");
  check(kernels.rank() == 4, "conv2d: kernels must be [Co,Ci,kH,kW]");
  const std::size_t n_batch = x.dim(0), ci = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t co = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
  check(kernels.dim(1) == ci, "conv2d: channel mismatch");
  check(kh <= h && kw <= w, "conv2d: kernel larger than input");
  check(bias.empty() || (bias.rank() == 1 && bias.dim(0) == co),
        "conv2d: bias shape");

  const std::size_t ho = h - kh + 1, wo = w - kw + 1;
  Tensor y({n_batch, co, ho, wo});

  const std::size_t x_sample = ci * h * w;
  const std::size_t y_sample = co * ho * wo;
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* xs = x.data.data() + n * x_sample;
    double* ys = y.data.data() + n * y_sample;
    for (std::size_t oc = 0; oc < co; ++oc) {
      double* yplane = ys + oc * ho * wo;
      if (!bias.empty()) {
        const double b = bias[oc];
        for (std::size_t i = 0; i < ho * wo; ++i) yplane[i] = b;
      }
      const double* kplane = kernels.data.data() + oc * ci * kh * kw;
      for (std::size_t icn = 0; icn < ci; ++icn) {
        const double* xplane = xs + icn * h * w;
        const double* kchan = kplane + icn * kh * kw;
        for (std::size_t ki = 0; ki < kh; ++ki)
          for (std::size_t kj = 0; kj < kw; ++kj) {
            const double kv = kchan[ki * kw + kj];
            for (std::size_t oy = 0; oy < ho; ++oy)
              axpy(kv, xplane + (oy + ki) * w + kj, yplane + oy * wo, wo);
          }
      }
    }
  }
  return y;
}

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& kernels,
                            const Tensor& dy) {
  const std::size_t n_batch = x.dim(0), ci = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t co = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
  const std::size_t ho = h - kh + 1, wo = w - kw + 1;
  check(dy.rank() == 4 && dy.dim(0) == n_batch && dy.dim(1) == co &&
            dy.dim(2) == ho && dy.dim(3) == wo,
        "conv2d_backward: dy shape");

  Conv2dGrads g{Tensor(x.shape), Tensor(kernels.shape), Tensor({co})};
  const std::size_t x_sample = ci * h * w;
  const std::size_t y_sample = co * ho * wo;
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* xs = x.data.data() + n * x_sample;
    double* dxs = g.dx.data.data() + n * x_sample;
    for (std::size_t oc = 0; oc < co; ++oc) {
      const double* dyplane = dy.data.data() + n * y_sample + oc * ho * wo;
      double dbias_acc = 0.0;
      for (std::size_t i = 0; i < ho * wo; ++i) dbias_acc += dyplane[i];
      g.dbias[oc] += dbias_acc;

      const double* kplane = kernels.data.data() + oc * ci * kh * kw;
      double* dkplane = g.dkernels.data.data() + oc * ci * kh * kw;
      for (std::size_t icn = 0; icn < ci; ++icn) {
        const double* xplane = xs + icn * h * w;
        double* dxplane = dxs + icn * h * w;
        const double* kchan = kplane + icn * kh * kw;
        double* dkchan = dkplane + icn * kh * kw;
        for (std::size_t ki = 0; ki < kh; ++ki) {
          for (std::size_t oy = 0; oy < ho; ++oy) {
            const double* dyrow = dyplane + oy * wo;
            const double* xrow = xplane + (oy + ki) * w;
            double* dxrow = dxplane + (oy + ki) * w;
            double* dkrow = dkchan + ki * kw;
            // dL/dk[.,kj] = <dy, x shifted by kj>; dot keeps independent
            // accumulator chains, unlike accumulating into dk per column.
            for (std::size_t kj = 0; kj < kw; ++kj) {
              dkrow[kj] += dot(dyrow, xrow + kj, wo);
              axpy(kchan[ki * kw + kj], dyrow, dxrow + kj, wo);
            }
          }
        }
      }
    }
  }
  return g;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor y = x;
  for (double& v : y.data)
    if (v < 0.0) v *= slope;
  return y;
}

Tensor leaky_relu_backward(const Tensor& x, const Tensor& dy, double slope) {
  check(x.numel() == dy.numel(), "leaky_relu_backward: shape mismatch");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.numel(); ++i)
    if (x[i] < 0.0) dx[i] *= slope;
  return dx;
}

LayerNormResult layer_norm(const Tensor& x, double eps) {
  check(x.rank() >= 2, "layer_norm: need a batch axis");
  const std::size_t n_batch = x.dim(0);
  const std::size_t fsize = x.numel() / n_batch;
  check(fsize >= 2, "layer_norm: feature map too small");

  LayerNormResult result{Tensor(x.shape), std::vector<double>(n_batch)};
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* xs = x.data.data() + n * fsize;
    double* ys = result.y.data.data() + n * fsize;
    double mean = 0.0;
    for (std::size_t i = 0; i < fsize; ++i) mean += xs[i];
    mean /= static_cast<double>(fsize);
    double var = 0.0;
    for (std::size_t i = 0; i < fsize; ++i) {
      const double d = xs[i] - mean;
      var += d * d;
    }
    var /= static_cast<double>(fsize);
    const double inv_std = 1.0 / std::sqrt(var + eps);
    result.inv_std[n] = inv_std;
    for (std::size_t i = 0; i < fsize; ++i) ys[i] = (xs[i] - mean) * inv_std;
  }
  return result;
}

Tensor layer_norm_backward(const LayerNormResult& fwd, const Tensor& dy) {
  const Tensor& y = fwd.y;
  check(y.numel() == dy.numel(), "layer_norm_backward: shape mismatch");
  const std::size_t n_batch = y.dim(0);
  const std::size_t fsize = y.numel() / n_batch;

  Tensor dx(y.shape);
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* ys = y.data.data() + n * fsize;
    const double* dys = dy.data.data() + n * fsize;
    double* dxs = dx.data.data() + n * fsize;
    double mean_dy = 0.0, mean_dyy = 0.0;
    for (std::size_t i = 0; i < fsize; ++i) {
      mean_dy += dys[i];
      mean_dyy += dys[i] * ys[i];
    }
    mean_dy /= static_cast<double>(fsize);
    mean_dyy /= static_cast<double>(fsize);
    const double inv_std = fwd.inv_std[n];
    for (std::size_t i = 0; i < fsize; ++i)
      dxs[i] = inv_std * (dys[i] - mean_dy - ys[i] * mean_dyy);
  }
  return dx;
}

MaxPoolResult max_pool2(const Tensor& x) {
  check(x.rank() >= 2, "max_pool2: need a batch axis");
  const std::size_t w = x.shape.back();
  check(w >= 2, "max_pool2: last axis must be >= 2");
  const std::size_t wo = w / 2;
  const std::size_t rows = x.numel() / w;

  std::vector<std::size_t> out_shape = x.shape;
  out_shape.back() = wo;
  MaxPoolResult result{Tensor(out_shape), std::vector<std::uint32_t>(rows * wo)};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xs = x.data.data() + r * w;
    double* ys = result.y.data.data() + r * wo;
    std::uint32_t* as = result.argmax.data() + r * wo;
    for (std::size_t i = 0; i < wo; ++i) {
      const double a = xs[2 * i], b = xs[2 * i + 1];
      // Ties keep the first element.
      if (b > a) {
        ys[i] = b;
        as[i] = 1;
      } else {
        ys[i] = a;
        as[i] = 0;
      }
    }
  }
  return result;
}

Tensor max_pool2_backward(const MaxPoolResult& fwd,
                          const std::vector<std::size_t>& x_shape,
                          const Tensor& dy) {
  check(dy.numel() == fwd.y.numel(), "max_pool2_backward: shape mismatch");
  Tensor dx(x_shape);
  const std::size_t w = x_shape.back();
  const std::size_t wo = w / 2;
  const std::size_t rows = dx.numel() / w;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dys = dy.data.data() + r * wo;
    const std::uint32_t* as = fwd.argmax.data() + r * wo;
    double* dxs = dx.data.data() + r * w;
    for (std::size_t i = 0; i < wo; ++i) dxs[2 * i + as[i]] += dys[i];
  }
  return dx;
}

Tensor linear(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  check(x.rank() == 2, "linear: input must be [N,n]");
  check(weights.rank() == 2, "linear: weights must be [m,n]");
  const std::size_t n_batch = x.dim(0), n_in = x.dim(1);
  const std::size_t m = weights.dim(0);
  check(weights.dim(1) == n_in, "linear: weight/input width mismatch");
  check(bias.empty() || (bias.rank() == 1 && bias.dim(0) == m),
        "linear: bias shape");

  Tensor y({n_batch, m});
  for (std::size_t i = 0; i < n_batch; ++i) {
    const double* xs = x.data.data() + i * n_in;
    double* ys = y.data.data() + i * m;
    for (std::size_t j = 0; j < m; ++j)
      ys[j] = (bias.empty() ? 0.0 : bias[j]) +
              dot(xs, weights.data.data() + j * n_in, n_in);
  }
  return y;
}

LinearGrads linear_backward(const Tensor& x, const Tensor& weights,
                            const Tensor& dy) {
  const std::size_t n_batch = x.dim(0), n_in = x.dim(1);
  const std::size_t m = weights.dim(0);
  check(dy.rank() == 2 && dy.dim(0) == n_batch && dy.dim(1) == m,
        "linear_backward: dy shape");

  LinearGrads g{Tensor(x.shape), Tensor(weights.shape), Tensor({m})};
  for (std::size_t i = 0; i < n_batch; ++i) {
    const double* xs = x.data.data() + i * n_in;
    const double* dys = dy.data.data() + i * m;
    double* dxs = g.dx.data.data() + i * n_in;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dys[j];
      if (d == 0.0) continue;
      g.dbias[j] += d;
      axpy(d, weights.data.data() + j * n_in, dxs, n_in);
      axpy(d, xs, g.dweights.data.data() + j * n_in, n_in);
    }
  }
  return g;
}

DropoutResult dropout(const Tensor& x, double p, bool training, Rng& rng) {
  check(p >= 0.0 && p < 1.0, "dropout: p must be in [0,1)");
  DropoutResult result{x, std::vector<std::uint8_t>()};
  if (!training || p == 0.0) return result;

  result.keep.resize(x.numel());
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const bool keep = rng.uniform() >= p;
    result.keep[i] = keep;
    result.y[i] = keep ? x[i] * scale : 0.0;
  }
  return result;
}

Tensor dropout_backward(const DropoutResult& fwd, double p, const Tensor& dy) {
  if (fwd.keep.empty()) return dy;
  Tensor dx = dy;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < dx.numel(); ++i)
    dx[i] = fwd.keep[i] ? dx[i] * scale : 0.0;
  return dx;
}

SoftmaxXentResult softmax_cross_entropy(const Tensor& logits,
                                        const std::vector<int>& labels) {
  check(logits.rank() == 2, "softmax_cross_entropy: logits must be [N,C]");
  const std::size_t n_batch = logits.dim(0), classes = logits.dim(1);
  check(labels.size() == n_batch, "softmax_cross_entropy: label count");

  SoftmaxXentResult result;
  result.probs = Tensor(logits.shape);
  result.dlogits = Tensor(logits.shape);
  const double inv_n = 1.0 / static_cast<double>(n_batch);
  for (std::size_t i = 0; i < n_batch; ++i) {
    const int label = labels[i];
    check(label >= 0 && static_cast<std::size_t>(label) < classes,
          "softmax_cross_entropy: label out of range");
    const double* ls = logits.data.data() + i * classes;
    double* ps = result.probs.data.data() + i * classes;
    double* ds = result.dlogits.data.data() + i * classes;

    const double mx = *std::max_element(ls, ls + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      ps[c] = std::exp(ls[c] - mx);
      sum += ps[c];
    }
    for (std::size_t c = 0; c < classes; ++c) ps[c] /= sum;
    result.loss -= std::log(std::max(ps[label], 1e-300)) * inv_n;
    for (std::size_t c = 0; c < classes; ++c) ds[c] = ps[c] * inv_n;
    ds[label] -= inv_n;
  }
  return result;
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const TrainConfig& cfg, std::int64_t step_index) {
  check(param.numel() == grad.numel(), "adam_step: shape mismatch");
  check(step_index >= 1, "adam_step: step index starts at 1");
  check(cfg.learning_rate > 0.0, "adam_step: learning rate must be positive");
  check(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 &&
            cfg.beta2 < 1.0,
        "adam_step: betas must lie in [0,1)");
  if (state.m.numel() != param.numel()) {
    state.m = Tensor::zeros_like(param);
    state.v = Tensor::zeros_like(param);
  }
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_index));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_index));
  double* __restrict p = param.data.data();
  double* __restrict m = state.m.data.data();
  double* __restrict v = state.v.data.data();
  const double* __restrict g = grad.data.data();
  for (std::size_t i = 0; i < param.numel(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
  }
}

// --- Checkpoint I/O ---------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'S', 'I', 'G', 'N', 'E', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, std::uint32_t variant_tag,
                     std::uint32_t t, std::uint32_t num_classes,
                     const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, variant_tag);
  write_pod(out, t);
  write_pod(out, num_classes);
  write_pod(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& nt : tensors) {
    write_pod(out, static_cast<std::uint32_t>(nt.name.size()));
    out.write(nt.name.data(), static_cast<std::streamsize>(nt.name.size()));
    write_pod(out, static_cast<std::uint32_t>(nt.tensor->rank()));
    for (const std::size_t d : nt.tensor->shape)
      write_pod(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(nt.tensor->data.data()),
              static_cast<std::streamsize>(nt.tensor->numel() * sizeof(double)));
  }
  if (!out) throw IoError("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw ParseError("not a checkpoint file: " + path);
  if (read_pod<std::uint32_t>(in) != kVersion)
    throw ParseError("unsupported checkpoint version: " + path);

  LoadedCheckpoint ckpt;
  ckpt.variant_tag = read_pod<std::uint32_t>(in);
  ckpt.t = read_pod<std::uint32_t>(in);
  ckpt.num_classes = read_pod<std::uint32_t>(in);
  const auto count = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto rank = read_pod<std::uint32_t>(in);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape)
      d = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    Tensor tensor(shape);
    in.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.numel() * sizeof(double)));
    if (!in) throw ParseError("truncated checkpoint: " + path);
    ckpt.tensors.emplace_back(std::move(name), std::move(tensor));
  }
  return ckpt;
}

}  // namespace airsig::nn
