#include "airsig/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "airsig/nn.hpp"
#include "airsig/rng.hpp"
#include "airsig/slitcnn.hpp"

namespace airsig::gradcheck {

namespace {

constexpr double kStep = 1e-6;

// Relative error with an absolute floor so that near-zero gradient pairs do
// not amplify finite-difference rounding noise.
double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(std::abs(analytic) + std::abs(numeric), 1e-2);
}

nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng,
                         double scale = 1.0, double kink_gap = 0.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.data) {
    do {
      v = rng.uniform(-scale, scale);
    } while (kink_gap > 0.0 && std::abs(v) < kink_gap);
  }
  return t;
}

// Probes d(sum(c * f(x)))/dx for every coordinate of `x` against central
// differences. `forward` must be a pure function of x.
double check_input_gradient(nn::Tensor& x,
                            const std::function<nn::Tensor(const nn::Tensor&)>& forward,
                            const nn::Tensor& analytic_dx,
                            const nn::Tensor& probe) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double keep = x[i];
    x[i] = keep + kStep;
    const nn::Tensor up = forward(x);
    x[i] = keep - kStep;
    const nn::Tensor down = forward(x);
    x[i] = keep;
    double fd = 0.0;
    for (std::size_t j = 0; j < up.numel(); ++j)
      fd += probe[j] * (up[j] - down[j]);
    fd /= 2.0 * kStep;
    worst = std::max(worst, rel_error(analytic_dx[i], fd));
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_layer_checks(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> results;

  {  // conv2d: input, kernel and bias gradients
    nn::Tensor x = random_tensor({1, 3, 4, 10}, rng);
    nn::Tensor k = random_tensor({5, 3, 2, 4}, rng);
    nn::Tensor b = random_tensor({5}, rng);
    const nn::Tensor y = nn::conv2d(x, k, b);
    const nn::Tensor probe = random_tensor(y.shape, rng);
    const auto grads = nn::conv2d_backward(x, k, probe);

    double worst = check_input_gradient(
        x, [&](const nn::Tensor& v) { return nn::conv2d(v, k, b); }, grads.dx,
        probe);
    worst = std::max(worst, check_input_gradient(
        k, [&](const nn::Tensor& v) { return nn::conv2d(x, v, b); },
        grads.dkernels, probe));
    worst = std::max(worst, check_input_gradient(
        b, [&](const nn::Tensor& v) { return nn::conv2d(x, k, v); },
        grads.dbias, probe));
    results.push_back({"conv2d", worst});
  }

  {  // leaky_relu, inputs kept away from the kink
    nn::Tensor x = random_tensor({2, 40}, rng, 1.0, 1e-3);
    const nn::Tensor probe = random_tensor(x.shape, rng);
    const nn::Tensor dx = nn::leaky_relu_backward(x, probe);
    const double worst = check_input_gradient(
        x, [&](const nn::Tensor& v) { return nn::leaky_relu(v); }, dx, probe);
    results.push_back({"leaky_relu", worst});
  }

  {  // layer_norm
    nn::Tensor x = random_tensor({2, 30}, rng);
    const nn::Tensor probe = random_tensor(x.shape, rng);
    const auto fwd = nn::layer_norm(x);
    const nn::Tensor dx = nn::layer_norm_backward(fwd, probe);
    const double worst = check_input_gradient(
        x, [&](const nn::Tensor& v) { return nn::layer_norm(v).y; }, dx,
        probe);
    results.push_back({"layer_norm", worst});
  }

  {  // max_pool2 (random doubles never tie within the step)
    nn::Tensor x = random_tensor({2, 3, 1, 20}, rng);
    const auto fwd = nn::max_pool2(x);
    const nn::Tensor probe = random_tensor(fwd.y.shape, rng);
    const nn::Tensor dx = nn::max_pool2_backward(fwd, x.shape, probe);
    const double worst = check_input_gradient(
        x, [&](const nn::Tensor& v) { return nn::max_pool2(v).y; }, dx, probe);
    results.push_back({"max_pool", worst});
  }

  {  // linear: input, weight and bias gradients
    nn::Tensor x = random_tensor({3, 12}, rng);
    nn::Tensor w = random_tensor({7, 12}, rng);
    nn::Tensor b = random_tensor({7}, rng);
    const nn::Tensor probe = random_tensor({3, 7}, rng);
    const auto grads = nn::linear_backward(x, w, probe);
    double worst = check_input_gradient(
        x, [&](const nn::Tensor& v) { return nn::linear(v, w, b); }, grads.dx,
        probe);
    worst = std::max(worst, check_input_gradient(
        w, [&](const nn::Tensor& v) { return nn::linear(x, v, b); },
        grads.dweights, probe));
    worst = std::max(worst, check_input_gradient(
        b, [&](const nn::Tensor& v) { return nn::linear(x, w, v); },
        grads.dbias, probe));
    results.push_back({"linear", worst});
  }

  {  // dropout with a fixed mask (identical rng stream per evaluation)
    const std::uint64_t mask_seed = rng.next_u64();
    nn::Tensor x = random_tensor({2, 25}, rng);
    auto fwd_fn = [&](const nn::Tensor& v) {
      Rng mask_rng(mask_seed);
      return nn::dropout(v, 0.25, true, mask_rng).y;
    };
    Rng mask_rng(mask_seed);
    const auto fwd = nn::dropout(x, 0.25, true, mask_rng);
    const nn::Tensor probe = random_tensor(x.shape, rng);
    const nn::Tensor dx = nn::dropout_backward(fwd, 0.25, probe);
    const double worst = check_input_gradient(x, fwd_fn, dx, probe);
    results.push_back({"dropout", worst});
  }

  {  // softmax cross entropy: dlogits against the scalar loss
    nn::Tensor logits = random_tensor({3, 6}, rng, 2.0);
    const std::vector<int> labels = {2, 0, 5};
    const auto res = nn::softmax_cross_entropy(logits, labels);
    double worst = 0.0;
    for (std::size_t i = 0; i < logits.numel(); ++i) {
      const double keep = logits[i];
      logits[i] = keep + kStep;
      const double up = nn::softmax_cross_entropy(logits, labels).loss;
      logits[i] = keep - kStep;
      const double down = nn::softmax_cross_entropy(logits, labels).loss;
      logits[i] = keep;
      const double fd = (up - down) / (2.0 * kStep);
      worst = std::max(worst, rel_error(res.dlogits[i], fd));
    }
    results.push_back({"softmax_cross_entropy", worst});
  }

  return results;
}

CheckResult run_model_check(std::uint64_t seed) {
  slitcnn::ModelSpec spec;
  spec.variant = slitcnn::Variant::two_stream;
  spec.t = 64;
  spec.num_classes = 3;
  slitcnn::TrainedModel model = slitcnn::build_model(spec, seed);

  Rng rng(seed ^ 0xABCDEFULL);
  std::vector<traj::Mat> mats;
  for (int n = 0; n < 2; ++n) {
    traj::Mat m(spec.t, 6);
    for (double& v : m.v) v = rng.uniform(-0.5, 0.5);
    mats.push_back(std::move(m));
  }
  const std::vector<const traj::Mat*> batch = {&mats[0], &mats[1]};
  const std::vector<int> labels = {0, 2};

  const slitcnn::Parameters analytic =
      slitcnn::batch_gradients(model, batch, labels, nullptr);
  auto analytic_tensors =
      slitcnn::named_parameters(const_cast<slitcnn::Parameters&>(analytic));
  auto param_tensors = slitcnn::named_parameters(model.params);

  double worst = 0.0;
  for (std::size_t ti = 0; ti < param_tensors.size(); ++ti) {
    nn::Tensor& param = *param_tensors[ti].second;
    const nn::Tensor& grad = *analytic_tensors[ti].second;
    // Deterministic sample of up to 24 coordinates per tensor.
    const std::size_t n_probe = std::min<std::size_t>(24, param.numel());
    for (std::size_t p = 0; p < n_probe; ++p) {
      const std::size_t i =
          (p * (param.numel() / n_probe)) % param.numel();
      const double keep = param[i];
      param[i] = keep + kStep;
      const double up = slitcnn::batch_loss(model, batch, labels);
      param[i] = keep - kStep;
      const double down = slitcnn::batch_loss(model, batch, labels);
      param[i] = keep;
      const double fd = (up - down) / (2.0 * kStep);
      worst = std::max(worst, rel_error(grad[i], fd));
    }
  }
  return {"slitcnn(two_stream,t=64,c=3)", worst};
}

}  // namespace airsig::gradcheck
