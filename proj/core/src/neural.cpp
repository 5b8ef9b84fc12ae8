#include "entropic/neural.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "entropic/errors.hpp"
#include "entropic/finite_difference.hpp"

namespace entropic {

DenseNet::DenseNet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ValidationError("network needs at least an input and an output layer");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw ValidationError("layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  offsets_.push_back(total);
  params_ = Vec::Zero(total);
}

DenseNet DenseNet::random(std::vector<int> sizes, Rng& rng) {
  DenseNet net(std::move(sizes));
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const double bound = std::sqrt(1.0 / net.sizes_[l]);
    for (Eigen::Index i = net.offsets_[l]; i < net.offsets_[l + 1]; ++i) net.params_(i) = rng.uniform(-bound, bound);
  }
  return net;
}

void DenseNet::set_params(const Vec& params) {
  if (params.size() != params_.size())
    throw ValidationError("parameter vector has " + std::to_string(params.size()) + " entries, network has " +
                          std::to_string(params_.size()));
  params_ = params;
}

Eigen::Map<const Mat> DenseNet::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<const Vec> DenseNet::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}
Eigen::Map<Mat> DenseNet::weight(std::size_t l) { return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]}; }
Eigen::Map<Vec> DenseNet::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}

Mat DenseNet::forward(const Mat& x, Cache& cache) const {
  if (x.rows() != input_size())
    throw ValidationError("input has " + std::to_string(x.rows()) + " rows, network expects " +
                          std::to_string(input_size()));
  cache.inputs.resize(n_layers());
  cache.pre.resize(n_layers());
  Mat h = x;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    cache.inputs[l] = h;
    Mat z = weight(l) * h;
    z.colwise() += bias(l);
    cache.pre[l] = z;
    h = l + 1 < n_layers() ? Mat(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Mat DenseNet::forward(const Mat& x) const {
  if (x.rows() != input_size())
    throw ValidationError("input has " + std::to_string(x.rows()) + " rows, network expects " +
                          std::to_string(input_size()));
  Mat h = x;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    Mat z = weight(l) * h;
    z.colwise() += bias(l);
    h = l + 1 < n_layers() ? Mat(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Vec DenseNet::forward_one(const Vec& x) const { return forward(Mat(x)).col(0); }

DenseNet::Gradients DenseNet::backward(const Cache& cache, const Mat& grad_out) const {
  if (cache.pre.size() != n_layers()) throw ValidationError("cache does not come from this network");
  if (grad_out.rows() != output_size() || grad_out.cols() != cache.pre.back().cols())
    throw ValidationError("output gradient shape does not match the cached batch");
  Gradients g;
  g.params = Vec::Zero(params_.size());
  Mat delta = grad_out;
  for (std::size_t l = n_layers(); l-- > 0;) {
    if (l + 1 < n_layers()) delta = delta.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    Eigen::Map<Mat>(g.params.data() + offsets_[l], sizes_[l + 1], sizes_[l]).noalias() =
        delta * cache.inputs[l].transpose();
    Eigen::Map<Vec>(g.params.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l],
                    sizes_[l + 1]) = delta.rowwise().sum();
    delta = weight(l).transpose() * delta;
  }
  g.input = std::move(delta);
  return g;
}

AdamState::AdamState(Eigen::Index n, double lr_, double weight_decay_)
    : m(Vec::Zero(n)), v(Vec::Zero(n)), lr(lr_), weight_decay(weight_decay_) {}

void adam_step(AdamState& s, Vec& params, const Vec& grads) {
  if (grads.size() != params.size()) throw ValidationError("gradient and parameter lengths differ");
  if (s.m.size() != params.size()) {
    if (s.step != 0) throw ValidationError("optimizer state does not match the parameter vector");
    s.m = Vec::Zero(params.size());
    s.v = Vec::Zero(params.size());
  }
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grads;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  if (s.weight_decay > 0.0) params *= 1.0 - s.lr * s.weight_decay;
  params.array() -= s.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.eps);
}

void soft_update(Vec& target, const Vec& online, double tau) {
  if (target.size() != online.size()) throw ValidationError("target and online parameter lengths differ");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0, 1]");
  target = tau * online + (1.0 - tau) * target;
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
  if (target.sizes() != online.sizes()) throw ValidationError("target and online networks differ in shape");
  soft_update(target.mutable_params(), online.params(), tau);
}

GradientCheck dense_gradient_check(const DenseNet& net, const Mat& x, const Mat& grad_out, double h) {
  DenseNet::Cache cache;
  net.forward(x, cache);
  const auto g = net.backward(cache, grad_out);
  GradientCheck out;
  out.min_abs_pre = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < net.n_layers(); ++l)
    out.min_abs_pre = std::min(out.min_abs_pre, cache.pre[l].cwiseAbs().minCoeff());

  DenseNet probe = net;
  auto loss_of_params = [&](const Vec& p) {
    probe.mutable_params() = p;
    return probe.forward(x).cwiseProduct(grad_out).sum();
  };
  const Vec num_p = central_difference_gradient(loss_of_params, net.params(), h);
  auto loss_of_input = [&](const Mat& xi) { return net.forward(xi).cwiseProduct(grad_out).sum(); };
  const Mat num_x = central_difference_gradient(loss_of_input, x, h);

  out.param_error = relative_error(g.params, num_p);
  out.input_error = relative_error(g.input, num_x);
  out.param_max_error = max_relative_error(g.params, num_p, 1e-6);
  out.input_max_error = max_relative_error(g.input, num_x, 1e-6);
  return out;
}

static_assert(std::endian::native == std::endian::little, "snapshots assume a little-endian host");

void save_net(std::ostream& out, const DenseNet& net) {
  const nlohmann::json header{{"sizes", net.sizes()}, {"dtype", "float64"}, {"count", net.n_params()}};
  const std::string text = header.dump();
  const auto len = static_cast<std::uint64_t>(text.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(net.n_params())));
  if (!out) throw ValidationError("failed to write network snapshot");
}

DenseNet load_net(std::istream& in) {
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof len) || len > (1u << 20))
    throw ValidationError("network snapshot has a corrupt header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw ValidationError("network snapshot is truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("network snapshot header is not JSON: ") + e.what());
  }
  if (header.value("dtype", "") != "float64") throw ValidationError("network snapshot dtype must be float64");
  DenseNet net(header.at("sizes").get<std::vector<int>>());
  if (header.at("count").get<Eigen::Index>() != net.n_params())
    throw ValidationError("network snapshot count does not match its layer sizes");
  if (!in.read(reinterpret_cast<char*>(net.mutable_params().data()),
               static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(net.n_params()))))
    throw ValidationError("network snapshot is truncated");
  return net;
}

void save_net(const std::filesystem::path& path, const DenseNet& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  save_net(out, net);
}

DenseNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open network snapshot " + path.string());
  return load_net(in);
}

}  // namespace entropic
