#include "entropic/stable_critic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

double f_helper(double x, double y) { return x >= y ? -std::expm1(y - x) : std::expm1(x - y); }

Vec m_terms(const Vec& q, const Vec& y) {
  if (q.size() != y.size()) throw ValidationError("predictions and targets differ in length");
  return q + q.cwiseMax(y);
}

double normalizer_z(const Vec& m, double beta) {
  if (m.size() == 0) throw ValidationError("normaliser needs a non-empty batch");
  if (RiskParameter(beta).risk_neutral()) throw DomainError("normaliser needs |beta| above the risk-neutral floor");
  return beta > 0.0 ? m.maxCoeff() : m.minCoeff();
}

Vec raw_exponential_coefficients(const Vec& q, const Vec& y) {
  const Vec m = m_terms(q, y);
  Vec out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out(i) = std::exp(m(i)) * f_helper(q(i), y(i));
  return out;
}

namespace {

void check_rows(const DenseNet& net, const Mat& inputs, const std::vector<Eigen::Index>& rows, const Vec& targets) {
  if (static_cast<Eigen::Index>(rows.size()) != inputs.cols() || targets.size() != inputs.cols())
    throw ValidationError("critic batch has mismatched inputs, rows and targets");
  if (inputs.cols() == 0) throw ValidationError("critic batch is empty");
  for (auto r : rows)
    if (r < 0 || r >= net.output_size()) throw ValidationError("critic output row out of range");
}

Vec select(const Mat& out, const std::vector<Eigen::Index>& rows) {
  Vec v(out.cols());
  for (Eigen::Index i = 0; i < out.cols(); ++i) v(i) = out(rows[static_cast<std::size_t>(i)], i);
  return v;
}

// Backpropagate per-sample coefficients placed at the selected output rows.
Vec weighted_grad(const DenseNet& net, const DenseNet::Cache& cache, const std::vector<Eigen::Index>& rows,
                  const Vec& coeff) {
  Mat g = Mat::Zero(net.output_size(), coeff.size());
  const double inv_n = 1.0 / static_cast<double>(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) g(rows[static_cast<std::size_t>(i)], i) = coeff(i) * inv_n;
  return net.backward(cache, g).params;
}

}  // namespace

StabilizedGradReport stabilized_critic_grad(const DenseNet& net, const Mat& inputs,
                                            const std::vector<Eigen::Index>& rows, const Vec& targets, double beta,
                                            double clip_c) {
  check_rows(net, inputs, rows, targets);
  if (!(clip_c > 0.0)) throw ValidationError("exponent clip must be positive");
  DenseNet::Cache cache;
  const Mat out = net.forward(inputs, cache);
  StabilizedGradReport r;
  r.q = select(out, rows);
  for (Eigen::Index i = 0; i < r.q.size(); ++i) {
    if (!std::isfinite(r.q(i))) throw NumericalError("critic output for sample " + std::to_string(i) + " is not finite");
    if (!std::isfinite(targets(i))) throw NumericalError("critic target for sample " + std::to_string(i) + " is not finite");
  }
  r.targets = targets;
  r.m = m_terms(r.q, targets);
  r.z = normalizer_z(r.m, beta);
  r.shifted = r.m.array() - r.z;
  r.clipped = r.shifted.cwiseMax(-clip_c).cwiseMin(clip_c);
  r.f.resize(r.q.size());
  for (Eigen::Index i = 0; i < r.q.size(); ++i) r.f(i) = f_helper(r.q(i), targets(i));
  r.coeff = r.clipped.array().exp() * r.f.array();
  r.grad = weighted_grad(net, cache, rows, r.coeff);
  return r;
}

CriticGrad unstable_z_grad(const DenseNet& z_net, const Mat& inputs, const std::vector<Eigen::Index>& rows,
                           const Vec& z_targets) {
  check_rows(z_net, inputs, rows, z_targets);
  DenseNet::Cache cache;
  const Mat out = z_net.forward(inputs, cache);
  CriticGrad g;
  g.prediction = select(out, rows);
  g.grad = weighted_grad(z_net, cache, rows, g.prediction - z_targets);
  return g;
}

CriticGrad risk_neutral_td_grad(const DenseNet& q_net, const Mat& inputs, const std::vector<Eigen::Index>& rows,
                                const Vec& targets) {
  check_rows(q_net, inputs, rows, targets);
  DenseNet::Cache cache;
  const Mat out = q_net.forward(inputs, cache);
  CriticGrad g;
  g.prediction = select(out, rows);
  g.grad = weighted_grad(q_net, cache, rows, g.prediction - targets);
  return g;
}

}  // namespace entropic
