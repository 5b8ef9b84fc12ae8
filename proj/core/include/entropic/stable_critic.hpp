#pragma once

#include <cstddef>
#include <vector>

#include "entropic/mdp.hpp"
#include "entropic/neural.hpp"

namespace entropic {

inline constexpr double kDefaultExpClip = 5.0;

/// f(x, y) = 1 - e^{y - x} for x >= y, e^{x - y} - 1 otherwise; always in [-1, 1] and
/// e^x (e^x - e^y) = e^{x + max(x, y)} f(x, y).
double f_helper(double x, double y);

/// m_i = q_i + max(q_i, y_i).
Vec m_terms(const Vec& q, const Vec& y);

/// max_i m_i for beta > 0, min_i m_i for beta < 0. Throws DomainError when |beta| is below
/// the risk-neutral floor and ValidationError on an empty batch.
double normalizer_z(const Vec& m, double beta);

/// Per-sample leading factors before any normalisation: e^{m_i} f(q_i, y_i).
Vec raw_exponential_coefficients(const Vec& q, const Vec& y);

/// Everything the stabilised gradient computes for one mini-batch.
struct StabilizedGradReport {
  Vec q;
  Vec targets;
  Vec m;
  double z = 0.0;
  /// m - z, before and after clipping to [-c, c].
  Vec shifted;
  Vec clipped;
  Vec f;
  /// e^{clipped_i} f_i.
  Vec coeff;
  /// mean_i coeff_i grad_psi Q_psi(input_i)[row_i], flat parameter layout.
  Vec grad;
};

/// Log-domain critic update direction for Z = e^{Q_psi}.
///
/// inputs holds one critic input per column; rows picks the output unit read for each
/// sample (the action for a discrete critic, 0 for a state-action critic). targets are
/// y_i = beta r_i + continuation, supplied by the caller. Throws NumericalError naming the
/// first sample whose network output is not finite.
StabilizedGradReport stabilized_critic_grad(const DenseNet& net, const Mat& inputs,
                                            const std::vector<Eigen::Index>& rows, const Vec& targets, double beta,
                                            double clip_c = kDefaultExpClip);

struct CriticGrad {
  /// Network outputs at the selected rows.
  Vec prediction;
  Vec grad;
};

/// Gradient of mean_i (Z_psi(input_i)[row_i] - target_i)^2 / 2 with Z_psi a plain network
/// output. No stabilisation: overflow shows up as inf or nan in the result.
CriticGrad unstable_z_grad(const DenseNet& z_net, const Mat& inputs, const std::vector<Eigen::Index>& rows,
                           const Vec& z_targets);

/// Gradient of mean_i (Q(input_i)[row_i] - target_i)^2 / 2.
CriticGrad risk_neutral_td_grad(const DenseNet& q_net, const Mat& inputs, const std::vector<Eigen::Index>& rows,
                                const Vec& targets);

}  // namespace entropic
