#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mfcn/spectral.hpp"

namespace mfcn {

enum class Activation { Identity, Relu, Abs, Tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
double apply_activation(Activation a, double v);

/// One filter-combine layer: filter each of C_in channels with a J x C_in
/// grid of spectral filters, combine across channels with theta, convolve
/// across the filter index with alpha, apply a pointwise nonexpansive
/// activation, and reshape to J_out * C_mid output channels.
struct LayerSpec {
  int C_in = 1;
  int J = 1;
  int C_mid = 1;   // channels after the combine step
  int J_out = 1;   // filter slots after the cross-filter convolution
  std::vector<SpectralFilter> filters;      // J*C_in entries, index j*C_in + k
  std::vector<Eigen::MatrixXd> theta;       // J matrices, each C_in x C_mid
  std::vector<Eigen::MatrixXd> alpha;       // C_mid matrices, each J_out x J
  Activation activation = Activation::Relu;

  int C_out() const { return J_out * C_mid; }
  const SpectralFilter& filter(int j, int k) const { return filters[j * C_in + k]; }
  void validate() const;

  /// Layer with everything collapsed to pass-through around one filter bank.
  static LayerSpec identity_collapsed(std::vector<SpectralFilter> bank, int C_in,
                                      Activation act);
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  std::string preset_tag = "custom";

  void validate() const;  // checks the C_out -> C_in chain
};

/// Per-layer weight norms: A1 = max_{j,k} sum_i |theta^{(j)}_{i,k}| and
/// A2 = max_{j,k} sum_i |alpha^{(k)}_{j,i}|.
struct WeightNorms {
  std::vector<double> A1;
  std::vector<double> A2;
};

/// The five steps in order; dimension errors name the offending step.
Eigen::MatrixXd layer_forward(const LayerSpec& layer, const SpectralBasis& basis,
                              const Eigen::MatrixXd& X);

Eigen::MatrixXd network_forward(const NetworkSpec& net, const SpectralBasis& basis,
                                const Eigen::MatrixXd& X);

/// Low-pass preset: J = J' = 1, w(l) = e^{-l}, combine = theta per layer,
/// cross-filter omitted, relu.
NetworkSpec preset_mcn(int n_layers, const std::vector<int>& channel_widths,
                       const std::vector<Eigen::MatrixXd>& theta_list);

/// One layer of polynomial-in-heat filters p_{j,k}(e^{-l}); combine and
/// cross-filter are identities, relu.
NetworkSpec preset_cheb(const std::vector<std::vector<std::vector<double>>>& poly_coeffs_grid);

/// Wavelet cascade with steps (ii) and (iii) omitted and abs activation.
/// Output channel digits encode scales with the most recent scale as the
/// major digit (the reshape law applied layer by layer).
NetworkSpec preset_scattering(int J, int order, int C0 = 1);

WeightNorms weight_norms(const NetworkSpec& net);

/// Rescales theta (by 1/A1) and alpha (by 1/A2) so A1 * A2 = 1 per layer.
NetworkSpec normalize_layer_gains(const NetworkSpec& net);

/// All scale paths (j_1, ..., j_order), 1-based, in lexicographic order.
std::vector<std::vector<int>> scattering_paths(int J, int order);

/// Dedicated cascade driver: column p holds |w_{j_order}(L) ... |w_{j_1}(L) x||
/// for scattering_paths(J, order)[p].
Eigen::MatrixXd scattering_transform(const SpectralBasis& basis, const Eigen::VectorXd& x,
                                     int J, int order);

/// Output column of preset_scattering's network for a given path (C0 = 1).
int scattering_engine_column(const std::vector<int>& path, int J);

}  // namespace mfcn
