#include "mfcn/network.hpp"

#include <algorithm>
#include <cmath>

#include "mfcn/errors.hpp"

namespace mfcn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Abs: return "abs";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::Relu;
  if (s == "abs") return Activation::Abs;
  if (s == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation: " + s);
}

double apply_activation(Activation a, double v) {
  switch (a) {
    case Activation::Identity: return v;
    case Activation::Relu: return v > 0.0 ? v : 0.0;
    case Activation::Abs: return std::abs(v);
    case Activation::Tanh: return std::tanh(v);
  }
  return v;
}

static void activate_in_place(Activation a, Eigen::MatrixXd& M) {
  switch (a) {
    case Activation::Identity:
      return;
    case Activation::Relu:
      M = M.cwiseMax(0.0);
      return;
    case Activation::Abs:
      M = M.cwiseAbs();
      return;
    case Activation::Tanh:
      M = M.array().tanh().matrix();
      return;
  }
}

void LayerSpec::validate() const {
  if (C_in < 1 || J < 1 || C_mid < 1 || J_out < 1)
    throw DimensionError("layer dimensions must be positive");
  if (static_cast<int>(filters.size()) != J * C_in)
    throw DimensionError("filtering: expected " + std::to_string(J * C_in) + " filters, got " +
                         std::to_string(filters.size()));
  if (static_cast<int>(theta.size()) != J)
    throw DimensionError("combine: expected " + std::to_string(J) + " theta matrices, got " +
                         std::to_string(theta.size()));
  for (const auto& t : theta)
    if (t.rows() != C_in || t.cols() != C_mid)
      throw DimensionError("combine: theta must be C_in x C_mid (" + std::to_string(C_in) + "x" +
                           std::to_string(C_mid) + "), got " + std::to_string(t.rows()) + "x" +
                           std::to_string(t.cols()));
  if (static_cast<int>(alpha.size()) != C_mid)
    throw DimensionError("cross-filter: expected " + std::to_string(C_mid) +
                         " alpha matrices, got " + std::to_string(alpha.size()));
  for (const auto& a : alpha)
    if (a.rows() != J_out || a.cols() != J)
      throw DimensionError("cross-filter: alpha must be J_out x J (" + std::to_string(J_out) +
                           "x" + std::to_string(J) + "), got " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()));
}

LayerSpec LayerSpec::identity_collapsed(std::vector<SpectralFilter> bank, int C_in,
                                        Activation act) {
  LayerSpec layer;
  layer.C_in = C_in;
  layer.J = static_cast<int>(bank.size());
  layer.C_mid = C_in;
  layer.J_out = layer.J;
  layer.filters.reserve(static_cast<std::size_t>(layer.J) * C_in);
  for (const auto& w : bank)
    for (int k = 0; k < C_in; ++k) layer.filters.push_back(w);
  layer.theta.assign(layer.J, Eigen::MatrixXd::Identity(C_in, C_in));
  layer.alpha.assign(C_in, Eigen::MatrixXd::Identity(layer.J, layer.J));
  layer.activation = act;
  layer.validate();
  return layer;
}

void NetworkSpec::validate() const {
  int expected = -1;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].validate();
    if (expected >= 0 && layers[i].C_in != expected)
      throw DimensionError("layer " + std::to_string(i) + " expects C_in " +
                           std::to_string(layers[i].C_in) + " but previous layer outputs " +
                           std::to_string(expected));
    expected = layers[i].C_out();
  }
}

Eigen::MatrixXd layer_forward(const LayerSpec& layer, const SpectralBasis& basis,
                              const Eigen::MatrixXd& X) {
  layer.validate();
  if (X.cols() != layer.C_in)
    throw DimensionError("filtering: input has " + std::to_string(X.cols()) +
                         " channels, layer expects " + std::to_string(layer.C_in));
  if (X.rows() != basis.n())
    throw DimensionError("filtering: input has " + std::to_string(X.rows()) +
                         " rows, basis has n = " + std::to_string(basis.n()));

  const int n = static_cast<int>(X.rows());
  const int J = layer.J, C_in = layer.C_in, C_mid = layer.C_mid, J_out = layer.J_out;

  // Filtering: one Fourier analysis pass shared by the whole grid, so
  // filters referenced by several (j, k) slots cost one diagonal each.
  const Eigen::MatrixXd coeffs = basis.vectors.transpose() * X;  // kappa x C_in
  std::vector<Eigen::MatrixXd> filtered(J);                      // each n x C_in
  for (int j = 0; j < J; ++j) {
    Eigen::MatrixXd scaled(coeffs.rows(), C_in);
    for (int k = 0; k < C_in; ++k)
      scaled.col(k) = coeffs.col(k).cwiseProduct(layer.filter(j, k)(basis.eigenvalues));
    filtered[j] = basis.vectors * scaled;
  }

  // Combine: Y_j = X~_j * theta_j.
  std::vector<Eigen::MatrixXd> combined(J);
  for (int j = 0; j < J; ++j) combined[j] = filtered[j] * layer.theta[j];

  // Cross-filter convolution + activation + reshaping. Output column
  // j * C_mid + k holds z_{j,k} (0-based j < J_out, k < C_mid).
  Eigen::MatrixXd out(n, layer.C_out());
  for (int k = 0; k < C_mid; ++k) {
    const Eigen::MatrixXd& a = layer.alpha[k];
    for (int jo = 0; jo < J_out; ++jo) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      for (int ji = 0; ji < J; ++ji)
        if (a(jo, ji) != 0.0) acc += a(jo, ji) * combined[ji].col(k);
      out.col(jo * C_mid + k) = acc;
    }
  }
  activate_in_place(layer.activation, out);
  return out;
}

Eigen::MatrixXd network_forward(const NetworkSpec& net, const SpectralBasis& basis,
                                const Eigen::MatrixXd& X) {
  net.validate();
  Eigen::MatrixXd cur = X;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    try {
      cur = layer_forward(net.layers[i], basis, cur);
    } catch (const DimensionError& e) {
      throw DimensionError("layer " + std::to_string(i) + ": " + e.what());
    }
  }
  return cur;
}

NetworkSpec preset_mcn(int n_layers, const std::vector<int>& channel_widths,
                       const std::vector<Eigen::MatrixXd>& theta_list) {
  if (n_layers < 1) throw ArgumentError("preset_mcn needs n_layers >= 1");
  if (static_cast<int>(channel_widths.size()) != n_layers + 1)
    throw DimensionError("preset_mcn: channel_widths must have n_layers + 1 entries");
  if (static_cast<int>(theta_list.size()) != n_layers)
    throw DimensionError("preset_mcn: theta_list must have n_layers entries");

  NetworkSpec net;
  net.preset_tag = "mcn";
  for (int l = 0; l < n_layers; ++l) {
    LayerSpec layer;
    layer.C_in = channel_widths[l];
    layer.J = 1;
    layer.C_mid = channel_widths[l + 1];
    layer.J_out = 1;
    layer.filters.assign(static_cast<std::size_t>(layer.C_in), SpectralFilter::heat());
    if (theta_list[l].rows() != layer.C_in || theta_list[l].cols() != layer.C_mid)
      throw DimensionError("preset_mcn: theta " + std::to_string(l) + " must be " +
                           std::to_string(layer.C_in) + "x" + std::to_string(layer.C_mid));
    layer.theta = {theta_list[l]};
    layer.alpha.assign(static_cast<std::size_t>(layer.C_mid), Eigen::MatrixXd::Identity(1, 1));
    layer.activation = Activation::Relu;
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

NetworkSpec preset_cheb(const std::vector<std::vector<std::vector<double>>>& poly_coeffs_grid) {
  if (poly_coeffs_grid.empty() || poly_coeffs_grid.front().empty())
    throw ArgumentError("preset_cheb needs a non-empty J x C grid of coefficient lists");
  const int J = static_cast<int>(poly_coeffs_grid.size());
  const int C = static_cast<int>(poly_coeffs_grid.front().size());

  LayerSpec layer;
  layer.C_in = C;
  layer.J = J;
  layer.C_mid = C;
  layer.J_out = J;
  for (int j = 0; j < J; ++j) {
    if (static_cast<int>(poly_coeffs_grid[j].size()) != C)
      throw DimensionError("preset_cheb: ragged coefficient grid at filter row " +
                           std::to_string(j));
    for (int k = 0; k < C; ++k) {
      if (poly_coeffs_grid[j][k].empty())
        throw ArgumentError("preset_cheb: empty coefficient list at (" + std::to_string(j) +
                            "," + std::to_string(k) + ")");
      layer.filters.push_back(SpectralFilter::poly_in_heat(poly_coeffs_grid[j][k]));
    }
  }
  layer.theta.assign(J, Eigen::MatrixXd::Identity(C, C));
  layer.alpha.assign(C, Eigen::MatrixXd::Identity(J, J));
  layer.activation = Activation::Relu;

  NetworkSpec net;
  net.preset_tag = "cheb";
  net.layers = {std::move(layer)};
  net.validate();
  return net;
}

NetworkSpec preset_scattering(int J, int order, int C0) {
  if (J < 1) throw ArgumentError("preset_scattering needs J >= 1");
  if (order < 1) throw ArgumentError("preset_scattering needs order >= 1");
  if (C0 < 1) throw ArgumentError("preset_scattering needs C0 >= 1");

  std::vector<SpectralFilter> bank;
  for (int j = 1; j <= J; ++j) bank.push_back(SpectralFilter::wavelet(j));

  NetworkSpec net;
  net.preset_tag = "scattering";
  int width = C0;
  for (int l = 0; l < order; ++l) {
    net.layers.push_back(LayerSpec::identity_collapsed(bank, width, Activation::Abs));
    width *= J;
  }
  net.validate();
  return net;
}

WeightNorms weight_norms(const NetworkSpec& net) {
  WeightNorms norms;
  for (const auto& layer : net.layers) {
    double a1 = 0.0;
    for (const auto& t : layer.theta)
      for (int k = 0; k < t.cols(); ++k) a1 = std::max(a1, t.col(k).cwiseAbs().sum());
    double a2 = 0.0;
    for (const auto& a : layer.alpha)
      for (int j = 0; j < a.rows(); ++j) a2 = std::max(a2, a.row(j).cwiseAbs().sum());
    norms.A1.push_back(a1);
    norms.A2.push_back(a2);
  }
  return norms;
}

NetworkSpec normalize_layer_gains(const NetworkSpec& net) {
  WeightNorms norms = weight_norms(net);
  NetworkSpec out = net;
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    if (norms.A1[l] == 0.0 || norms.A2[l] == 0.0)
      throw ArgumentError("cannot normalize layer " + std::to_string(l) +
                          ": all-zero weight matrix");
    for (auto& t : out.layers[l].theta) t /= norms.A1[l];
    for (auto& a : out.layers[l].alpha) a /= norms.A2[l];
  }
  return out;
}

std::vector<std::vector<int>> scattering_paths(int J, int order) {
  std::vector<std::vector<int>> paths;
  std::vector<int> cur(order, 1);
  while (true) {
    paths.push_back(cur);
    int pos = order - 1;
    while (pos >= 0 && cur[pos] == J) {
      cur[pos] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur[pos];
  }
  return paths;
}

Eigen::MatrixXd scattering_transform(const SpectralBasis& basis, const Eigen::VectorXd& x,
                                     int J, int order) {
  auto paths = scattering_paths(J, order);
  Eigen::MatrixXd out(x.size(), static_cast<Eigen::Index>(paths.size()));
  // Cache the cascade by path prefix: prefix results repeat across paths.
  std::vector<Eigen::VectorXd> prev{x};
  std::vector<Eigen::VectorXd> cur;
  for (int depth = 0; depth < order; ++depth) {
    cur.clear();
    cur.reserve(prev.size() * static_cast<std::size_t>(J));
    for (const auto& u : prev)
      for (int j = 1; j <= J; ++j)
        cur.push_back(apply_filter_exact(SpectralFilter::wavelet(j), basis, u).cwiseAbs());
    prev = cur;
  }
  // prev is ordered with j_1 as the major digit = lexicographic path order.
  for (std::size_t p = 0; p < prev.size(); ++p) out.col(static_cast<Eigen::Index>(p)) = prev[p];
  return out;
}

int scattering_engine_column(const std::vector<int>& path, int J) {
  // Engine reshape makes the newest scale the major digit: column =
  // sum_l (j_l - 1) * J^(l-1) over l = 1..order.
  int col = 0;
  int stride = 1;
  for (int j : path) {
    col += (j - 1) * stride;
    stride *= J;
  }
  return col;
}

}  // namespace mfcn
