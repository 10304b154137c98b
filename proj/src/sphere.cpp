#include "mfcn/sphere.hpp"

#include <cmath>

#include "mfcn/errors.hpp"

namespace mfcn::sphere {

double assoc_legendre(int l, int m, double x) {
  if (m < 0 || m > l) throw ArgumentError("assoc_legendre needs 0 <= m <= l");
  // P_m^m = (2m-1)!! (1-x^2)^{m/2}, then upward recurrence in degree.
  double pmm = 1.0;
  if (m > 0) {
    const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

double eval_harmonic(int l, int m, const Eigen::Vector3d& point) {
  if (l < 0 || std::abs(m) > l) throw ArgumentError("harmonic order must satisfy |m| <= l");
  const double norm = point.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw ArgumentError("harmonic evaluation needs a unit vector, |p| = " + std::to_string(norm));

  const double ct = point.z() / norm;
  const int am = std::abs(m);

  // Probability-orthonormal scaling: surface-orthonormal times sqrt(4 pi).
  double lnratio = std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0);
  double scale = std::sqrt((2.0 * l + 1.0) * std::exp(lnratio));
  if (m != 0) scale *= std::sqrt(2.0);

  double value = scale * assoc_legendre(l, am, ct);
  if (m != 0) {
    const double phi = std::atan2(point.y(), point.x());
    value *= (m > 0) ? std::cos(am * phi) : std::sin(am * phi);
  }
  return value;
}

std::string to_string(LimitKind kind) {
  return kind == LimitKind::EpsLimit ? "eps_limit" : "knn_limit";
}

LimitKind limit_kind_from_string(const std::string& s) {
  if (s == "eps_limit" || s == "eps") return LimitKind::EpsLimit;
  if (s == "knn_limit" || s == "knn") return LimitKind::KnnLimit;
  throw ConfigError("unknown limit kind: " + s);
}

LimitKind limit_kind_for(GraphMode mode) {
  return mode == GraphMode::Epsilon ? LimitKind::EpsLimit : LimitKind::KnnLimit;
}

double continuum_eigenvalue(int l, LimitKind kind) {
  if (l < 0) throw ArgumentError("harmonic degree must be >= 0");
  const double ll1 = static_cast<double>(l) * (l + 1.0);
  return kind == LimitKind::EpsLimit ? ll1 / (8.0 * M_PI) : 2.0 * M_PI * ll1;
}

HarmonicExpansion::HarmonicExpansion(std::initializer_list<std::tuple<int, int, double>> terms) {
  for (const auto& [l, m, c] : terms) add_term(l, m, c);
}

void HarmonicExpansion::add_term(int l, int m, double coeff) {
  if (l < 0 || std::abs(m) > l) throw ArgumentError("expansion term must satisfy |m| <= l");
  auto key = std::make_pair(l, m);
  auto it = terms_.find(key);
  double next = coeff + (it == terms_.end() ? 0.0 : it->second);
  if (next == 0.0) {
    if (it != terms_.end()) terms_.erase(it);
  } else {
    terms_[key] = next;
  }
}

double HarmonicExpansion::coeff(int l, int m) const {
  auto it = terms_.find({l, m});
  return it == terms_.end() ? 0.0 : it->second;
}

int HarmonicExpansion::max_degree() const {
  int deg = 0;
  for (const auto& [key, c] : terms_) deg = std::max(deg, key.first);
  return deg;
}

double HarmonicExpansion::eval(const Eigen::Vector3d& point) const {
  double acc = 0.0;
  for (const auto& [key, c] : terms_) acc += c * eval_harmonic(key.first, key.second, point);
  return acc;
}

double HarmonicExpansion::l2_norm() const {
  double acc = 0.0;
  for (const auto& [key, c] : terms_) acc += c * c;
  return std::sqrt(acc);
}

double HarmonicExpansion::l4_norm() const {
  if (terms_.empty()) return 0.0;
  const int L = max_degree();
  // f^4 has degree 4L in cos(theta) and trig degree 4L in phi.
  SphereQuadrature quad = SphereQuadrature::product_rule(2 * L + 1, 4 * L + 2);
  double i4 = quad.integrate([&](const Eigen::Vector3d& p) {
    double v = eval(p);
    return v * v * v * v;
  });
  return std::pow(std::max(0.0, i4), 0.25);
}

double HarmonicExpansion::inner(const HarmonicExpansion& other) const {
  // Orthonormality: only shared (l, m) keys contribute.
  double acc = 0.0;
  for (const auto& [key, c] : terms_) {
    auto it = other.terms_.find(key);
    if (it != other.terms_.end()) acc += c * it->second;
  }
  return acc;
}

HarmonicExpansion HarmonicExpansion::scaled(double factor) const {
  HarmonicExpansion out;
  if (factor == 0.0) return out;
  for (const auto& [key, c] : terms_) out.terms_[key] = c * factor;
  return out;
}

HarmonicExpansion HarmonicExpansion::plus(const HarmonicExpansion& other, double factor) const {
  HarmonicExpansion out = *this;
  for (const auto& [key, c] : other.terms_) out.add_term(key.first, key.second, c * factor);
  return out;
}

Eigen::VectorXd project_expansion(const HarmonicExpansion& f, const PointCloud& cloud) {
  return project_signal(
      [&](const Eigen::VectorXd& p) {
        return f.eval(Eigen::Vector3d(p(0), p(1), p(2)));
      },
      cloud);
}

HarmonicExpansion continuum_filter(const SpectralFilter& w, const HarmonicExpansion& f,
                                   LimitKind kind) {
  HarmonicExpansion out;
  for (const auto& [key, c] : f.terms()) {
    double scaled = c * w(continuum_eigenvalue(key.first, kind));
    if (scaled != 0.0) out.add_term(key.first, key.second, scaled);
  }
  return out;
}

std::vector<HarmonicExpansion> continuum_network_forward(const NetworkSpec& net,
                                                         const std::vector<HarmonicExpansion>& F,
                                                         LimitKind kind) {
  net.validate();
  std::vector<HarmonicExpansion> cur = F;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const LayerSpec& layer = net.layers[li];
    if (layer.activation != Activation::Identity)
      throw NotSupportedError("continuum network oracle requires identity activation (layer " +
                              std::to_string(li) + " uses " + to_string(layer.activation) + ")");
    if (static_cast<int>(cur.size()) != layer.C_in)
      throw DimensionError("continuum forward: layer " + std::to_string(li) + " expects " +
                           std::to_string(layer.C_in) + " channels, got " +
                           std::to_string(cur.size()));

    // Filtering
    std::vector<std::vector<HarmonicExpansion>> filtered(layer.J);
    for (int j = 0; j < layer.J; ++j) {
      filtered[j].resize(layer.C_in);
      for (int k = 0; k < layer.C_in; ++k)
        filtered[j][k] = continuum_filter(layer.filter(j, k), cur[k], kind);
    }
    // Combine
    std::vector<std::vector<HarmonicExpansion>> combined(layer.J);
    for (int j = 0; j < layer.J; ++j) {
      combined[j].resize(layer.C_mid);
      for (int k = 0; k < layer.C_mid; ++k) {
        HarmonicExpansion g;
        for (int i = 0; i < layer.C_in; ++i) g = g.plus(filtered[j][i], layer.theta[j](i, k));
        combined[j][k] = std::move(g);
      }
    }
    // Cross-filter convolution + (identity) activation + reshaping
    std::vector<HarmonicExpansion> next(static_cast<std::size_t>(layer.C_out()));
    for (int k = 0; k < layer.C_mid; ++k) {
      for (int jo = 0; jo < layer.J_out; ++jo) {
        HarmonicExpansion g;
        for (int ji = 0; ji < layer.J; ++ji) g = g.plus(combined[ji][k], layer.alpha[k](jo, ji));
        next[static_cast<std::size_t>(jo) * layer.C_mid + k] = std::move(g);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ArgumentError("gauss_legendre needs n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

SphereQuadrature SphereQuadrature::product_rule(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw ArgumentError("quadrature orders must be >= 1");
  std::vector<double> u, wu;
  gauss_legendre(n_theta, u, wu);
  SphereQuadrature quad;
  quad.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  quad.weights.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = u[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    // d(mu) = (1/2) du * dphi/(2 pi)
    const double w_theta = 0.5 * wu[i] / n_phi;
    for (int jp = 0; jp < n_phi; ++jp) {
      const double phi = 2.0 * M_PI * jp / n_phi;
      quad.points.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      quad.weights.push_back(w_theta);
    }
  }
  return quad;
}

}  // namespace mfcn::sphere
