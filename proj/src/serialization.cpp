#include "mfcn/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mfcn/errors.hpp"
#include "mfcn/io.hpp"

namespace mfcn {

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where,
                  std::vector<std::string>& problems) {
  if (!j.is_object()) {
    problems.push_back(where + ": expected an object");
    return;
  }
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) problems.push_back(where + ": unknown key '" + key + "'");
  for (const auto& key : required)
    if (!j.contains(key)) problems.push_back(where + ": missing key '" + key + "'");
}

[[noreturn]] void fail(const std::vector<std::string>& problems) {
  std::ostringstream msg;
  msg << "config schema violations:";
  for (const auto& p : problems) msg << "\n  - " << p;
  throw ConfigError(msg.str());
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(where + ": expected a nested array matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ConfigError(where + ": ragged matrix row " + std::to_string(r));
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(where + ": non-numeric matrix entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json filter_to_json(const SpectralFilter& w) {
  switch (w.kind()) {
    case FilterKind::Heat:
      return json{{"kind", "heat"}};
    case FilterKind::Wavelet:
      return json{{"kind", "wavelet"}, {"j", w.scale()}};
    case FilterKind::Constant:
      return json{{"kind", "constant"}, {"c", w.constant_value()}};
    case FilterKind::PolyInHeat:
      return json{{"kind", "poly_in_heat"}, {"coeffs", w.coeffs()}};
  }
  throw Error("unreachable filter kind");
}

SpectralFilter filter_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("filter: expected an object with a 'kind' string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "heat") return SpectralFilter::heat();
  if (kind == "wavelet") {
    if (!j.contains("j") || !j["j"].is_number_integer())
      throw ConfigError("filter: wavelet needs integer 'j'");
    return SpectralFilter::wavelet(j["j"].get<int>());
  }
  if (kind == "constant") {
    if (!j.contains("c") || !j["c"].is_number())
      throw ConfigError("filter: constant needs numeric 'c'");
    return SpectralFilter::constant(j["c"].get<double>());
  }
  if (kind == "poly_in_heat") {
    if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty())
      throw ConfigError("filter: poly_in_heat needs a non-empty 'coeffs' array");
    std::vector<double> coeffs;
    for (const auto& c : j["coeffs"]) {
      if (!c.is_number()) throw ConfigError("filter: poly_in_heat coefficients must be numeric");
      coeffs.push_back(c.get<double>());
    }
    return SpectralFilter::poly_in_heat(std::move(coeffs));
  }
  throw ConfigError("filter: unknown kind '" + kind + "'");
}

json expansion_to_json(const sphere::HarmonicExpansion& f) {
  json arr = json::array();
  for (const auto& [key, c] : f.terms())
    arr.push_back(json{{"l", key.first}, {"m", key.second}, {"coeff", c}});
  return arr;
}

sphere::HarmonicExpansion expansion_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("signal: expected an array of {l, m, coeff}");
  sphere::HarmonicExpansion f;
  for (const auto& term : j) {
    std::vector<std::string> problems;
    require_keys(term, {"l", "m", "coeff"}, {"l", "m", "coeff"}, "signal term", problems);
    if (!problems.empty()) fail(problems);
    if (!term["l"].is_number_integer() || !term["m"].is_number_integer() ||
        !term["coeff"].is_number())
      throw ConfigError("signal term: l and m must be integers, coeff numeric");
    f.add_term(term["l"].get<int>(), term["m"].get<int>(), term["coeff"].get<double>());
  }
  return f;
}

json network_to_json(const NetworkSpec& net) {
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json filters = json::array();
    for (const auto& w : layer.filters) filters.push_back(filter_to_json(w));
    json thetas = json::array();
    for (const auto& t : layer.theta) thetas.push_back(matrix_to_json(t));
    json alphas = json::array();
    for (const auto& a : layer.alpha) alphas.push_back(matrix_to_json(a));
    layers.push_back(json{{"J", layer.J},
                          {"C_in", layer.C_in},
                          {"C_mid", layer.C_mid},
                          {"J_out", layer.J_out},
                          {"filters", std::move(filters)},
                          {"theta", std::move(thetas)},
                          {"alpha", std::move(alphas)},
                          {"activation", to_string(layer.activation)}});
  }
  return json{{"layers", std::move(layers)}, {"preset", net.preset_tag}};
}

NetworkSpec network_from_json(const json& j) {
  std::vector<std::string> problems;
  require_keys(j, {"layers", "preset"}, {"layers"}, "network", problems);
  if (!problems.empty()) fail(problems);
  if (!j["layers"].is_array()) throw ConfigError("network: 'layers' must be an array");

  NetworkSpec net;
  if (j.contains("preset")) net.preset_tag = j["preset"].get<std::string>();
  int index = 0;
  for (const auto& lj : j["layers"]) {
    const std::string where = "layer " + std::to_string(index);
    require_keys(lj, {"J", "C_in", "C_mid", "J_out", "filters", "theta", "alpha", "activation"},
                 {"J", "C_in", "C_mid", "J_out", "filters", "theta", "alpha", "activation"},
                 where, problems);
    if (!problems.empty()) fail(problems);
    LayerSpec layer;
    layer.J = lj["J"].get<int>();
    layer.C_in = lj["C_in"].get<int>();
    layer.C_mid = lj["C_mid"].get<int>();
    layer.J_out = lj["J_out"].get<int>();
    for (const auto& fj : lj["filters"]) layer.filters.push_back(filter_from_json(fj));
    for (std::size_t t = 0; t < lj["theta"].size(); ++t)
      layer.theta.push_back(matrix_from_json(lj["theta"][t], where + " theta"));
    for (std::size_t a = 0; a < lj["alpha"].size(); ++a)
      layer.alpha.push_back(matrix_from_json(lj["alpha"][a], where + " alpha"));
    layer.activation = activation_from_string(lj["activation"].get<std::string>());
    layer.validate();
    net.layers.push_back(std::move(layer));
    ++index;
  }
  net.validate();
  return net;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  json graph{{"mode", to_string(cfg.graph.mode)},
             {"scale_c", cfg.graph.effective_scale()},
             {"intrinsic_dim", cfg.graph.intrinsic_dim}};
  if (cfg.graph.explicit_eps) graph["eps"] = *cfg.graph.explicit_eps;
  if (cfg.graph.explicit_k) graph["k"] = *cfg.graph.explicit_k;
  return json{{"n_grid", cfg.n_grid},
              {"trials", cfg.trials},
              {"graph", std::move(graph)},
              {"kappa", cfg.kappa},
              {"filter", filter_to_json(cfg.filter)},
              {"signal", expansion_to_json(cfg.signal)},
              {"base_seed", cfg.base_seed},
              {"eigentrack", cfg.eigentrack},
              {"depth", cfg.depth},
              {"jobs", cfg.jobs}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  std::vector<std::string> problems;
  require_keys(j,
               {"n_grid", "trials", "graph", "kappa", "filter", "signal", "base_seed",
                "eigentrack", "depth", "jobs", "kind"},
               {}, "config", problems);

  ExperimentConfig cfg;
  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array() || j["n_grid"].empty())
      problems.push_back("config.n_grid: expected a non-empty array of integers");
    else {
      cfg.n_grid.clear();
      for (const auto& n : j["n_grid"]) {
        if (!n.is_number_integer()) {
          problems.push_back("config.n_grid: entries must be integers");
          break;
        }
        cfg.n_grid.push_back(n.get<int>());
      }
    }
  }
  auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      problems.push_back(std::string("config.") + key + ": expected an integer");
    else
      out = j[key].get<int>();
  };
  get_int("trials", cfg.trials);
  get_int("kappa", cfg.kappa);
  get_int("eigentrack", cfg.eigentrack);
  get_int("depth", cfg.depth);
  get_int("jobs", cfg.jobs);
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_integer())
      problems.push_back("config.base_seed: expected an integer");
    else
      cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  if (j.contains("graph")) {
    const json& g = j["graph"];
    require_keys(g, {"mode", "scale_c", "eps", "k", "intrinsic_dim"}, {}, "config.graph",
                 problems);
    if (g.is_object()) {
      try {
        if (g.contains("mode")) cfg.graph.mode = graph_mode_from_string(g["mode"].get<std::string>());
        if (g.contains("scale_c") && !g["scale_c"].is_null())
          cfg.graph.scale_c = g["scale_c"].get<double>();
        if (g.contains("eps") && !g["eps"].is_null())
          cfg.graph.explicit_eps = g["eps"].get<double>();
        if (g.contains("k") && !g["k"].is_null()) cfg.graph.explicit_k = g["k"].get<int>();
        if (g.contains("intrinsic_dim")) cfg.graph.intrinsic_dim = g["intrinsic_dim"].get<int>();
      } catch (const json::exception& e) {
        problems.push_back(std::string("config.graph: ") + e.what());
      } catch (const ConfigError& e) {
        problems.push_back(std::string("config.graph: ") + e.what());
      }
    }
  }
  try {
    if (j.contains("filter")) cfg.filter = filter_from_json(j["filter"]);
  } catch (const ConfigError& e) {
    problems.push_back(std::string("config.filter: ") + e.what());
  }
  try {
    if (j.contains("signal")) cfg.signal = expansion_from_json(j["signal"]);
  } catch (const ConfigError& e) {
    problems.push_back(std::string("config.signal: ") + e.what());
  }
  if (!problems.empty()) fail(problems);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    problems.push_back(e.what());
    fail(problems);
  }
  return cfg;
}

json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("malformed JSON in " + path);
  return j;
}

}  // namespace mfcn
