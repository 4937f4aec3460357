#include "bdfusion/config.hpp"

#include "bdfusion/csv.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace bdfusion::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    return csv::parse_real(v, 0);
  } catch (const Error&) {
    throw Error("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& v) {
  try {
    return csv::parse_int(v, 0);
  } catch (const Error&) {
    throw Error("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& part : csv::split(v, ',')) {
    auto p = trim(part);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<double> number_list(const std::string& key, const std::string& v) {
  auto range = csv::split(v, ':');
  if (range.size() == 3) {
    const double start = parse_number(key, trim(range[0]));
    const double step = parse_number(key, trim(range[1]));
    const double stop = parse_number(key, trim(range[2]));
    if (!(step > 0.0)) throw Error("config key '" + key + "': range step must be positive");
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& p : list(v)) out.push_back(parse_number(key, p));
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double d : v) parts.push_back(csv::format_real(d));
  return csv::join(parts);
}

}  // namespace

KeyValues parse(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  return parse(in);
}

pipeline::PipelineConfig apply(const KeyValues& kv, pipeline::PipelineConfig cfg) {
  std::optional<double> C, C_weighted, alpha;
  std::optional<pipeline::GammaChoice> gamma;
  for (const auto& [key, v] : kv) {
    if (key == "functional_set") cfg.functional_set = v;
    else if (key == "pca") cfg.pca = parse_bool(key, v);
    else if (key == "pca_variance") cfg.pca_variance = parse_number(key, v);
    else if (key == "tree_select") cfg.tree_select = parse_bool(key, v);
    else if (key == "tree_n_trees") cfg.tree.n_trees = static_cast<int>(parse_integer(key, v));
    else if (key == "tree_max_depth") cfg.tree.max_depth = static_cast<int>(parse_integer(key, v));
    else if (key == "tree_min_leaf") cfg.tree.min_leaf = static_cast<int>(parse_integer(key, v));
    else if (key == "tree_seed") cfg.tree.seed = static_cast<std::uint64_t>(parse_integer(key, v));
    else if (key == "zscore") cfg.zscore = parse_bool(key, v);
    else if (key == "l2") cfg.l2 = parse_bool(key, v);
    else if (key == "model") cfg.model = pipeline::model_kind_from_string(v);
    else if (key == "C_grid") cfg.C_grid = number_list(key, v);
    else if (key == "alpha_grid") cfg.alpha_grid = number_list(key, v);
    else if (key == "gamma_grid") {
      cfg.gamma_grid.clear();
      for (const auto& p : list(v)) cfg.gamma_grid.push_back(pipeline::GammaChoice::parse(p));
    }
    else if (key == "C") C = parse_number(key, v);
    else if (key == "C_weighted") C_weighted = parse_number(key, v);
    else if (key == "gamma") gamma = pipeline::GammaChoice::parse(v);
    else if (key == "alpha") alpha = parse_number(key, v);
    else if (key == "fusion") cfg.fusion = pipeline::fusion_method_from_string(v);
    else if (key == "fallback") cfg.fallback_modality = v;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(key, v));
    else if (key == "dirichlet_draws") cfg.dirichlet_draws = static_cast<std::size_t>(parse_integer(key, v));
    else if (key == "folds") cfg.folds = static_cast<int>(parse_integer(key, v));
    else if (key == "stratified") cfg.stratified = parse_bool(key, v);
    else if (key == "classes") cfg.classes = ClassSet(list(v));
    else throw Error("unknown config key '" + key + "'");
  }
  if (C || C_weighted || gamma || alpha) {
    pipeline::KernelParams p = cfg.fixed_params.value_or(pipeline::KernelParams{
        cfg.C_grid.empty() ? 1.0 : cfg.C_grid.front(), cfg.C_grid.empty() ? 1.0 : cfg.C_grid.front(),
        cfg.gamma_grid.empty() ? pipeline::GammaChoice::median_heuristic() : cfg.gamma_grid.front(),
        cfg.alpha_grid.empty() ? 1.0 : cfg.alpha_grid.front()});
    if (C) p.C = *C;
    if (C_weighted) p.C_weighted = *C_weighted;
    if (gamma) p.gamma = *gamma;
    if (alpha) p.alpha = *alpha;
    cfg.fixed_params = p;
  }
  if (kv.count("seed") && !kv.count("tree_seed")) cfg.tree.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

KeyValues describe(const pipeline::PipelineConfig& cfg) {
  KeyValues kv;
  kv["functional_set"] = cfg.functional_set;
  kv["pca"] = cfg.pca ? "true" : "false";
  kv["pca_variance"] = csv::format_real(cfg.pca_variance);
  kv["tree_select"] = cfg.tree_select ? "true" : "false";
  kv["tree_n_trees"] = std::to_string(cfg.tree.n_trees);
  kv["tree_max_depth"] = std::to_string(cfg.tree.max_depth);
  kv["tree_min_leaf"] = std::to_string(cfg.tree.min_leaf);
  kv["tree_seed"] = std::to_string(cfg.tree.seed);
  kv["zscore"] = cfg.zscore ? "true" : "false";
  kv["l2"] = cfg.l2 ? "true" : "false";
  kv["model"] = pipeline::to_string(cfg.model);
  kv["C_grid"] = join_numbers(cfg.C_grid);
  std::vector<std::string> g;
  for (const auto& x : cfg.gamma_grid) g.push_back(x.to_string());
  kv["gamma_grid"] = csv::join(g);
  kv["alpha_grid"] = join_numbers(cfg.alpha_grid);
  if (cfg.fixed_params) {
    kv["C"] = csv::format_real(cfg.fixed_params->C);
    kv["C_weighted"] = csv::format_real(cfg.fixed_params->C_weighted);
    kv["gamma"] = cfg.fixed_params->gamma.to_string();
    kv["alpha"] = csv::format_real(cfg.fixed_params->alpha);
  }
  kv["fusion"] = pipeline::to_string(cfg.fusion);
  kv["fallback"] = cfg.fallback_modality;
  kv["seed"] = std::to_string(cfg.seed);
  kv["dirichlet_draws"] = std::to_string(cfg.dirichlet_draws);
  kv["folds"] = std::to_string(cfg.folds);
  kv["stratified"] = cfg.stratified ? "true" : "false";
  kv["classes"] = csv::join(cfg.classes.names());
  return kv;
}

std::string to_text(const pipeline::PipelineConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : describe(cfg)) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace bdfusion::config
