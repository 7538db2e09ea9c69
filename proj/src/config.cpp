#include "powalloc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "powalloc/errors.hpp"

namespace powalloc {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kCe: return "ce";
    case Algorithm::kCce: return "cce";
    case Algorithm::kPareto: return "pareto";
    case Algorithm::kNb: return "nb";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ce") return Algorithm::kCe;
  if (name == "cce") return Algorithm::kCce;
  if (name == "pareto") return Algorithm::kPareto;
  if (name == "nb") return Algorithm::kNb;
  throw ConfigError("algorithm: unknown name '" + name + "' (expected ce|cce|pareto|nb)");
}

double snr_db_to_budget(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

std::vector<double> number_list(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected a nonempty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(field + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

GainAlphabet parse_alphabet(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"values", "pmf"}, where);
  if (!j.contains("values")) throw ConfigError(where + ": missing 'values'");
  GainAlphabet a;
  a.values = number_list(j.at("values"), where + ".values");
  if (j.contains("pmf")) {
    a.pmf = number_list(j.at("pmf"), where + ".pmf");
    if (a.pmf.size() != a.values.size()) {
      throw ConfigError(where + ": pmf length must match values");
    }
  } else {
    a.pmf.assign(a.values.size(), 1.0 / static_cast<double>(a.values.size()));
  }
  return a;
}

FadingModel parse_model(const json& j) {
  reject_unknown_keys(j, {"users", "direct", "cross"}, "model");
  if (!j.contains("users")) throw ConfigError("model: missing 'users'");
  const int n = j.at("users").get<int>();
  if (n < 1) throw ConfigError("model.users: must be >= 1");

  FadingModel m;
  m.n_users = n;
  if (!j.contains("direct")) throw ConfigError("model: missing 'direct'");
  const json& dj = j.at("direct");
  if (dj.is_array()) {
    if (static_cast<int>(dj.size()) != n) {
      throw ConfigError("model.direct: expected one alphabet per user");
    }
    for (int i = 0; i < n; ++i) {
      m.direct.push_back(parse_alphabet(dj.at(static_cast<std::size_t>(i)),
                                        "model.direct[" + std::to_string(i) + "]"));
    }
  } else {
    m.direct.assign(static_cast<std::size_t>(n), parse_alphabet(dj, "model.direct"));
  }

  m.cross.assign(static_cast<std::size_t>(n) * n, GainAlphabet{});
  if (n > 1) {
    if (!j.contains("cross")) throw ConfigError("model: missing 'cross'");
    const json& cj = j.at("cross");
    reject_unknown_keys(cj, {"values", "pmf", "pmf_per_receiver", "pairs"}, "model.cross");
    if (!cj.contains("values") && !cj.contains("pairs")) {
      throw ConfigError("model.cross: missing 'values'");
    }
    if (cj.contains("values")) {
      std::vector<double> values = number_list(cj.at("values"), "model.cross.values");
      std::vector<std::vector<double>> pmfs;
      if (cj.contains("pmf_per_receiver")) {
        const json& pj = cj.at("pmf_per_receiver");
        if (!pj.is_array() || static_cast<int>(pj.size()) != n) {
          throw ConfigError("model.cross.pmf_per_receiver: expected one pmf per receiver");
        }
        for (int i = 0; i < n; ++i) {
          pmfs.push_back(number_list(pj.at(static_cast<std::size_t>(i)),
                                     "model.cross.pmf_per_receiver[" + std::to_string(i) + "]"));
        }
      } else if (cj.contains("pmf")) {
        pmfs.assign(static_cast<std::size_t>(n),
                    number_list(cj.at("pmf"), "model.cross.pmf"));
      } else {
        pmfs.assign(static_cast<std::size_t>(n),
                    std::vector<double>(values.size(), 1.0 / static_cast<double>(values.size())));
      }
      for (int i = 0; i < n; ++i) {
        GainAlphabet a;
        a.values = values;
        a.pmf = pmfs[static_cast<std::size_t>(i)];
        if (a.pmf.size() != a.values.size()) {
          throw ConfigError("model.cross: pmf length must match values");
        }
        for (int t = 0; t < n; ++t) {
          if (t != i) m.cross_pair(i, t) = a;
        }
      }
    }
    if (cj.contains("pairs")) {
      for (const json& pj : cj.at("pairs")) {
        reject_unknown_keys(pj, {"rx", "tx", "values", "pmf"}, "model.cross.pairs[]");
        if (!pj.contains("rx") || !pj.contains("tx")) {
          throw ConfigError("model.cross.pairs[]: missing rx/tx");
        }
        const int rx = pj.at("rx").get<int>();
        const int tx = pj.at("tx").get<int>();
        if (rx < 0 || rx >= n || tx < 0 || tx >= n || rx == tx) {
          throw ConfigError("model.cross.pairs[]: rx/tx out of range");
        }
        m.cross_pair(rx, tx) = parse_alphabet(pj, "model.cross.pairs[]");
      }
    }
  }
  return m;
}

AlgorithmParams parse_params(const json& j) {
  AlgorithmParams p;
  reject_unknown_keys(
      j,
      {"mu", "mw_epsilon", "window", "delta", "explore_epsilon", "max_experiments", "t_d",
       "round_cap", "alphas", "checkpoint_every", "snapshot_every", "renorm_every",
       "visit_normalized_utility", "paired_reestimate", "strict_experiment_budget",
       "track_actual_regret", "verify_epsilon"},
      "params");
  if (j.contains("mu") && !j.at("mu").is_null()) p.mu = j.at("mu").get<double>();
  if (j.contains("mw_epsilon")) p.mw_epsilon = j.at("mw_epsilon").get<double>();
  if (j.contains("window")) p.window = j.at("window").get<std::uint64_t>();
  if (j.contains("delta")) p.delta = j.at("delta").get<double>();
  if (j.contains("explore_epsilon")) p.explore_eps = j.at("explore_epsilon").get<double>();
  if (j.contains("max_experiments")) p.max_experiments = j.at("max_experiments").get<int>();
  if (j.contains("t_d")) p.t_disagreement = j.at("t_d").get<std::uint64_t>();
  if (j.contains("round_cap")) p.round_cap = j.at("round_cap").get<std::uint64_t>();
  if (j.contains("alphas") && !j.at("alphas").is_null()) {
    p.alphas = number_list(j.at("alphas"), "params.alphas");
  }
  if (j.contains("checkpoint_every")) p.checkpoint_every = j.at("checkpoint_every").get<std::uint64_t>();
  if (j.contains("snapshot_every")) p.snapshot_every = j.at("snapshot_every").get<std::uint64_t>();
  if (j.contains("renorm_every")) p.renorm_every = j.at("renorm_every").get<std::uint64_t>();
  if (j.contains("visit_normalized_utility")) {
    p.visit_normalized_utility = j.at("visit_normalized_utility").get<bool>();
  }
  if (j.contains("paired_reestimate")) p.paired_reestimate = j.at("paired_reestimate").get<bool>();
  if (j.contains("strict_experiment_budget")) {
    p.strict_experiment_budget = j.at("strict_experiment_budget").get<bool>();
  }
  if (j.contains("track_actual_regret")) {
    p.track_actual_regret = j.at("track_actual_regret").get<bool>();
  }
  if (j.contains("verify_epsilon")) p.verify_epsilon = j.at("verify_epsilon").get<double>();

  if (p.mw_epsilon <= 0.0 || p.mw_epsilon >= 1.0) {
    throw ConfigError("params.mw_epsilon: must lie in (0,1)");
  }
  if (p.delta <= 0.0 || p.delta > 1.0) throw ConfigError("params.delta: must lie in (0,1]");
  if (p.explore_eps < 0.0 || p.explore_eps > 1.0) {
    throw ConfigError("params.explore_epsilon: must lie in [0,1]");
  }
  if (p.max_experiments < 1) throw ConfigError("params.max_experiments: must be >= 1");
  if (p.window < 1) throw ConfigError("params.window: must be >= 1");
  if (p.mu && *p.mu <= 0.0) throw ConfigError("params.mu: must be positive");
  if (p.verify_epsilon <= 0.0) throw ConfigError("params.verify_epsilon: must be positive");
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ...".
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
  reject_unknown_keys(root,
                      {"name", "model", "power_levels", "rate", "rates", "rate_set", "snr_db",
                       "algorithm", "algorithms", "iterations", "seeds", "out_dir", "verify",
                       "params"},
                      "config");

  ExperimentConfig cfg;
  if (root.contains("name")) cfg.name = root.at("name").get<std::string>();
  if (!root.contains("model")) throw ConfigError("config: missing 'model'");
  cfg.model = parse_model(root.at("model"));
  validate_model(cfg.model);
  const int n = cfg.model.n_users;

  if (!root.contains("power_levels")) throw ConfigError("config: missing 'power_levels'");
  cfg.power_levels = number_list(root.at("power_levels"), "power_levels");
  for (double p : cfg.power_levels) {
    if (p < 0.0) throw ConfigError("power_levels: must be nonnegative");
  }

  if (root.contains("rate") && root.contains("rates")) {
    throw ConfigError("config: give either 'rate' or 'rates', not both");
  }
  if (root.contains("rate")) {
    cfg.rates.assign(static_cast<std::size_t>(n), root.at("rate").get<double>());
  } else if (root.contains("rates")) {
    cfg.rates = number_list(root.at("rates"), "rates");
    if (static_cast<int>(cfg.rates.size()) != n) {
      throw ConfigError("rates: expected one rate per user");
    }
  }
  if (root.contains("rate_set")) {
    cfg.rate_set = number_list(root.at("rate_set"), "rate_set");
    for (double r : cfg.rate_set) {
      if (r <= 0.0) throw ConfigError("rate_set: rates must be positive");
    }
  }
  if (cfg.rates.empty() && cfg.rate_set.empty()) {
    throw ConfigError("config: missing 'rate', 'rates' or 'rate_set'");
  }
  for (double r : cfg.rates) {
    if (r <= 0.0) throw ConfigError("rates: must be positive");
  }

  if (!root.contains("snr_db")) throw ConfigError("config: missing 'snr_db'");
  cfg.snr_db = number_list(root.at("snr_db"), "snr_db");

  if (root.contains("algorithm") && root.contains("algorithms")) {
    throw ConfigError("config: give either 'algorithm' or 'algorithms', not both");
  }
  if (root.contains("algorithm")) {
    cfg.algorithms.push_back(algorithm_from_name(root.at("algorithm").get<std::string>()));
  } else if (root.contains("algorithms")) {
    for (const auto& a : root.at("algorithms")) {
      cfg.algorithms.push_back(algorithm_from_name(a.get<std::string>()));
    }
  }
  if (cfg.algorithms.empty()) throw ConfigError("config: missing 'algorithm' or 'algorithms'");

  if (root.contains("iterations")) cfg.iterations = root.at("iterations").get<std::uint64_t>();
  if (cfg.iterations < 1) throw ConfigError("iterations: must be >= 1");

  if (root.contains("seeds")) {
    if (!root.at("seeds").is_array() || root.at("seeds").empty()) {
      throw ConfigError("seeds: expected a nonempty array");
    }
    for (const auto& s : root.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
  } else {
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  }

  if (root.contains("out_dir")) cfg.out_dir = root.at("out_dir").get<std::string>();
  if (root.contains("verify")) cfg.verify = root.at("verify").get<bool>();
  if (root.contains("params")) cfg.params = parse_params(root.at("params"));

  if (cfg.params.alphas && static_cast<int>(cfg.params.alphas->size()) != n) {
    throw ConfigError("params.alphas: expected one weight per user");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace powalloc
