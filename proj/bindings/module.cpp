// Python bindings for the core operations: model building, action-set
// enumeration, the learning and search loops, and the exact oracles.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>

#include "powalloc/config.hpp"
#include "powalloc/cooperative_search.hpp"
#include "powalloc/experiment.hpp"
#include "powalloc/multiplicative_weights.hpp"
#include "powalloc/oracle.hpp"
#include "powalloc/regret_matching.hpp"

namespace py = pybind11;
using namespace powalloc;

namespace {

ActionProfile to_profile(const std::vector<int>& k) {
  ActionProfile p;
  p.k = k;
  return p;
}

SparseDistribution to_sparse(const std::map<std::vector<int>, double>& prob) {
  SparseDistribution d;
  d.prob = prob;
  return d;
}

py::dict check_to_dict(const EquilibriumCheck& c) {
  py::dict out;
  out["pass"] = c.pass;
  out["epsilon"] = c.epsilon;
  out["max_violation"] = c.max_violation;
  out["witness_user"] = c.witness_user;
  out["witness_action"] = c.witness_action;
  out["witness_deviation"] = c.witness_deviation;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "distributed learning for power allocation on fading interference channels";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InstanceTooLargeError>(m, "InstanceTooLargeError", PyExc_RuntimeError);

  py::class_<GainAlphabet>(m, "GainAlphabet")
      .def(py::init([](std::vector<double> values, std::optional<std::vector<double>> pmf) {
             GainAlphabet a;
             if (pmf) {
               a.values = std::move(values);
               a.pmf = std::move(*pmf);
             } else {
               a = uniform_alphabet(std::move(values));
             }
             return a;
           }),
           py::arg("values"), py::arg("pmf") = std::nullopt)
      .def_readonly("values", &GainAlphabet::values)
      .def_readonly("pmf", &GainAlphabet::pmf);

  py::class_<FadingModel>(m, "FadingModel")
      .def_readonly("n_users", &FadingModel::n_users)
      .def_property_readonly("direct", [](const FadingModel& m_) { return m_.direct; })
      .def("cross_pair",
           [](const FadingModel& m_, int rx, int tx) { return m_.cross_pair(rx, tx); });

  m.def("make_symmetric_model", &make_symmetric_model, py::arg("n_users"), py::arg("direct"),
        py::arg("cross"));
  m.def("make_model_with_cross_pmfs", &make_model_with_cross_pmfs, py::arg("n_users"),
        py::arg("direct"), py::arg("cross_values"), py::arg("cross_pmfs"));
  m.def("validate_model", [](const FadingModel& model) { return validate_model(model); });
  m.def("state_probability", &state_probability);
  m.def("cross_state_probability", &cross_state_probability);

  py::class_<PowerPolicy>(m, "PowerPolicy")
      .def_readonly("powers", &PowerPolicy::powers)
      .def_readonly("rate", &PowerPolicy::rate);

  py::class_<PolicySet>(m, "PolicySet")
      .def("__len__", &PolicySet::size)
      .def("__getitem__",
           [](const PolicySet& s, int k) {
             if (k < 0 || k >= s.size()) throw py::index_error();
             return s[k];
           })
      .def("threshold", &PolicySet::threshold, py::arg("action"), py::arg("state"))
      .def("rate", &PolicySet::rate)
      .def_property_readonly("multirate", &PolicySet::multirate)
      .def_property_readonly("user", &PolicySet::user);

  m.def(
      "enumerate_policies",
      [](const GainAlphabet& direct, std::vector<double> levels, double budget, double rate,
         int user) { return enumerate_policies(direct, levels, budget, rate, user); },
      py::arg("direct"), py::arg("levels"), py::arg("budget"), py::arg("rate"),
      py::arg("user") = 0);
  m.def(
      "enumerate_multirate",
      [](const GainAlphabet& direct, std::vector<double> levels, double budget,
         std::vector<double> rates, int user) {
        return enumerate_multirate(direct, levels, budget, rates, user);
      },
      py::arg("direct"), py::arg("levels"), py::arg("budget"), py::arg("rates"),
      py::arg("user") = 0);
  m.def("interference_threshold",
        py::overload_cast<double, double, double>(&interference_threshold), py::arg("power"),
        py::arg("gain"), py::arg("rate"));
  m.def("snr_db_to_budget", &snr_db_to_budget);

  m.def(
      "exact_utility",
      [](const FadingModel& model, const std::vector<PolicySet>& sets, std::vector<int> profile) {
        return exact_utility(model, sets, to_profile(profile));
      },
      py::arg("model"), py::arg("sets"), py::arg("profile"));

  m.def(
      "is_epsilon_ce",
      [](const std::map<std::vector<int>, double>& phi, const FadingModel& model,
         const std::vector<PolicySet>& sets, double eps) {
        return check_to_dict(is_epsilon_ce(to_sparse(phi), model, sets, eps));
      },
      py::arg("phi"), py::arg("model"), py::arg("sets"), py::arg("epsilon"));
  m.def(
      "is_epsilon_cce",
      [](const std::map<std::vector<int>, double>& phi, const FadingModel& model,
         const std::vector<PolicySet>& sets, double eps) {
        return check_to_dict(is_epsilon_cce(to_sparse(phi), model, sets, eps));
      },
      py::arg("phi"), py::arg("model"), py::arg("sets"), py::arg("epsilon"));

  m.def(
      "brute_force_pareto",
      [](const FadingModel& model, const std::vector<PolicySet>& sets,
         std::vector<double> alphas, bool rate_weighted) {
        ParetoOptimum p = brute_force_pareto(model, sets, alphas, rate_weighted);
        py::dict out;
        out["profile"] = p.profile.k;
        out["score"] = p.score;
        out["utilities"] = p.utilities;
        return out;
      },
      py::arg("model"), py::arg("sets"), py::arg("alphas"), py::arg("rate_weighted") = false);
  m.def(
      "brute_force_nb",
      [](const FadingModel& model, const std::vector<PolicySet>& sets, std::vector<double> d,
         std::vector<int> disagreement_profile) {
        NashOptimum p = brute_force_nb(model, sets, d, to_profile(disagreement_profile));
        py::dict out;
        out["profile"] = p.profile.k;
        out["product"] = p.product;
        out["utilities"] = p.utilities;
        return out;
      },
      py::arg("model"), py::arg("sets"), py::arg("disagreement"),
      py::arg("disagreement_profile"));

  m.def(
      "run_ce_learning",
      [](const FadingModel& model, const std::vector<PolicySet>& sets, std::uint64_t iterations,
         std::uint64_t seed, std::optional<double> mu, bool track_actual_regret) {
        CeOptions opt;
        opt.iterations = iterations;
        opt.track_actual_regret = track_actual_regret;
        if (mu) opt.mu.assign(sets.size(), *mu);
        RngPool rngs(seed, model.n_users);
        CeResult r = run_ce_learning(model, sets, opt, rngs);
        py::dict out;
        out["empirical"] = r.empirical.prob;
        out["final_max_regret"] = r.final_max_regret;
        out["final_max_actual_regret"] = r.final_max_actual_regret;
        std::vector<double> tail_rates(r.tail.ack_count.size());
        for (std::size_t i = 0; i < tail_rates.size(); ++i) {
          tail_rates[i] = r.tail.rate_weighted_ack[i] / static_cast<double>(r.tail.slots);
        }
        out["tail_rates"] = tail_rates;
        return out;
      },
      py::arg("model"), py::arg("sets"), py::arg("iterations"), py::arg("seed"),
      py::arg("mu") = std::nullopt, py::arg("track_actual_regret") = false);

  m.def(
      "run_cce_learning",
      [](const FadingModel& model, const std::vector<PolicySet>& sets, std::uint64_t iterations,
         std::uint64_t seed, double epsilon) {
        CceOptions opt;
        opt.iterations = iterations;
        opt.epsilon = epsilon;
        RngPool rngs(seed, model.n_users);
        CceResult r = run_cce_learning(model, sets, opt, rngs);
        py::dict out;
        out["mean_strategy"] = r.phi.mean_strategy;
        out["final_external_regret"] = r.final_external_regret;
        std::vector<double> tail_rates(r.tail.ack_count.size());
        for (std::size_t i = 0; i < tail_rates.size(); ++i) {
          tail_rates[i] = r.tail.rate_weighted_ack[i] / static_cast<double>(r.tail.slots);
        }
        out["tail_rates"] = tail_rates;
        return out;
      },
      py::arg("model"), py::arg("sets"), py::arg("iterations"), py::arg("seed"),
      py::arg("epsilon") = 0.1);

  auto search_to_dict = [](const SearchResult& r) {
    py::dict out;
    out["profile"] = r.benchmark.profile.k;
    out["score"] = r.benchmark.score;
    out["utilities"] = r.benchmark.utilities;
    out["disagreement"] = r.benchmark.disagreement;
    out["total_slots"] = r.total_slots;
    out["slots_to_final"] = r.slots_to_final;
    out["rounds"] = r.rounds;
    out["degenerate"] = r.degenerate;
    return out;
  };

  m.def(
      "run_pareto_search",
      [search_to_dict](const FadingModel& model, const std::vector<PolicySet>& sets,
                       std::vector<double> alphas, std::uint64_t seed, std::uint64_t window,
                       double delta, double explore_eps, int max_experiments,
                       std::uint64_t round_cap, bool rate_weighted) {
        SearchConfig sc;
        sc.alphas = std::move(alphas);
        sc.window = window;
        sc.delta = delta;
        sc.explore_eps = explore_eps;
        sc.max_experiments = max_experiments;
        sc.round_cap = round_cap;
        sc.rate_weighted = rate_weighted;
        RngPool rngs(seed, model.n_users);
        return search_to_dict(run_pareto_search(model, sets, sc, rngs));
      },
      py::arg("model"), py::arg("sets"), py::arg("alphas"), py::arg("seed"),
      py::arg("window") = 1000, py::arg("delta") = 0.5, py::arg("explore_eps") = 0.1,
      py::arg("max_experiments") = 50, py::arg("round_cap") = 10000,
      py::arg("rate_weighted") = false);

  m.def(
      "run_nash_bargaining",
      [search_to_dict](const FadingModel& model, const std::vector<PolicySet>& sets,
                       std::uint64_t seed, std::uint64_t window, double delta,
                       double explore_eps, int max_experiments, std::uint64_t round_cap,
                       std::uint64_t t_disagreement) {
        SearchConfig sc;
        sc.mode = SearchMode::kNashProduct;
        sc.window = window;
        sc.delta = delta;
        sc.explore_eps = explore_eps;
        sc.max_experiments = max_experiments;
        sc.round_cap = round_cap;
        sc.t_disagreement = t_disagreement;
        RngPool rngs(seed, model.n_users);
        return search_to_dict(run_nash_bargaining(model, sets, sc, rngs));
      },
      py::arg("model"), py::arg("sets"), py::arg("seed"), py::arg("window") = 1000,
      py::arg("delta") = 0.5, py::arg("explore_eps") = 0.1, py::arg("max_experiments") = 50,
      py::arg("round_cap") = 10000, py::arg("t_disagreement") = 5000);

  m.def(
      "disagreement_point",
      [](const FadingModel& model, const std::vector<PolicySet>& sets, std::uint64_t t_d,
         std::uint64_t seed) {
        RngPool rngs(seed, model.n_users);
        auto [d, profile] = disagreement_point(model, sets, t_d, rngs.env());
        py::dict out;
        out["d"] = d;
        out["profile"] = profile.k;
        return out;
      },
      py::arg("model"), py::arg("sets"), py::arg("t_d"), py::arg("seed"));

  m.def("load_config", &load_config, py::arg("path"));
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("name", &ExperimentConfig::name)
      .def_readonly("power_levels", &ExperimentConfig::power_levels)
      .def_readonly("rates", &ExperimentConfig::rates)
      .def_readonly("rate_set", &ExperimentConfig::rate_set)
      .def_readonly("snr_db", &ExperimentConfig::snr_db)
      .def_readonly("iterations", &ExperimentConfig::iterations)
      .def_readonly("seeds", &ExperimentConfig::seeds)
      .def_property_readonly("model", [](const ExperimentConfig& c) { return c.model; })
      .def_property_readonly("algorithms", [](const ExperimentConfig& c) {
        std::vector<std::string> names;
        for (Algorithm a : c.algorithms) names.push_back(algorithm_name(a));
        return names;
      });
}
