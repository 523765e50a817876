// mixent: mixed-pair entropy toolkit command line.
//
// Exit codes: 0 success; 1 a computation ran but its claim failed (failed
// certificate, rejected bijection, identity out of tolerance); 2 input error.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"
#include "mixent/estimators.hpp"
#include "mixent/io.hpp"
#include "mixent/processes.hpp"
#include "mixent/transform.hpp"
#include "mixent/version.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitClaimFailed = 1;
constexpr int kExitInputError = 2;

std::string format_double(double v, int significant) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", significant, v);
  return buffer;
}

void print_human(const ordered_json& node, const std::string& prefix) {
  for (const auto& [key, value] : node.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      print_human(value, name);
    } else if (value.is_array()) {
      std::string row;
      for (const auto& item : value) {
        if (!row.empty()) row += ", ";
        row += item.is_number() ? format_double(item.get<double>(), 9) : item.dump();
      }
      std::printf("%s: [%s]\n", name.c_str(), row.c_str());
    } else if (value.is_number_float()) {
      std::printf("%s: %s\n", name.c_str(), format_double(value.get<double>(), 9).c_str());
    } else {
      std::printf("%s: %s\n", name.c_str(), value.dump().c_str());
    }
  }
}

void print_csv(const ordered_json& node, const std::string& prefix) {
  for (const auto& [key, value] : node.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      print_csv(value, name);
    } else if (value.is_array()) {
      std::size_t i = 0;
      for (const auto& item : value) {
        const std::string cell =
            item.is_number() ? format_double(item.get<double>(), 17) : item.dump();
        std::printf("%s[%zu],%s\n", name.c_str(), i++, cell.c_str());
      }
    } else if (value.is_number_float()) {
      std::printf("%s,%s\n", name.c_str(), format_double(value.get<double>(), 17).c_str());
    } else {
      std::printf("%s,%s\n", name.c_str(), value.dump().c_str());
    }
  }
}

void emit(const std::string& command, const ordered_json& inputs,
          const ordered_json& results, const ordered_json& diagnostics,
          const std::string& format) {
  ordered_json doc;
  doc["command"] = command;
  doc["inputs"] = inputs;
  doc["results"] = results;
  doc["diagnostics"] = diagnostics;
  if (format == "structured") {
    std::printf("%s\n", doc.dump(2).c_str());
  } else if (format == "csv") {
    print_csv(doc, "");
  } else {
    print_human(doc, "");
  }
}

ordered_json label_json(const mixent::Label& label) {
  if (std::holds_alternative<std::int64_t>(label)) {
    return ordered_json(std::get<std::int64_t>(label));
  }
  return ordered_json(std::get<std::string>(label));
}

struct SeedOption {
  std::uint64_t value = 0;
  bool given = false;
};

void require_seed(const SeedOption& seed, const char* command) {
  if (!seed.given) {
    throw mixent::InvalidArgumentError(std::string(command) +
                                       " is stochastic: --seed is required");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixent: entropy for mixed discrete-continuous distributions"};
  app.set_version_flag("--version", std::string("mixent ") + mixent::kVersion);
  app.require_subcommand(1);

  std::string format = "human";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"human", "csv", "structured"}))
      ->capture_default_str();

  SeedOption seed;
  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&seed](const std::uint64_t& v) {
          seed.value = v;
          seed.given = true;
        },
        "64-bit seed for stochastic commands");
  };

  // entropy
  auto* entropy_cmd = app.add_subcommand("entropy", "entropy of a distribution spec");
  std::string entropy_spec;
  std::size_t mc_samples = 0;
  double eps = 1.0, delta = 1.0;
  bool allow_uncertified = false;
  entropy_cmd->add_option("--spec", entropy_spec, "distribution spec file")->required();
  entropy_cmd->add_option("--mc", mc_samples, "Monte Carlo sample count (0 = quadrature)");
  entropy_cmd->add_option("--epsilon", eps, "goodness gate moment order");
  entropy_cmd->add_option("--delta", delta, "goodness gate power offset");
  entropy_cmd->add_flag("--allow-uncertified", allow_uncertified,
                        "evaluate even when the goodness certificate fails");
  add_seed(entropy_cmd);

  // check
  auto* check_cmd = app.add_subcommand("check", "goodness certificate for a distribution");
  std::string check_spec;
  double check_eps = 1.0, check_delta = 1.0;
  check_cmd->add_option("--spec", check_spec, "distribution spec file")->required();
  check_cmd->add_option("--epsilon", check_eps, "moment order");
  check_cmd->add_option("--delta", check_delta, "power offset");

  // transform
  auto* transform_cmd =
      app.add_subcommand("transform", "push a distribution through a bijection");
  std::string transform_dist, transform_map;
  std::size_t transform_grid = 10000;
  transform_cmd->add_option("--dist", transform_dist, "distribution spec file")->required();
  transform_cmd->add_option("--map", transform_map, "map spec file")->required();
  transform_cmd->add_option("--grid", transform_grid, "probe points per region");

  // ctmc-rate
  auto* rate_cmd = app.add_subcommand("ctmc-rate", "asymptotic entropy rate of a chain");
  std::string rate_chain;
  rate_cmd->add_option("--chain", rate_chain, "chain spec file")->required();

  // horizon
  auto* horizon_cmd =
      app.add_subcommand("horizon", "finite-horizon path entropy on (0, T]");
  std::string horizon_chain;
  double horizon_lambda = 0.0, horizon_t = 0.0;
  horizon_cmd->add_option("--chain", horizon_chain, "chain spec file");
  horizon_cmd->add_option("--lambda", horizon_lambda, "pure Poisson rate (no chain)");
  horizon_cmd->add_option("--T", horizon_t, "horizon")->required();

  // split-identity
  auto* identity_cmd =
      app.add_subcommand("split-identity", "splitting identity line by line");
  double id_lambda = 1.0, id_p = 0.5, id_tol = 1e-12;
  identity_cmd->add_option("--lambda", id_lambda, "parent rate")->required();
  identity_cmd->add_option("--p", id_p, "coin bias")->required();
  identity_cmd->add_option("--tol", id_tol, "max discrepancy tolerance");

  // split-experiment
  auto* experiment_cmd =
      app.add_subcommand("split-experiment", "empirical splitting check");
  double ex_lambda = 1.0, ex_p = 0.5, ex_t = 1e5;
  std::size_t ex_trials = 1;
  std::string ex_export;
  experiment_cmd->add_option("--lambda", ex_lambda, "parent rate")->required();
  experiment_cmd->add_option("--p", ex_p, "coin bias")->required();
  experiment_cmd->add_option("--T", ex_t, "horizon")->required();
  experiment_cmd->add_option("--trials", ex_trials, "independent trials");
  experiment_cmd->add_option("--export", ex_export,
                             "write <prefix>{parent,heads,tails}.csv for trial 0");
  add_seed(experiment_cmd);

  // order-stats
  auto* order_cmd =
      app.add_subcommand("order-stats", "entropy of sorted i.i.d. samples");
  std::string order_spec;
  int order_n = 2;
  std::size_t order_samples = 1000000;
  std::string order_method = "auto";
  double order_tol = 1e-4;
  order_cmd->add_option("--spec", order_spec,
                        "single-atom distribution spec carrying the density")
      ->required();
  order_cmd->add_option("--n", order_n, "number of i.i.d. draws")->required();
  order_cmd->add_option("--samples", order_samples, "Monte Carlo draws");
  order_cmd->add_option("--method", order_method, "auto|quadrature|monte-carlo")
      ->check(CLI::IsMember({"auto", "quadrature", "monte-carlo"}));
  order_cmd->add_option("--tol", order_tol, "quadrature tolerance on the difference");
  add_seed(order_cmd);

  // estimate
  auto* estimate_cmd =
      app.add_subcommand("estimate", "sample-based entropy estimation");
  std::string estimate_samples;
  int estimate_k = 3;
  bool estimate_discrete = false;
  estimate_cmd->add_option("--samples", estimate_samples, "CSV, one value per line")
      ->required();
  estimate_cmd->add_option("--k", estimate_k, "nearest-neighbor order");
  estimate_cmd->add_flag("--discrete", estimate_discrete,
                         "plug-in estimator over discrete labels");
  add_seed(estimate_cmd);

  // Top-level options (--format) may follow the subcommand name.
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*entropy_cmd) {
      const auto dist = mixent::io::load_distribution(entropy_spec);
      ordered_json inputs{{"spec", entropy_spec}, {"epsilon", eps}, {"delta", delta}};
      ordered_json diagnostics{{"version", mixent::kVersion}};
      ordered_json results;
      if (mc_samples > 0) {
        require_seed(seed, "entropy --mc");
        mixent::RandomStream rng(seed.value);
        const auto r = mixent::mc_entropy(dist, mc_samples, rng);
        results["value"] = r.value;
        results["method"] = "monte-carlo";
        results["standard_error"] = r.error_estimate;
        diagnostics["seed"] = seed.value;
        diagnostics["trials"] = mc_samples;
      } else {
        mixent::MixedEntropyOptions options;
        options.epsilon = eps;
        options.delta = delta;
        options.allow_uncertified = allow_uncertified;
        const auto r = mixent::mixed_entropy(dist, options);
        results["value"] = r.value;
        results["method"] = "quadrature";
        results["error_estimate"] = r.error_estimate;
        results["certified"] = r.certified;
        ordered_json terms = ordered_json::array();
        for (std::size_t i = 0; i < r.terms.size(); ++i) {
          terms.push_back({{"label", label_json(dist.atom(i).label)},
                           {"term", r.terms[i]}});
        }
        results["terms"] = std::move(terms);
        if (!r.certified) {
          diagnostics["note"] = "goodness certificate failed; value reported uncertified";
        }
      }
      emit("entropy", inputs, results, diagnostics, format);
      return kExitOk;
    }

    if (*check_cmd) {
      const auto dist = mixent::io::load_distribution(check_spec);
      const auto report = mixent::goodness_check(dist, check_eps, check_delta);
      ordered_json results{{"epsilon", report.epsilon},
                           {"delta", report.delta},
                           {"M_epsilon", report.M_epsilon},
                           {"power_integral", report.power_integral},
                           {"discrete_entropy", report.discrete_entropy},
                           {"B_delta", report.B_delta},
                           {"C_epsilon", report.C_epsilon},
                           {"magnitude_bound", report.magnitude_bound},
                           {"passed", report.passed}};
      ordered_json diagnostics{{"version", mixent::kVersion}};
      if (!report.passed) {
        // The conditions are sufficient, not necessary: a failed report means
        // "not certified", not "not good".
        diagnostics["note"] =
            "not certified: a sufficient condition failed (" + report.failure +
            "); this does not prove the pair is not good";
      }
      emit("check", ordered_json{{"spec", check_spec}}, results, diagnostics, format);
      return report.passed ? kExitOk : kExitClaimFailed;
    }

    if (*transform_cmd) {
      const auto dist = mixent::io::load_distribution(transform_dist);
      const auto map = mixent::io::load_map(transform_map);
      ordered_json inputs{{"dist", transform_dist}, {"map", transform_map}};
      ordered_json diagnostics{{"version", mixent::kVersion},
                               {"grid_points_per_region", transform_grid}};
      try {
        const auto report = mixent::preservation_report(dist, map, transform_grid);
        ordered_json results{
            {"H_in", report.entropy_in},
            {"H_out", report.entropy_out},
            {"difference", report.difference},
            {"certified", report.certified},
            {"worst_derivative_deviation", report.derivative.worst_deviation},
            {"worst_roundtrip", report.bijectivity.worst_roundtrip}};
        emit("transform", inputs, results, diagnostics, format);
        return report.certified ? kExitOk : kExitClaimFailed;
      } catch (const mixent::NonInvertibleError& e) {
        ordered_json results{{"rejected", true}, {"reason", e.what()}};
        emit("transform", inputs, results, diagnostics, format);
        return kExitClaimFailed;
      }
    }

    if (*rate_cmd) {
      const auto spec = mixent::io::load_chain(rate_chain);
      const Eigen::VectorXd pi = mixent::stationary_distribution(spec.P);
      const double h_mc = mixent::markov_transition_entropy(spec.P, pi);
      ordered_json stationary = ordered_json::array();
      for (Eigen::Index i = 0; i < pi.size(); ++i) stationary.push_back(pi[i]);
      ordered_json results{{"entropy_rate", mixent::ctmc_entropy_rate(spec)},
                           {"lambda", spec.lambda},
                           {"poisson_rate_term", mixent::poisson_entropy_rate(spec.lambda)},
                           {"H_MC", h_mc},
                           {"stationary", std::move(stationary)}};
      emit("ctmc-rate", ordered_json{{"chain", rate_chain}}, results,
           ordered_json{{"version", mixent::kVersion}}, format);
      return kExitOk;
    }

    if (*horizon_cmd) {
      ordered_json inputs{{"T", horizon_t}};
      double value = 0.0;
      double rate = 0.0;
      if (!horizon_chain.empty()) {
        const auto spec = mixent::io::load_chain(horizon_chain);
        value = mixent::finite_horizon_ctmc_entropy(spec, horizon_t);
        rate = mixent::ctmc_entropy_rate(spec);
        inputs["chain"] = horizon_chain;
      } else if (horizon_lambda > 0.0) {
        value = mixent::finite_horizon_poisson_entropy(horizon_lambda, horizon_t);
        rate = mixent::poisson_entropy_rate(horizon_lambda);
        inputs["lambda"] = horizon_lambda;
      } else {
        throw mixent::InvalidArgumentError("horizon needs --chain or --lambda");
      }
      ordered_json results{{"entropy", value},
                           {"entropy_per_unit_time", value / horizon_t},
                           {"asymptotic_rate", rate},
                           {"rate_gap", value / horizon_t - rate}};
      emit("horizon", inputs, results, ordered_json{{"version", mixent::kVersion}},
           format);
      return kExitOk;
    }

    if (*identity_cmd) {
      const auto id = mixent::splitting_identity(id_lambda, id_p);
      ordered_json results{
          {"lines", {id.lines[0], id.lines[1], id.lines[2], id.lines[3]}},
          {"max_discrepancy", id.max_discrepancy},
          {"tolerance", id_tol},
          {"passed", id.max_discrepancy <= id_tol}};
      emit("split-identity", ordered_json{{"lambda", id_lambda}, {"p", id_p}},
           results, ordered_json{{"version", mixent::kVersion}}, format);
      return id.max_discrepancy <= id_tol ? kExitOk : kExitClaimFailed;
    }

    if (*experiment_cmd) {
      require_seed(seed, "split-experiment");
      const auto report = mixent::split_entropy_experiment(ex_lambda, ex_p, ex_t,
                                                           ex_trials, seed.value);
      if (!ex_export.empty()) {
        // Re-derive trial 0 so the exported paths match the report exactly.
        mixent::RandomStream rng = mixent::RandomStream::derive(seed.value, 0);
        const mixent::SamplePath parent =
            mixent::simulate_poisson(ex_lambda, ex_t, rng);
        const mixent::SplitResult sr = mixent::split(parent, ex_p, rng);
        const std::pair<const char*, const mixent::SamplePath*> files[] = {
            {"parent.csv", &sr.parent},
            {"heads.csv", &sr.heads_path},
            {"tails.csv", &sr.tails_path}};
        for (const auto& [suffix, path] : files) {
          std::ofstream out(ex_export + suffix);
          if (!out) {
            throw mixent::InvalidArgumentError("cannot write " + ex_export + suffix);
          }
          mixent::io::write_path_csv(out, *path);
        }
      }
      auto baby_json = [](const mixent::BabyProcessEstimate& baby) {
        return ordered_json{{"events", baby.events},
                            {"rate_hat", baby.rate_hat},
                            {"interarrival_entropy", baby.interarrival_entropy},
                            {"entropy_rate", baby.entropy_rate},
                            {"standard_error", baby.standard_error},
                            {"expected", baby.expected},
                            {"within_tolerance", baby.within_tolerance},
                            {"exceeds_poisson_bound", baby.exceeds_poisson_bound}};
      };
      ordered_json results{{"heads", baby_json(report.heads)},
                           {"tails", baby_json(report.tails)},
                           {"passed", report.passed}};
      ordered_json diagnostics{{"version", mixent::kVersion},
                               {"seed", seed.value},
                               {"trials", ex_trials}};
      emit("split-experiment",
           ordered_json{{"lambda", ex_lambda}, {"p", ex_p}, {"T", ex_t}}, results,
           diagnostics, format);
      return report.passed ? kExitOk : kExitClaimFailed;
    }

    if (*order_cmd) {
      const auto dist = mixent::io::load_distribution(order_spec);
      if (dist.size() != 1) {
        throw mixent::InvalidArgumentError(
            "order-stats needs a single-atom spec carrying the density");
      }
      mixent::OrderStatisticsOptions options;
      options.samples = order_samples;
      if (order_method == "quadrature") {
        options.method = mixent::OrderStatisticsOptions::Method::Quadrature;
      } else if (order_method == "monte-carlo") {
        options.method = mixent::OrderStatisticsOptions::Method::MonteCarlo;
      }
      const bool stochastic =
          options.method == mixent::OrderStatisticsOptions::Method::MonteCarlo ||
          (options.method == mixent::OrderStatisticsOptions::Method::Auto && order_n > 4);
      if (stochastic) {
        require_seed(seed, "order-stats (Monte Carlo)");
        options.seed = seed.value;
      }
      const auto r = mixent::order_statistics_entropy(dist.conditional_density(0),
                                                      order_n, options);
      const double slack =
          r.monte_carlo ? 4.0 * r.standard_error : order_tol;
      const bool passed = std::abs(r.difference - r.expected_difference) <= slack;
      ordered_json results{{"h_iid", r.h_iid},
                           {"h_sorted", r.h_sorted},
                           {"difference", r.difference},
                           {"expected_difference", r.expected_difference},
                           {"standard_error", r.standard_error},
                           {"method", r.monte_carlo ? "monte-carlo" : "quadrature"},
                           {"passed", passed}};
      ordered_json diagnostics{{"version", mixent::kVersion}};
      if (stochastic) {
        diagnostics["seed"] = seed.value;
        diagnostics["trials"] = order_samples;
      }
      emit("order-stats", ordered_json{{"spec", order_spec}, {"n", order_n}},
           results, diagnostics, format);
      return passed ? kExitOk : kExitClaimFailed;
    }

    if (*estimate_cmd) {
      ordered_json inputs{{"samples", estimate_samples}};
      ordered_json results;
      ordered_json diagnostics{{"version", mixent::kVersion}};
      if (estimate_discrete) {
        const auto labels = mixent::io::load_labels_csv(estimate_samples);
        const auto r = mixent::plugin_discrete_entropy(labels);
        results = {{"value", r.value},
                   {"n", r.n},
                   {"standard_error", r.standard_error},
                   {"method", "plug-in"}};
      } else {
        require_seed(seed, "estimate");
        const auto samples = mixent::io::load_samples_csv(estimate_samples);
        mixent::NnOptions options;
        options.k = estimate_k;
        options.seed = seed.value;
        const auto r = mixent::nn_differential_entropy(samples, options);
        results = {{"value", r.value},
                   {"n", r.n},
                   {"standard_error", r.standard_error},
                   {"method", "nearest-neighbor"},
                   {"k", estimate_k}};
        diagnostics["seed"] = seed.value;
        diagnostics["trials"] = options.bootstrap;
        if (r.ties_jittered) {
          diagnostics["note"] = "tied samples separated by deterministic 1e-12-scale jitter";
        }
      }
      emit("estimate", inputs, results, diagnostics, format);
      return kExitOk;
    }
  } catch (const mixent::ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const mixent::InvalidArgumentError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const mixent::UncertifiedError& e) {
    // The computation was refused by a certificate, not by bad input.
    std::fprintf(stderr, "not certified: %s\n", e.what());
    return kExitClaimFailed;
  } catch (const mixent::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
