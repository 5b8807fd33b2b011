#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "deepens/activation.hpp"
#include "deepens/deep_tree.hpp"
#include "deepens/ensemble.hpp"
#include "deepens/error.hpp"
#include "deepens/experiment.hpp"
#include "deepens/report.hpp"
#include "deepens/shallow.hpp"

namespace deepens {

inline constexpr std::size_t kMaxShallowSweepDimension = 14;

namespace detail {

inline void emit_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) out << text;
  else write_text_file(out_path, text);
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline nlohmann::ordered_json activation_json(const ActivationSpec& a) {
  return {{"kind", to_string(a.kind)}, {"bias_offset", a.bias_offset}};
}

}  // namespace detail

/// Entry point of the `deepens` tool. Returns 0 on success, 1 on domain/IO errors, 2 on
/// usage errors. Machine-readable output goes to `out` or to the `--out` path.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using ojson = nlohmann::ordered_json;
  CLI::App app{"Constructive deep-ensemble approximation and ensemble experiments", "deepens"};
  app.require_subcommand(1);
  std::string out_path;

  // approx
  auto* approx = app.add_subcommand("approx", "Build a monomial network and sweep its cube error over lambda");
  std::size_t approx_d = 3;
  std::string approx_topology = "shallow";
  std::vector<double> approx_lambdas{0.2, 0.1, 0.05, 0.025};
  std::string approx_kind = "shifted-logistic";
  double approx_bias = 1.0;
  approx->add_option("--d", approx_d, "Monomial degree / input dimension")->required();
  approx->add_option("--topology", approx_topology, "shallow | balanced | chain")
      ->check(CLI::IsMember({"shallow", "balanced", "chain"}));
  approx->add_option("--lambda", approx_lambdas, "Input scale(s) to evaluate")->expected(1, -1);
  approx->add_option("--kind", approx_kind, "Activation kind");
  approx->add_option("--bias", approx_bias, "Activation bias offset (expansion point)");
  approx->add_option("--out", out_path, "Write output to this path");

  // counts
  auto* counts = app.add_subcommand("counts", "Shallow vs deep unit counts");
  std::vector<std::size_t> count_dims{2, 3, 4, 5, 6, 7, 8, 9, 10};
  counts->add_option("--d", count_dims, "Dimension(s)")->expected(1, -1);
  counts->add_option("--out", out_path, "Write output to this path");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Exact majority-error tail, Hoeffding bound, optional simulation");
  std::size_t bounds_n = 0;
  double bounds_eps = 0.0;
  std::optional<std::uint64_t> bounds_trials;
  std::uint64_t bounds_seed = 0;
  bounds->add_option("--n", bounds_n, "Number of independent unit models")->required();
  bounds->add_option("--eps", bounds_eps, "Per-model error rate")->required();
  bounds->add_option("--trials", bounds_trials, "Monte Carlo trials (omit to skip simulation)");
  bounds->add_option("--seed", bounds_seed, "Simulation seed");
  bounds->add_option("--out", out_path, "Write output to this path");

  // probe
  auto* probe = app.add_subcommand("probe", "Pointwise limit of sigma(lambda (w.x + w0) + phi)");
  std::string probe_kind = "logistic";
  double probe_bias = 0.0, probe_w0 = 0.0, probe_phi = 0.0;
  std::vector<double> probe_w, probe_x, probe_lambdas{1.0, 10.0, 100.0};
  probe->add_option("--kind", probe_kind, "Activation kind");
  probe->add_option("--bias", probe_bias, "Activation bias offset");
  probe->add_option("--w", probe_w, "Weight vector")->required()->expected(1, -1);
  probe->add_option("--w0", probe_w0, "Affine offset");
  probe->add_option("--phi", probe_phi, "Phase added after scaling");
  probe->add_option("--x", probe_x, "Evaluation point")->required()->expected(1, -1);
  probe->add_option("--lambda", probe_lambdas, "Increasing lambda schedule")->expected(1, -1);
  probe->add_option("--out", out_path, "Write output to this path");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the multi-copy ensemble experiment from a config file");
  std::string config_path;
  std::optional<std::uint64_t> exp_seed;
  std::string exp_format;
  bool timings = false;
  experiment->add_option("--config", config_path, "Config file (key = value lines)")->required();
  experiment->add_option("--seed", exp_seed, "Override the config seed");
  experiment->add_option("--format", exp_format, "json | csv (overrides config)")
      ->check(CLI::IsMember({"json", "csv"}));
  experiment->add_option("--out", out_path, "Write report to this path (overrides config)");
  experiment->add_flag("--timings", timings, "Include wall-clock durations in JSON reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*approx) {
      const ActivationSpec act{parse_activation_kind(approx_kind), approx_bias, 1.0};
      const bool shallow = approx_topology == "shallow";
      if (shallow && approx_d > kMaxShallowSweepDimension) {
        throw SizeError("approx: shallow cube sweep is capped at d=" + std::to_string(kMaxShallowSweepDimension));
      }
      ojson j = ojson::object();
      j["d"] = approx_d;
      j["topology"] = approx_topology;
      j["activation"] = detail::activation_json(act);
      ojson sweep = ojson::array();
      for (std::size_t i = 0; i < approx_lambdas.size(); ++i) {
        const double lambda = approx_lambdas[i];
        if (shallow) {
          const auto net = build_monomial_network(approx_d, act, lambda);
          if (i == 0) {
            j["units"] = net.unit_count();
            j["ensemble_layers"] = 1;
            j["layers_including_leaves"] = 2;
          }
          sweep.push_back({{"lambda", lambda}, {"sup_cube_error", sup_cube_error_vs_monomial(net)}});
        } else {
          const auto net = build_deep_monomial_network(approx_d, parse_topology(approx_topology), act, lambda);
          if (i == 0) {
            j["units"] = net.total_units;
            j["internal_nodes"] = net.internal_node_count();
            j["ensemble_layers"] = net.ensemble_layers;
            j["layers_including_leaves"] = net.layers_including_leaves();
          }
          sweep.push_back({{"lambda", lambda}, {"sup_cube_error", sup_cube_error_vs_monomial(net)}});
        }
      }
      j["sweep"] = std::move(sweep);
      detail::emit_output(detail::json_text(j), out_path, out);
    } else if (*counts) {
      ojson rows = ojson::array();
      for (const auto& r : unit_count_comparison(count_dims)) {
        rows.push_back({{"d", r.d},
                        {"shallow_units", r.shallow_units},
                        {"deep_units", r.deep_units},
                        {"shallow_layers", r.shallow_layers},
                        {"deep_layers_balanced", r.deep_layers_balanced},
                        {"deep_layers_including_leaves", r.deep_layers_including_leaves}});
      }
      detail::emit_output(detail::json_text({{"rows", rows}}), out_path, out);
    } else if (*bounds) {
      const auto r = error_bound_report(bounds_n, bounds_eps, bounds_trials, bounds_seed);
      ojson j = {{"n", r.n}, {"epsilon", r.epsilon}, {"exact_tail", r.exact_tail}, {"hoeffding", r.hoeffding}};
      if (r.monte_carlo) {
        j["monte_carlo"] = {{"estimate", r.monte_carlo->estimate},
                            {"trials", r.monte_carlo->trials},
                            {"errors", r.monte_carlo->errors},
                            {"std_error", r.monte_carlo->std_error},
                            {"seed", bounds_seed}};
      }
      detail::emit_output(detail::json_text(j), out_path, out);
    } else if (*probe) {
      const ActivationSpec act{parse_activation_kind(probe_kind), probe_bias, 1.0};
      const auto p = discriminatory_limit_probe(act, FeatureVector(probe_w), probe_w0, probe_phi,
                                                probe_lambdas, FeatureVector(probe_x));
      ojson trace = ojson::array();
      for (const auto& [lambda, value] : p.trace) trace.push_back({{"lambda", lambda}, {"value", value}});
      ojson j = {{"activation", detail::activation_json(act)},
                 {"affine", p.affine},
                 {"case", to_string(p.limit_case)},
                 {"limit", p.limit},
                 {"trace", trace}};
      detail::emit_output(detail::json_text(j), out_path, out);
    } else if (*experiment) {
      auto cfg = load_config(config_path);
      if (exp_seed) {
        cfg.seed = *exp_seed;
        cfg.seed_set = true;
      }
      if (!exp_format.empty()) cfg.format = parse_report_format(exp_format);
      if (!out_path.empty()) cfg.output = out_path;
      const auto report = run_experiment(cfg);
      detail::emit_output(serialize_report(report, cfg.format, timings), cfg.output, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace deepens
