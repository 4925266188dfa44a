#include "matchstab/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "matchstab/analysis.hpp"
#include "matchstab/flow.hpp"
#include "matchstab/model_io.hpp"
#include "matchstab/simulate.hpp"
#include "matchstab/stationary.hpp"
#include "matchstab/sweep.hpp"
#include "matchstab/zchain.hpp"

namespace matchstab {
namespace {

Rational parse_grid(const std::string& text) {
  if (text.find('/') != std::string::npos) return Rational::parse(text);
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational::parse(text);
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  long long scale = 1;
  for (size_t i = dot + 1; i < text.size(); ++i) scale *= 10;
  return Rational::parse(digits) / Rational(scale);
}

CommutativeState parse_state(const MatchingStructure& g, const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos)
    throw Error(Errc::BadInput, "state must look like \"x1,x2,..;y1,y2,..\"");
  auto parse_counts = [](const std::string& part) {
    std::vector<int64_t> out;
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    return out;
  };
  CommutativeState st{parse_counts(text.substr(0, semi)),
                      parse_counts(text.substr(semi + 1))};
  require_valid_state(g, st);
  return st;
}

struct OutFile {
  std::ofstream file;
  std::ostream* stream = nullptr;

  OutFile(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream = &fallback;
    } else {
      file.open(path);
      if (!file) throw Error(Errc::BadInput, "cannot open '" + path + "' for writing");
      stream = &file;
    }
  }
};

std::string facet_trace_key(const MatchingStructure& g, uint64_t key) {
  Mask u = static_cast<Mask>(key >> 32);
  Mask v = static_cast<Mask>(key & 0xffffffffu);
  std::string out;
  bool first = true;
  for (int c = 0; c < g.customer_count(); ++c)
    if ((u >> c) & 1u) {
      if (!first) out += "+";
      out += g.customer_labels()[c];
      first = false;
    }
  out += "|";
  first = true;
  for (int s = 0; s < g.server_count(); ++s)
    if ((v >> s) & 1u) {
      if (!first) out += "+";
      out += g.server_labels()[s];
      first = false;
    }
  return out;
}

const ArrivalMeasure& require_measure(const Model& model) {
  if (!model.measure)
    throw Error(Errc::BadInput, "this command needs a model with a mu table");
  return *model.measure;
}

int cmd_facets(const std::string& path, std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  for (const Facet& f : enumerate_facets(g)) {
    out << g.customer_set_string(f.bullet_c) << " | "
        << g.server_set_string(f.bullet_s) << " | saturated:"
        << (is_saturated(f) ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_check(const std::string& path, bool with_scond, std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  const ArrivalMeasure& measure = require_measure(model);
  auto [mu_c, mu_s] = measure.marginals();
  auto ncond = check_ncond_certified(g, mu_c, mu_s);
  out << "NCond: " << (ncond.holds ? "yes" : "no") << "\n";
  if (!ncond.holds) {
    const auto& cert = *ncond.certificate;
    out << "violated: U=" << g.customer_set_string(cert.subset)
        << ": mu_C(U)=" << cert.lhs.to_string()
        << " >= mu_S(S(U))=" << cert.rhs.to_string() << "\n";
  }
  if (!with_scond) return ncond.holds ? 0 : 1;

  auto scond = check_scond(g, measure);
  out << "bullet_C,bullet_S,saturated,drift,scond_ok\n";
  for (const auto& report : scond.reports) {
    out << g.customer_set_string(report.facet.bullet_c) << ","
        << g.server_set_string(report.facet.bullet_s) << ","
        << (report.saturated ? "true" : "false") << ","
        << report.drift.to_string() << ","
        << (report.scond_ok ? "true" : "false") << "\n";
  }
  out << "SCond: " << (scond.holds ? "yes" : "no") << "\n";
  return scond.holds ? 0 : 1;
}

int cmd_structure(const std::string& path, std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  auto check = stable_structure_certified(g);
  out << "stable-structure: " << (check.stable ? "yes" : "no") << "\n";
  if (!check.stable) {
    const std::string& c = g.customer_labels()[check.witness_customer];
    const std::string& s = g.server_labels()[check.witness_server];
    if (check.customer_to_server)
      out << "no directed path from customer " << c << " to server " << s << "\n";
    else
      out << "no directed path from server " << s << " to customer " << c << "\n";
  }
  return check.stable ? 0 : 1;
}

int cmd_measure(const std::string& path, std::ostream& out) {
  Model model = load_model(path);
  try {
    Model result;
    result.structure = model.structure;
    result.measure = construct_stable_measure(model.structure);
    result.priorities = model.priorities;
    write_model(out, result);
    return 0;
  } catch (const Error& e) {
    if (e.code() != Errc::NotStronglyConnected) throw;
    out << "stable-structure: no\n";
    return 1;
  }
}

int cmd_simulate(const std::string& path, const std::string& policy_name_arg,
                 int64_t horizon, uint64_t seed, bool trace_csv,
                 const std::string& out_path, std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  const ArrivalMeasure& measure = require_measure(model);
  PolicyKind kind = parse_policy(policy_name_arg);
  PolicySpec policy =
      PolicySpec::make(kind, model.structure, &measure, model.priorities);

  OutFile sink(out_path, out);
  SimulationReport report;
  if (trace_csv) {
    *sink.stream << "step,buffer,facet\n";
    TraceSink trace = [&](int64_t step, int64_t buffer, uint64_t key) {
      *sink.stream << step << "," << buffer << "," << facet_trace_key(g, key)
                   << "\n";
    };
    report = simulate(g, measure, policy, horizon, seed, &trace);
  } else {
    report = simulate(g, measure, policy, horizon, seed);
  }

  char avg[64];
  std::snprintf(avg, sizeof(avg), "%.6f", report.avg_buffer);
  out << "policy=" << policy_name(kind) << " seed=" << seed
      << " horizon=" << horizon << " avg_buffer=" << avg
      << " max_buffer=" << report.max_buffer
      << " final_buffer=" << report.final_buffer
      << " empty_visits=" << report.empty_visits;
  if (report.nn_ms_stat_final)
    out << " nn_ms_stat_final=" << *report.nn_ms_stat_final;
  out << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& policy_name_arg,
              const std::string& grid, int64_t horizon, int seeds,
              uint64_t base_seed, bool serial, const std::string& out_path,
              std::ostream& out) {
  Model model = load_model(path);
  SweepSpec spec;
  spec.structure = model.structure;
  spec.priorities = model.priorities;
  spec.policy = parse_policy(policy_name_arg);
  spec.grid_step = parse_grid(grid);
  spec.horizon = horizon;
  spec.seeds_per_cell = seeds;
  spec.base_seed = base_seed;
  OutFile sink(out_path, out);
  run_sweep(spec, *sink.stream, !serial);
  return 0;
}

int cmd_stationary(const std::string& path, const std::string& policy_name_arg,
                   int64_t cap, const std::string& out_path, std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  const ArrivalMeasure& measure = require_measure(model);
  PolicySpec policy = PolicySpec::make(parse_policy(policy_name_arg),
                                       model.structure, &measure,
                                       model.priorities);
  auto pi = truncated_stationary(g, measure, policy, cap);
  OutFile sink(out_path, out);
  *sink.stream << "state,prob\n";
  for (const auto& [state, p] : pi) {
    std::string key;
    for (size_t i = 0; i < state.x.size(); ++i)
      key += (i ? " " : "") + std::to_string(state.x[i]);
    key += ";";
    for (size_t i = 0; i < state.y.size(); ++i)
      key += (i ? " " : "") + std::to_string(state.y[i]);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", p);
    *sink.stream << key << "," << buf << "\n";
  }
  return 0;
}

int cmd_counterexample(const std::string& which, int64_t horizon, uint64_t seed,
                       std::ostream& out) {
  Model model = nn_priority_model();
  const MatchingStructure& g = *model.structure;
  const ArrivalMeasure& measure = *model.measure;

  if (which == "nn-priority") {
    ZChainParams p = z_chain_params_nn(measure);
    ZChainStationary pi = z_chain_stationary(p);
    NnDriftNumbers drift = nn_counterexample_drift(measure);
    out << "z-chain below zero: down=" << p.a_down.to_string()
        << " stay=" << p.a_stay.to_string() << " up=" << p.a_up.to_string() << "\n";
    out << "z-chain at zero:    down=" << p.b_down.to_string()
        << " stay=" << p.b_stay.to_string() << " up=" << p.b_up.to_string() << "\n";
    out << "z-chain above zero: down=" << p.c_down.to_string()
        << " stay=" << p.c_stay.to_string() << " up=" << p.c_up.to_string() << "\n";
    out << "pi(0) = " << pi.pi0.to_string() << "  pi(Z+) = " << pi.pi_pos.to_string()
        << "  pi(Z-) = " << pi.pi_neg.to_string() << "\n";
    out << "alpha = " << drift.alpha.to_string()
        << "  beta = " << drift.beta.to_string()
        << "  gamma = " << drift.gamma.to_string() << "\n";
    out << "composite drift = " << drift.composite.to_string() << "\n";

    PolicySpec policy = PolicySpec::make(PolicyKind::Priority, model.structure,
                                         &measure, model.priorities);
    SimulationReport report = simulate(g, measure, policy, horizon, seed);
    char growth[64];
    std::snprintf(growth, sizeof(growth), "%.6f",
                  static_cast<double>(report.final_buffer) /
                      static_cast<double>(horizon));
    out << "confirmation: policy=pr horizon=" << horizon << " seed=" << seed
        << " final_buffer=" << report.final_buffer
        << " growth_per_step=" << growth << "\n";
    return 0;
  }
  if (which == "nn-ms") {
    PolicySpec policy = PolicySpec::make(PolicyKind::MatchShortest,
                                         model.structure, &measure, std::nullopt);
    SimulationReport report = simulate(g, measure, policy, horizon, seed);
    out << "policy=ms horizon=" << horizon << " seed=" << seed
        << " final_buffer=" << report.final_buffer
        << " nn_ms_stat_final=" << *report.nn_ms_stat_final
        << " nn_ms_stat_min=" << *report.nn_ms_stat_min
        << " (growth evidence only)\n";
    return 0;
  }
  throw Error(Errc::BadInput, "counterexample expects nn-priority or nn-ms");
}

int cmd_drain(const std::string& path, const std::string& state_text,
              std::ostream& out) {
  Model model = load_model(path);
  const MatchingStructure& g = *model.structure;
  const ArrivalMeasure& measure = require_measure(model);
  CommutativeState state = parse_state(g, state_text);
  try {
    auto sequence = drain_to_empty(g, measure, state);
    out << "arrivals: " << sequence.size() << "\n";
    for (auto [c, s] : sequence)
      out << g.customer_labels()[c] << "|" << g.server_labels()[s] << "\n";
    return 0;
  } catch (const Error& e) {
    if (e.code() != Errc::UnstableStructure) throw;
    out << "unstable-structure: no drain sequence\n";
    return 1;
  }
}

}  // namespace

int run_command(std::vector<std::string> args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"stability analysis for the bipartite matching model"};
  app.require_subcommand(1);

  std::string model_path, policy = "ml", grid = "0.05", out_path, state_text;
  std::string which, trace_format;
  int64_t horizon = 1'000'000, ce_horizon = 2'000'000, cap = 100;
  uint64_t seed = 1, base_seed = 1;
  int seeds = 1;
  bool with_scond = false, serial = false;

  auto* facets = app.add_subcommand("facets", "list the facets of the matching graph");
  facets->add_option("model", model_path)->required();

  auto* check = app.add_subcommand("check", "check the stability conditions");
  check->add_option("model", model_path)->required();
  check->add_flag("--scond", with_scond, "also evaluate the per-facet drifts");

  auto* structure = app.add_subcommand("structure", "test strong connectivity");
  structure->add_option("model", model_path)->required();

  auto* measure = app.add_subcommand("measure", "construct a stabilizing measure");
  measure->add_option("model", model_path)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "run the buffer chain");
  simulate_cmd->add_option("model", model_path)->required();
  simulate_cmd->add_option("--policy", policy);
  simulate_cmd->add_option("--horizon", horizon);
  simulate_cmd->add_option("--seed", seed);
  simulate_cmd->add_option("--trace", trace_format,
                           "stream the time series; format must be csv");
  simulate_cmd->add_option("--out", out_path);

  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep of the symmetric family");
  sweep_cmd->add_option("model", model_path)->required();
  sweep_cmd->add_option("--policy", policy);
  sweep_cmd->add_option("--grid", grid);
  sweep_cmd->add_option("--horizon", horizon);
  sweep_cmd->add_option("--seeds", seeds);
  sweep_cmd->add_option("--seed", base_seed);
  sweep_cmd->add_flag("--serial", serial, "disable the worker pool");
  sweep_cmd->add_option("--out", out_path);

  auto* stationary_cmd =
      app.add_subcommand("stationary", "stationary law of the truncated chain");
  stationary_cmd->add_option("model", model_path)->required();
  stationary_cmd->add_option("--policy", policy);
  stationary_cmd->add_option("--cap", cap);
  stationary_cmd->add_option("--out", out_path);

  auto* counter = app.add_subcommand("counterexample",
                                     "the priority/ms counterexample numbers");
  counter->add_option("which", which)->required();
  counter->add_option("--horizon", ce_horizon);
  counter->add_option("--seed", seed);

  auto* drain = app.add_subcommand("drain", "arrival sequence emptying a state");
  drain->add_option("model", model_path)->required();
  drain->add_option("--state", state_text)->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  try {
    if (facets->parsed()) return cmd_facets(model_path, out);
    if (check->parsed()) return cmd_check(model_path, with_scond, out);
    if (structure->parsed()) return cmd_structure(model_path, out);
    if (measure->parsed()) return cmd_measure(model_path, out);
    if (simulate_cmd->parsed()) {
      if (!trace_format.empty() && trace_format != "csv")
        throw Error(Errc::BadInput, "only --trace csv is supported");
      return cmd_simulate(model_path, policy, horizon, seed,
                          trace_format == "csv", out_path, out);
    }
    if (sweep_cmd->parsed())
      return cmd_sweep(model_path, policy, grid, horizon, seeds, base_seed,
                       serial, out_path, out);
    if (stationary_cmd->parsed())
      return cmd_stationary(model_path, policy, cap, out_path, out);
    if (counter->parsed()) return cmd_counterexample(which, ce_horizon, seed, out);
    if (drain->parsed()) return cmd_drain(model_path, state_text, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace matchstab
