// Command-line surface for the channel-simulation toolkit: capacities,
// exponents, single-scheme evaluation, converse audits and n-sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "chansim/chansim.hpp"

namespace {

using namespace chansim;

double parse_alpha(const std::string& text) {
  if (text == "inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  return std::stod(text);
}

Channel resolve_channel(const std::string& preset, const std::string& file) {
  if (!file.empty()) return Channel::from_file(file);
  return Channel::parse(preset);
}

std::string fmt(double v) { return detail::format_sig12(v); }

void print_distribution(const char* label, const Distribution& d) {
  std::printf("%s:", label);
  for (int i = 0; i < d.size(); ++i) std::printf(" %s", fmt(d[i]).c_str());
  std::printf("\n");
}

struct CommonChannelOpts {
  std::string preset = "bsc:0.1";
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--channel", preset,
                    "channel preset (bsc:p, z:p, identity:k, uniform:AxB)");
    cmd->add_option("--channel-file", file,
                    "whitespace-separated transition matrix, one line per "
                    "input");
  }
};

int run_capacity(const CommonChannelOpts& ch, const std::string& alpha_text,
                 double tol) {
  const Channel w = resolve_channel(ch.preset, ch.file);
  const RenyiOrder order = RenyiOrder::from_alpha(parse_alpha(alpha_text));
  const CapacityResult cap = renyi_capacity(w, order, tol);
  std::printf("alpha: %s\n", order.to_string().c_str());
  std::printf("capacity_bits: %s\n", fmt(cap.value).c_str());
  std::printf("primal_bits: %s\n", fmt(cap.primal_value).c_str());
  std::printf("duality_gap: %s\n", fmt(cap.duality_gap).c_str());
  print_distribution("optimal_input", cap.optimal_input);
  print_distribution("optimal_output", cap.optimal_output);
  return 0;
}

int run_exponent(const CommonChannelOpts& ch, const std::string& kind,
                 const std::string& alpha_text, double rate) {
  const Channel w = resolve_channel(ch.preset, ch.file);
  const RenyiOrder order = RenyiOrder::from_alpha(parse_alpha(alpha_text));
  if (kind == "rate") {
    std::printf("simulation_rate_bits: %s\n",
                fmt(renyi_simulation_rate(w, order)).c_str());
    return 0;
  }
  const ExponentReport rep = kind == "rf"
                                 ? reliability_function(w, rate, order)
                                 : strong_converse_exponent(w, rate, order);
  std::printf("kind: %s\nalpha: %s\nrate: %s\n", kind.c_str(),
              order.to_string().c_str(), fmt(rate).c_str());
  if (rep.value.is_infinite())
    std::printf("exponent_bits: inf\n");
  else
    std::printf("exponent_bits: %s\n", fmt(rep.value.value()).c_str());
  if (rep.optimizer.t_star)
    std::printf("t_star: %s\n", fmt(*rep.optimizer.t_star).c_str());
  if (rep.optimizer.beta_star)
    std::printf("beta_star: %s\n", fmt(*rep.optimizer.beta_star).c_str());
  if (rep.optimizer.input) print_distribution("input", *rep.optimizer.input);
  if (rep.optimizer.output)
    print_distribution("output", *rep.optimizer.output);
  if (rep.boundary_flag) std::printf("note: undefined-at-boundary\n");
  return 0;
}

int run_simulate(const ExperimentConfig& cfg, int n,
                 const std::string& save_scheme) {
  const Channel w = cfg.channel();
  const SimulationScheme scheme = detail::build_config_scheme(cfg, w, n);
  const RenyiOrder order = RenyiOrder::from_alpha(cfg.alpha);
  const double d = simulation_performance(w, scheme, order).as_double();
  const double lower =
      one_shot_converse_bound(w, scheme.communication_bits(), order, n);
  std::printf("n: %d\nscheme: %s\n", n, cfg.scheme.c_str());
  std::printf("communication_bits: %s\n",
              fmt(scheme.communication_bits()).c_str());
  std::printf("D_value_bits: %s\n", fmt(d).c_str());
  std::printf("converse_lower_bits: %s\n", fmt(lower).c_str());
  if (!save_scheme.empty()) {
    std::ofstream out(save_scheme);
    if (!out) throw Error("cannot open " + save_scheme);
    out << scheme.to_json().dump(2) << "\n";
  }
  if (d < lower - 1e-9)
    throw GateViolationError("exact divergence below the converse bound");
  return 0;
}

int emit_report(const ExperimentReport& rep, const ExperimentConfig& cfg) {
  for (const auto& wmsg : rep.warnings)
    std::fprintf(stderr, "warning: %s\n", wmsg.c_str());
  if (cfg.output_path.empty()) {
    std::fputs(render_report(rep, parse_format(cfg.format)).c_str(), stdout);
  } else {
    export_report(rep, cfg.output_path, parse_format(cfg.format));
    std::printf("wrote %s\n", cfg.output_path.c_str());
  }
  std::printf("verdict: %s\n", rep.verdict.c_str());
  if (rep.verdict == "gate-violation")
    throw GateViolationError("a record violates the converse lower bound");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"channel simulation toolkit"};
  app.require_subcommand(1);

  // capacity ---------------------------------------------------------------
  CommonChannelOpts cap_ch;
  std::string cap_alpha = "1";
  double cap_tol = 1e-6;
  CLI::App* cap_cmd = app.add_subcommand("capacity", "Renyi capacity");
  cap_ch.attach(cap_cmd);
  cap_cmd->add_option("--alpha", cap_alpha, "order (number, 0 or inf)");
  cap_cmd->add_option("--tol", cap_tol, "duality gap tolerance");

  // exponent ---------------------------------------------------------------
  CommonChannelOpts exp_ch;
  std::string exp_kind = "rf", exp_alpha = "2";
  double exp_rate = 0.5;
  CLI::App* exp_cmd =
      app.add_subcommand("exponent", "reliability / strong-converse "
                                     "exponents and the simulation rate");
  exp_ch.attach(exp_cmd);
  exp_cmd->add_option("--kind", exp_kind, "rf | sc | rate")
      ->check(CLI::IsMember({"rf", "sc", "rate"}));
  exp_cmd->add_option("--alpha", exp_alpha, "order (number, 0 or inf)");
  exp_cmd->add_option("--rate", exp_rate, "communication rate r (bits/use)");

  // shared config-backed options for simulate / audit / sweep ---------------
  auto add_config_opts = [](CLI::App* cmd, std::string& config_path,
                            std::optional<std::string>& channel,
                            std::optional<std::string>& channel_file,
                            std::optional<std::string>& alpha,
                            std::optional<double>& rate,
                            std::optional<int>& n_min,
                            std::optional<int>& n_max,
                            std::optional<std::string>& scheme,
                            std::optional<double>& s,
                            std::optional<double>& delta,
                            std::optional<std::uint64_t>& seed,
                            std::optional<std::string>& out,
                            std::optional<std::string>& format) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--channel", channel, "channel preset");
    cmd->add_option("--channel-file", channel_file, "matrix file");
    cmd->add_option("--alpha", alpha, "measured divergence order");
    cmd->add_option("--rate", rate, "communication rate r");
    cmd->add_option("--n-min", n_min, "smallest blocklength");
    cmd->add_option("--n-max", n_max, "largest blocklength");
    cmd->add_option("--scheme", scheme, "rf | sc | uniform");
    cmd->add_option("--s", s, "rf proposal order parameter");
    cmd->add_option("--delta", delta, "sc budget slack (bits)");
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--out", out, "output path");
    cmd->add_option("--format", format, "csv | jsonl");
  };

  struct SweepArgs {
    std::string config_path;
    std::optional<std::string> channel, channel_file, alpha, scheme, out,
        format;
    std::optional<double> rate, s, delta;
    std::optional<int> n_min, n_max;
    std::optional<std::uint64_t> seed;

    ExperimentConfig resolve() const {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error("cannot open config " + config_path);
        nlohmann::json j;
        in >> j;
        cfg = ExperimentConfig::from_json(j);
      }
      if (channel) cfg.channel_spec = *channel;
      if (channel_file) cfg.channel_spec = "file:" + *channel_file;
      if (alpha) cfg.alpha = parse_alpha(*alpha);
      if (rate) cfg.rate = *rate;
      if (n_min) cfg.n_min = *n_min;
      if (n_max) cfg.n_max = *n_max;
      if (scheme) cfg.scheme = *scheme;
      if (s) cfg.s = *s;
      if (delta) cfg.delta = *delta;
      if (seed) cfg.seed = *seed;
      if (out) cfg.output_path = *out;
      if (format) cfg.format = *format;
      return cfg;
    }
  };

  SweepArgs sim_args, audit_args, sweep_args;
  int sim_n = 4;
  std::string sim_save_scheme;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "build one scheme and evaluate its "
                                     "exact divergence");
  add_config_opts(sim_cmd, sim_args.config_path, sim_args.channel,
                  sim_args.channel_file, sim_args.alpha, sim_args.rate,
                  sim_args.n_min, sim_args.n_max, sim_args.scheme,
                  sim_args.s, sim_args.delta, sim_args.seed, sim_args.out,
                  sim_args.format);
  sim_cmd->add_option("--n", sim_n, "blocklength");
  sim_cmd->add_option("--save-scheme", sim_save_scheme,
                      "write the scheme description (JSON) here");

  CLI::App* audit_cmd =
      app.add_subcommand("audit", "one-shot converse audit over an n-range");
  add_config_opts(audit_cmd, audit_args.config_path, audit_args.channel,
                  audit_args.channel_file, audit_args.alpha, audit_args.rate,
                  audit_args.n_min, audit_args.n_max, audit_args.scheme,
                  audit_args.s, audit_args.delta, audit_args.seed,
                  audit_args.out, audit_args.format);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "exact divergence sweep with slope fit");
  add_config_opts(sweep_cmd, sweep_args.config_path, sweep_args.channel,
                  sweep_args.channel_file, sweep_args.alpha, sweep_args.rate,
                  sweep_args.n_min, sweep_args.n_max, sweep_args.scheme,
                  sweep_args.s, sweep_args.delta, sweep_args.seed,
                  sweep_args.out, sweep_args.format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cap_cmd->parsed()) return run_capacity(cap_ch, cap_alpha, cap_tol);
    if (exp_cmd->parsed())
      return run_exponent(exp_ch, exp_kind, exp_alpha, exp_rate);
    if (sim_cmd->parsed())
      return run_simulate(sim_args.resolve(), sim_n, sim_save_scheme);
    if (audit_cmd->parsed())
      return emit_report(run_sc_audit(audit_args.resolve()),
                         audit_args.resolve());
    if (sweep_cmd->parsed())
      return emit_report(run_rf_experiment(sweep_args.resolve()),
                         sweep_args.resolve());
  } catch (const GateViolationError& e) {
    std::fprintf(stderr, "gate violation: %s\n", e.what());
    return 2;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "non-convergence: %s (best gap %.3e)\n", e.what(),
                 e.best_gap());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
