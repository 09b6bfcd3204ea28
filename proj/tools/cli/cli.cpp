#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <tuple>

#include "qmetro/error.hpp"
#include "qmetro/measurement.hpp"
#include "qmetro/precision.hpp"

namespace qmetro::cli {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPoint = 3;
constexpr int kExitOther = 1;

constexpr double kFig2Alpha = 3.0;
constexpr double kFig3AlphaBal = 3.0;
constexpr double kFig4AlphaBal = 4.0;
constexpr double kMeasureEta = 0.9;
constexpr int kPhaseGridPoints = 120;

std::string num(double x) { return fmt::format("{:.12g}", x); }

struct Row {
  double eta;
  std::string label;
  double delta_phi;
  double m;
  double n_phi;
  std::optional<double> a_opt;
};

class CsvBuilder {
 public:
  void comment(std::string_view key, std::string_view value) { header_ += fmt::format("#{}={}\n", key, value); }
  void comment(std::string_view key, double value) { comment(key, num(value)); }

  std::string precision_table(std::vector<Row> rows) const {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::tie(a.label, a.eta) < std::tie(b.label, b.eta);
    });
    std::string out = "#schema=1\n" + header_ + "eta,label,delta_phi,m,n_phi,a_opt\n";
    for (const Row& r : rows)
      out += fmt::format("{},{},{},{},{},{}\n", num(r.eta), r.label, num(r.delta_phi), num(r.m), num(r.n_phi),
                         r.a_opt ? num(*r.a_opt) : "");
    return out;
  }

  std::string table(std::string_view columns, const std::vector<std::vector<double>>& rows) const {
    std::string out = "#schema=1\n" + header_ + std::string(columns) + "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + num(row[i]);
      out += "\n";
    }
    return out;
  }

 private:
  std::string header_;
};

// Runs one grid point, turning truncation failures into a PointError that
// names the point.
template <class F>
auto at_point(std::string_view what, double eta, F&& compute) {
  try {
    return compute();
  } catch (const TruncationError& e) {
    throw PointError(fmt::format("truncation failure at ({}, eta={}): {}", what, num(eta), e.what()));
  } catch (const ConvergenceError& e) {
    throw PointError(fmt::format("no convergence at ({}, eta={}): {}", what, num(eta), e.what()));
  }
}

void add_curve(std::vector<Row>& rows, const PrecisionCurve& curve, const std::string& label) {
  for (const PrecisionPoint& p : curve.points) rows.push_back({p.eta, label, p.delta_phi, p.m, p.n_phi, p.a_opt});
}

std::vector<StateSpec> parse_states(const std::string& text) {
  try {
    return parse_state_list(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--states: {}", e.what()));
  }
}

std::string spec_label(const StateSpec& spec) {
  std::string label = to_string(spec);
  std::replace(label.begin(), label.end(), ',', ';');
  return label;
}

PipelineOptions pipeline(const RunConfig& config) {
  PipelineOptions options;
  options.cutoff = config.cutoff;
  return options;
}

// CRB of a fixed spec, one eta at a time so failures name their point.
PrecisionCurve fixed_curve(const StateSpec& spec, const std::vector<double>& etas, const RunConfig& config) {
  PrecisionCurve curve{family_label(spec), {}};
  for (double eta : etas) {
    const std::vector<double> one{eta};
    const PrecisionCurve single =
        at_point(to_string(spec), eta, [&] { return crb_curve(spec, one, config.rphi, pipeline(config)); });
    curve.points.push_back(single.points.front());
  }
  return curve;
}

void common_comments(CsvBuilder& csv, const RunConfig& config, const EtaGrid& grid) {
  csv.comment("command", config.command);
  csv.comment("eta", grid.to_string());
  csv.comment("rphi", config.rphi);
  if (config.cutoff) csv.comment("cutoff", std::to_string(*config.cutoff));
}

EtaGrid grid_or_default(const RunConfig& config) { return config.eta.value_or(EtaGrid{}); }

std::string cmd_curve(const RunConfig& config) {
  const EtaGrid grid = grid_or_default(config);
  const auto etas = grid.values();
  const auto specs = parse_states(*config.states);
  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("states", *config.states);
  std::vector<Row> rows;
  for (const StateSpec& spec : specs) add_curve(rows, fixed_curve(spec, etas, config), spec_label(spec));
  return csv.precision_table(std::move(rows));
}

std::string cmd_fig2(const RunConfig& config) {
  const EtaGrid grid = grid_or_default(config);
  const auto etas = grid.values();
  const double alpha = config.alpha.value_or(kFig2Alpha);
  const double n_phi = cat_mean_photons(alpha);
  const int n = matched_noon_number(n_phi);
  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("alpha", alpha);
  csv.comment("n_phi", n_phi);
  csv.comment("noon_N", std::to_string(n));
  csv.comment("loss", "both arms for two-mode states");
  std::vector<Row> rows;
  const std::vector<std::pair<StateSpec, std::string>> curves = {
      {Cat{alpha}, "cat"}, {Ecs{alpha}, "ECS"}, {Noon{n}, "NOON"}, {No{n}, "NO"}, {Coherent{std::sqrt(n_phi)}, "CS"}};
  for (const auto& [spec, label] : curves) add_curve(rows, fixed_curve(spec, etas, config), label);
  add_curve(rows, snl_curve(etas, config.rphi), "SNL");
  return csv.precision_table(std::move(rows));
}

std::string cmd_fig3(const RunConfig& config) {
  const EtaGrid grid = grid_or_default(config);
  const auto etas = grid.values();
  const double alpha_bal = config.alpha_bal.value_or(kFig3AlphaBal);
  const double n_phi = cat_mean_photons(alpha_bal);
  const int n = matched_noon_number(n_phi);
  const int n_max = matched_noon_number(cat_mean_photons(config.alpha_bal_max));
  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("alpha_bal", alpha_bal);
  csv.comment("alpha_bal_max", config.alpha_bal_max);
  csv.comment("n_phi", n_phi);
  csv.comment("noon_N", std::to_string(n));
  csv.comment("noon_N_max", std::to_string(n_max));
  std::vector<Row> rows;
  add_curve(rows, fixed_curve(Cat{alpha_bal}, etas, config), "cat");
  add_curve(rows, fixed_curve(Noon{n}, etas, config), "NOON");
  for (double eta : etas) {
    const std::vector<double> one{eta};
    add_curve(rows, at_point("UCS", eta, [&] { return ucs_optimized_curve(n_phi, one, config.rphi); }), "UCS");
    add_curve(rows, at_point("CC", eta, [&] { return chop_curve(one, config.rphi, config.alpha_bal_max); }), "CC");
    add_curve(rows, at_point("NC", eta, [&] { return noon_chop_curve(one, config.rphi, n_max); }), "NC");
  }
  add_curve(rows, snl_curve(etas, config.rphi), "SNL");
  return csv.precision_table(std::move(rows));
}

std::string cmd_fig4(const RunConfig& config) {
  const EtaGrid grid = grid_or_default(config);
  const auto etas = grid.values();
  const double alpha_bal = config.alpha_bal.value_or(kFig4AlphaBal);
  const double beta = config.beta.value_or(4.0 * alpha_bal);
  const double n_phi = cat_mean_photons(alpha_bal);
  const int n = matched_noon_number(n_phi);
  const auto phases = open_phase_grid(kPhaseGridPoints);
  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("alpha_bal", alpha_bal);
  csv.comment("beta", beta);
  csv.comment("n_phi", n_phi);
  csv.comment("noon_N", std::to_string(n));
  csv.comment("ECSM", "placeholder; the entangled-coherent-state readout is out of scope, no rows emitted");
  std::vector<Row> rows;
  add_curve(rows, fixed_curve(Noon{n}, etas, config), "NOON");
  for (double eta : etas) {
    const std::vector<double> one{eta};
    add_curve(rows, at_point("UCS", eta, [&] { return ucs_optimized_curve(n_phi, one, config.rphi); }), "UCS");
    const auto readout =
        at_point("UCSM", eta, [&] { return optimize_ucs_measurement(n_phi, eta, beta, config.rphi, phases); });
    rows.push_back({eta, "UCSM", readout.delta_phi, config.rphi / n_phi, n_phi, readout.a});
  }
  add_curve(rows, snl_curve(etas, config.rphi), "SNL");
  return csv.precision_table(std::move(rows));
}

std::string cmd_optimize(const RunConfig& config) {
  const EtaGrid grid = grid_or_default(config);
  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("alpha_bal_max", config.alpha_bal_max);
  csv.comment("n_phi_ceiling", cat_mean_photons(config.alpha_bal_max));
  std::vector<std::vector<double>> rows;
  for (double eta : grid.values()) {
    const ChopOptimum opt = at_point("chop", eta, [&] { return chop_optimize(eta, config.rphi, config.alpha_bal_max); });
    rows.push_back({eta, opt.a_opt, opt.n_phi_opt, opt.delta_phi});
  }
  return csv.table("eta,a_opt,n_phi_opt,delta_phi", rows);
}

std::string cmd_measure(const RunConfig& config) {
  const EtaGrid grid = config.eta.value_or(EtaGrid{kMeasureEta, kMeasureEta, 1});
  const StateSpec spec = parse_states(config.states.value_or("cat:alpha=4")).front();
  MeasurementConfig mc;
  mc.spec = spec;
  mc.eta = grid.min;
  mc.beta = config.beta.value_or(4.0 * config.alpha_bal.value_or(kFig4AlphaBal));
  mc.m = config.m;
  mc.seed = *config.seed;
  mc.phi_grid = open_phase_grid(kPhaseGridPoints);
  const BayesianExperiment experiment =
      at_point(to_string(spec), mc.eta, [&] { return BayesianExperiment(mc); });

  CsvBuilder csv;
  common_comments(csv, config, grid);
  csv.comment("states", to_string(spec));
  csv.comment("beta", mc.beta);
  csv.comment("seed", std::to_string(mc.seed));
  csv.comment("trials", std::to_string(config.trials));
  csv.comment("phi_opt", experiment.phi_opt());
  csv.comment("fisher_per_state", experiment.fisher_at_opt());
  csv.comment("expected_std", 1.0 / std::sqrt(static_cast<double>(mc.m) * experiment.fisher_at_opt()));
  std::vector<std::vector<double>> rows;
  const double phi_true = experiment.phi_opt();
  for (int t = 0; t < config.trials; ++t) {
    const PosteriorSummary s = at_point(to_string(spec), mc.eta, [&] {
      return experiment.run(phi_true, trial_seed(mc.seed, static_cast<std::uint64_t>(t)));
    });
    rows.push_back({static_cast<double>(t), phi_true, s.mean_phi, s.std_phi, static_cast<double>(s.n_updates)});
  }
  return csv.table("trial,phi_true,mean_phi,std_phi,m", rows);
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError(fmt::format("{}: '{}' is not a number", what, text));
  return value;
}

}  // namespace

std::vector<double> EtaGrid::values() const { return uniform_grid(min, max, count); }

std::string EtaGrid::to_string() const { return fmt::format("{}:{}:{}", num(min), num(max), count); }

EtaGrid parse_eta_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  for (size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  if (parts.size() != 3) throw UsageError(fmt::format("--eta: '{}' is not MIN:MAX:COUNT", text));
  EtaGrid grid;
  grid.min = parse_double(parts[0], "--eta MIN");
  grid.max = parse_double(parts[1], "--eta MAX");
  int count = 0;
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
  if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size())
    throw UsageError(fmt::format("--eta COUNT: '{}' is not an integer", parts[2]));
  grid.count = count;
  return grid;
}

void validate(const RunConfig& config) {
  static const std::vector<std::string> commands = {"curve", "fig2", "fig3", "fig4", "optimize", "measure"};
  if (std::find(commands.begin(), commands.end(), config.command) == commands.end())
    throw UsageError(fmt::format("unknown command '{}'", config.command));
  if (!(config.rphi > 0.0)) throw UsageError("--rphi must be positive");
  if (config.eta) {
    const EtaGrid& g = *config.eta;
    if (g.count < 1) throw UsageError("--eta COUNT must be at least 1");
    if (!(g.min > 0.0 && g.max <= 1.0)) throw UsageError("--eta must lie in (0, 1]");
    if (g.count == 1 && g.min != g.max) throw UsageError("--eta with COUNT 1 needs MIN == MAX");
    if (g.count > 1 && !(g.max > g.min)) throw UsageError("--eta needs MAX > MIN when COUNT > 1");
  }
  if (config.alpha && !(*config.alpha > 0.0)) throw UsageError("--alpha must be positive");
  if (config.alpha_bal && !(*config.alpha_bal > 0.0)) throw UsageError("--alpha-bal must be positive");
  if (!(config.alpha_bal_max > 0.0)) throw UsageError("--alpha-bal-max must be positive");
  if (config.beta && !(*config.beta >= 0.0)) throw UsageError("--beta must be >= 0");
  if (config.cutoff && *config.cutoff < 1) throw UsageError("--cutoff must be at least 1");
  if (config.trials < 1) throw UsageError("--trials must be at least 1");
  if (config.m < 1) throw UsageError("--m must be at least 1");

  if (config.command == "curve") {
    if (!config.states) throw UsageError("curve needs --states");
    parse_states(*config.states);
  }
  if (config.command == "fig3" && config.alpha_bal.value_or(kFig3AlphaBal) > config.alpha_bal_max)
    throw UsageError("--alpha-bal exceeds --alpha-bal-max");
  if (config.command == "optimize" && !(cat_mean_photons(config.alpha_bal_max) > 0.1))
    throw UsageError("--alpha-bal-max is too small for the chop search");
  if (config.command == "measure") {
    if (!config.seed) throw UsageError("measure needs --seed");
    if (config.eta && config.eta->count != 1) throw UsageError("measure takes a single eta, e.g. --eta 0.9:0.9:1");
    if (config.states) {
      const auto specs = parse_states(*config.states);
      if (specs.size() != 1) throw UsageError("measure takes exactly one state");
      if (mode_count(specs.front()) != 1)
        throw UsageError(fmt::format("--states: '{}' has no photon-counting readout", *config.states));
    }
  }
}

std::string run(const RunConfig& config) {
  validate(config);
  if (config.command == "curve") return cmd_curve(config);
  if (config.command == "fig2") return cmd_fig2(config);
  if (config.command == "fig3") return cmd_fig3(config);
  if (config.command == "fig4") return cmd_fig4(config);
  if (config.command == "optimize") return cmd_optimize(config);
  return cmd_measure(config);
}

int main_entry(int argc, const char* const* argv) {
  CLI::App app{"Phase-estimation precision of lossy optical probes under a fixed photon budget", "qmetro"};
  app.set_config("--config", "", "key=value file; flags given on the command line take precedence");
  // Values such as `states=cat:alpha=3,noon:N=4` must reach the option whole.
  auto config_format = std::make_shared<CLI::ConfigBase>();
  config_format->arrayDelimiter(';');
  app.config_formatter(config_format);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig config;
  std::optional<std::string> eta_text;
  app.add_option("--states", config.states, "Comma-separated state specs, e.g. cat:alpha=3,noon:N=4");
  app.add_option("--eta", eta_text, "Transmissivity grid MIN:MAX:COUNT");
  app.add_option("--rphi", config.rphi, "Photons through the phase shift in total")->capture_default_str();
  app.add_option("--alpha", config.alpha, "Coherent amplitude (fig2)");
  app.add_option("--alpha-bal", config.alpha_bal, "Balanced cat amplitude (fig3, fig4, measure)");
  app.add_option("--alpha-bal-max", config.alpha_bal_max, "Chop ceiling on the cat amplitude")->capture_default_str();
  app.add_option("--beta", config.beta, "Displacement amplitude of the readout");
  app.add_option("--seed", config.seed, "Random seed (measure)");
  app.add_option("--cutoff", config.cutoff, "Fock cutoff override");
  app.add_option("--trials", config.trials, "Monte-Carlo trials (measure)")->capture_default_str();
  app.add_option("--m", config.m, "Repetitions per trial (measure)")->capture_default_str();
  app.add_option("--out", config.out, "Output CSV path, - for stdout")->capture_default_str();

  app.add_subcommand("curve", "CRB curves of the given states");
  app.add_subcommand("fig2", "Cat, ECS, NOON, NO, coherent and SNL curves");
  app.add_subcommand("fig3", "Cat, UCS, UCS chopping, NOON, NOON chopping and SNL curves");
  app.add_subcommand("fig4", "Displaced photon-counting readout against the UCS CRB");
  app.add_subcommand("optimize", "Joint optimum over state size and unbalancing per eta");
  app.add_subcommand("measure", "Seeded Bayesian phase-estimation trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    config.command = app.get_subcommands().front()->get_name();
    if (eta_text) config.eta = parse_eta_grid(*eta_text);
    validate(config);

    std::ofstream file;
    if (config.out != "-") {
      file.open(config.out, std::ios::binary | std::ios::trunc);
      if (!file) throw UsageError(fmt::format("cannot write '{}'", config.out));
    }
    const std::string csv = run(config);
    std::ostream& sink = config.out == "-" ? std::cout : file;
    sink << csv;
    sink.flush();
    if (!sink) throw UsageError(fmt::format("failed writing '{}'", config.out));
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "qmetro: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PointError& e) {
    std::cerr << "qmetro: " << e.what() << '\n';
    return kExitPoint;
  } catch (const std::exception& e) {
    std::cerr << "qmetro: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace qmetro::cli
