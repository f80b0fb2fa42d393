#include "tsm/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "tsm/csv.hpp"
#include "tsm/equilibrium.hpp"
#include "tsm/parallel.hpp"

namespace tsm::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every option is registered on the root app so one flat config file can
// carry all of them; subcommands fall through to the root.
struct Bindings {
  MarketParams params;
  PopulationSpec pop;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> scenarios;
  std::string mode = "equilibrium";
  std::string preset;
  std::string format = "csv";
  std::string axis;
  std::string grid;
  std::vector<double> phi_levels;
  double gamma_min = 0, gamma_max = 0, psi_min = 0, psi_max = 0, phi_min = 0, phi_max = 0, k1_min = 0, k1_max = 0;
  VerifyOptions verify;
  std::string fault = "none";

  CLI::App* equilibrium = nullptr;
  CLI::App* scenario = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* verify_cmd = nullptr;
};

void bounds(const Distribution& d, double& lo, double& hi) {
  lo = d.a;
  hi = d.kind == Distribution::Kind::fixed ? d.a : d.b;
}

Distribution uniform_or_fixed(double lo, double hi) {
  return lo == hi ? Distribution::fixed(lo) : Distribution::uniform(lo, hi);
}

void build_app(CLI::App& app, Bindings& b) {
  app.set_config("--config", "", "flat `key = value` configuration file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  b.equilibrium = app.add_subcommand("equilibrium", "solve one market at explicit parameters");
  b.scenario = app.add_subcommand("scenario", "run business-model scenarios over a sampled population");
  b.sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter axis");
  b.verify_cmd = app.add_subcommand("verify", "check the closed form against the grid oracle on random draws");
  for (CLI::App* sub : {b.equilibrium, b.scenario, b.sweep, b.verify_cmd}) sub->fallthrough();

  app.add_option("--seed", b.seed, "population seed");
  app.add_option("--out", b.out, "output path (default: stdout)");
  app.add_option("--scenario", b.scenarios, "two_sided,fifty_fifty,pay_as_you_go")->delimiter(',');
  app.add_option("--mode", b.mode, "two-sided mode: equilibrium | declared-price");
  app.add_option("--preset", b.preset, "figure preset fig4..fig15");
  app.add_option("--format", b.format, "output format (csv)");

  MarketParams& p = b.params;
  app.add_option("--alpha", p.alpha, "consumer-side externality");
  app.add_option("--beta", p.beta, "supply-side externality");
  app.add_option("--gamma", p.gamma, "price elasticity of demand");
  app.add_option("--psi", p.psi, "price elasticity of supply");
  app.add_option("--phi", p.phi, "subsidizing factor");
  app.add_option("--k1", p.k1, "demand scale");
  app.add_option("--k2", p.k2, "supply scale");
  app.add_option("--f_c", p.f_c, "provider per-access cost");
  app.add_option("--f_s", p.f_s, "platform per-unit infrastructure cost");
  app.add_option("--p_s", p.p_s, "pay-as-you-go rental rate");

  PopulationSpec& pop = b.pop;
  app.add_option("--n_providers", pop.n_providers);
  app.add_option("--price_mean", pop.price.a);
  app.add_option("--price_sd", pop.price.b);
  app.add_option("--price_min", pop.price.lo);
  app.add_option("--price_max", pop.price.hi);
  app.add_option("--alpha_mean", pop.alpha.a);
  app.add_option("--alpha_sd", pop.alpha.b);
  app.add_option("--alpha_min", pop.alpha.lo);
  app.add_option("--alpha_max", pop.alpha.hi);
  app.add_option("--beta_product_cap", pop.beta_product_cap);
  bounds(pop.gamma, b.gamma_min, b.gamma_max);
  bounds(pop.psi, b.psi_min, b.psi_max);
  bounds(pop.phi, b.phi_min, b.phi_max);
  bounds(pop.k1, b.k1_min, b.k1_max);
  app.add_option("--gamma_min", b.gamma_min);
  app.add_option("--gamma_max", b.gamma_max);
  app.add_option("--psi_min", b.psi_min);
  app.add_option("--psi_max", b.psi_max);
  app.add_option("--phi_min", b.phi_min);
  app.add_option("--phi_max", b.phi_max);
  app.add_option("--k1_min", b.k1_min);
  app.add_option("--k1_max", b.k1_max);
  app.add_option("--fc_ratio", pop.fc_ratio, "f_c as a fraction of the sampled price");

  app.add_option("--axis", b.axis, "alpha_beta_product | phi | gamma | k1");
  app.add_option("--grid", b.grid, "lo:hi:count or a comma-separated list");
  app.add_option("--phi_levels", b.phi_levels)->delimiter(',');

  app.add_option("--draws", b.verify.draws);
  app.add_option("--grid_n", b.verify.grid_n);
  app.add_option("--max_attempts", b.verify.max_attempts);
  app.add_option("--inject_fault", b.fault, "none | wrong_sign_a3");
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad grid value '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    parts.push_back(item);
  }
  if (sep == ':') {
    if (parts.size() != 3) throw std::invalid_argument("grid range must be lo:hi:count");
    const double count = number(parts[2]);
    if (!(count >= 1) || count != static_cast<double>(static_cast<std::size_t>(count)))
      throw std::invalid_argument("grid count must be a positive integer");
    return linear_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(count));
  }
  std::vector<double> out;
  for (const std::string& s : parts) out.push_back(number(s));
  return out;
}

bool given(const CLI::App& app, const char* name) { return app.count(name) > 0; }

void emit(const RunConfig& config, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (!config.out_path) {
    write(out);
    return;
  }
  // Serialize fully before touching the file so a failure never leaves a
  // partial output behind.
  std::ostringstream buffer;
  write(buffer);
  std::ofstream file(*config.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + *config.out_path + "' for writing");
  file << buffer.str();
  file.flush();
  if (!file) throw IoError("write to '" + *config.out_path + "' failed");
}

void metadata(const RunConfig& c, std::ostream& err, const char* command) {
  err << "# command=" << command << " seed=" << c.population.seed << " mode=" << to_string(c.mode)
      << " threads=" << worker_count();
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Two-sided cloud data-market simulator", "tsm"};
  Bindings b;
  build_app(app, b);
  app.parse(argc, argv);

  RunConfig c;
  if (b.equilibrium->parsed()) c.command = Command::equilibrium;
  else if (b.scenario->parsed()) c.command = Command::scenario;
  else if (b.sweep->parsed()) c.command = Command::sweep;
  else c.command = Command::verify;

  if (b.format != "csv") throw std::invalid_argument("unsupported format '" + b.format + "'");
  c.format = b.format;
  if (!b.out.empty()) c.out_path = b.out;
  c.mode = parse_mode(b.mode);
  c.params = b.params;

  PopulationSpec pop = b.pop;
  pop.gamma = uniform_or_fixed(b.gamma_min, b.gamma_max);
  pop.psi = uniform_or_fixed(b.psi_min, b.psi_max);
  pop.phi = uniform_or_fixed(b.phi_min, b.phi_max);
  pop.k1 = uniform_or_fixed(b.k1_min, b.k1_max);
  pop.k2 = b.params.k2;
  pop.f_s = b.params.f_s;
  pop.p_s = b.params.p_s;
  if (given(app, "--seed")) pop.seed = b.seed;
  else if (c.command == Command::verify) pop.seed = VerifyOptions::default_verify_population().seed;
  c.population = pop;

  if (!b.scenarios.empty()) {
    c.scenarios.clear();
    for (const std::string& s : b.scenarios) c.scenarios.push_back(parse_scenario(s));
  }

  if (!b.preset.empty()) {
    if (c.command != Command::sweep) throw std::invalid_argument("--preset applies to the sweep command only");
    SweepPreset preset = find_preset(b.preset);
    c.preset = preset.name;
    c.metrics = preset.metrics;
    c.sweep = preset.spec;
    if (!b.axis.empty() && parse_axis(b.axis) != c.sweep.axis)
      throw std::invalid_argument("--axis conflicts with preset " + preset.name);
    if (!b.scenarios.empty()) c.sweep.scenarios = c.scenarios;
  } else {
    if (c.command == Command::sweep && b.axis.empty()) throw std::invalid_argument("sweep needs --axis or --preset");
    if (!b.axis.empty()) c.sweep.axis = parse_axis(b.axis);
    c.sweep.scenarios = c.scenarios;
  }
  if (!b.grid.empty()) c.sweep.grid = parse_grid(b.grid);
  if (!b.phi_levels.empty()) c.sweep.phi_levels = b.phi_levels;
  c.sweep.population = pop;
  c.sweep.mode = c.mode;
  if (c.command == Command::sweep) validate(c.sweep);

  c.verify = b.verify;
  c.verify.population = pop;
  c.verify.fault = parse_fault(b.fault);
  c.verify.exec = Execution::parallel;
  if (c.command == Command::verify) {
    if (c.verify.draws < 1) throw std::invalid_argument("draws must be >= 1");
    if (c.verify.grid_n < 100) throw std::invalid_argument("grid_n must be >= 100");
    if (c.verify.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  }
  return c;
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.command) {
    case Command::equilibrium: {
      const EquilibriumResult r = stackelberg_solve(c.params);
      std::ostringstream row;
      csv::write_equilibrium(row, r);
      out << row.str();
      if (c.out_path) emit(c, out, [&](std::ostream& o) { o << row.str(); });
      err << "# command=equilibrium status=" << to_string(r.status) << '\n';
      return r.feasible() ? kSuccess : kInfeasible;
    }
    case Command::scenario: {
      const Population population = sample_population(c.population, Execution::parallel);
      std::vector<ScenarioRecord> records;
      for (ScenarioTag tag : c.scenarios) {
        std::vector<ScenarioRecord> part = run_scenario(population, tag, c.mode, Execution::parallel);
        records.insert(records.end(), part.begin(), part.end());
      }
      emit(c, out, [&](std::ostream& o) { csv::write_scenario(o, records); });
      metadata(c, err, "scenario");
      err << " n_providers=" << population.size() << '\n';
      for (const ScenarioSummary& s : compare_scenarios(records).summaries) {
        err << "# " << to_string(s.scenario) << " feasible=" << s.feasible << '/' << s.n;
        if (s.cloud_payoff) err << " mean_cloud_payoff=" << csv::format_number(s.cloud_payoff->mean);
        if (s.provider_payoff) err << " mean_provider_payoff=" << csv::format_number(s.provider_payoff->mean);
        err << '\n';
      }
      return kSuccess;
    }
    case Command::sweep: {
      const SweepSeries series = run_sweep(c.sweep, Execution::parallel);
      emit(c, out, [&](std::ostream& o) {
        if (c.metrics.empty()) csv::write_sweep(o, series);
        else csv::write_sweep(o, series, c.metrics);
      });
      metadata(c, err, "sweep");
      err << " axis=" << to_string(series.axis) << " statistic=" << series.statistic;
      if (c.preset) err << " preset=" << *c.preset;
      err << " cells=" << series.cells.size() << '\n';
      return kSuccess;
    }
    case Command::verify: {
      const VerificationReport report = run_verification(c.verify);
      std::ostringstream text;
      text << "attempts " << report.attempts << "\nfeasible_draws " << report.feasible_draws
           << "\noutside_oracle_grid " << report.outside_oracle_grid << '\n';
      if (report.region_empty) {
        text << "region empty: no feasible draw in " << report.attempts << " attempts\n";
      }
      for (const PropertyOutcome& p : report.properties) {
        text << (p.passed() ? "PASS " : "FAIL ") << p.name << " checked=" << p.checked << " failed=" << p.failed
             << " worst=" << csv::format_number(p.worst) << " tolerance=" << csv::format_number(p.tolerance)
             << '\n';
      }
      text << "leader_gap_mean " << csv::format_number(report.leader_gap_mean) << "\nleader_gap_max "
           << csv::format_number(report.leader_gap_max) << "\ncorner_dominated " << report.corner_dominated
           << "\nseconds " << report.seconds << '\n';
      emit(c, out, [&](std::ostream& o) { o << text.str(); });
      metadata(c, err, "verify");
      err << '\n';
      return report.passed() ? kSuccess : kVerificationFailed;
    }
  }
  return kInvalidInput;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = parse_args(argc, argv);
    return execute(config, out, err);
  } catch (const CLI::CallForHelp&) {
    CLI::App app{"Two-sided cloud data-market simulator", "tsm"};
    Bindings b;
    build_app(app, b);
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace tsm::cli
