// Command-line front end: simulate, rates, couple, verify, dump-paths.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdmp/config.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> replicas;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "YAML run description")->required();
  cmd->add_option("--seed", flags.seed, "override the configured seed");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--replicas", flags.replicas, "override the replica count");
  cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

pdmp::RunConfig load(const CommonFlags& flags) {
  pdmp::RunConfig cfg = pdmp::load_config(flags.config);
  if (flags.seed) cfg.experiment.seed = *flags.seed;
  if (flags.out) cfg.outputs.directory = *flags.out;
  if (flags.replicas) {
    if (*flags.replicas < 1) throw pdmp::ConfigError("--replicas must be >= 1");
    cfg.experiment.replicas = *flags.replicas;
  }
  return cfg;
}

void note(const CommonFlags& flags, const std::string& msg) {
  if (!flags.quiet) std::cerr << msg << '\n';
}

int cmd_simulate(const CommonFlags& flags) {
  const pdmp::RunConfig cfg = load(flags);
  const std::filesystem::path dir = cfg.outputs.directory;
  pdmp::write_marginals(pdmp::run_simulation(cfg), dir / "marginals.csv");
  if (cfg.outputs.paths) pdmp::dump_paths(cfg, dir / "paths");
  note(flags, "wrote " + (dir / "marginals.csv").string());
  return 0;
}

int cmd_rates(const CommonFlags& flags) {
  const pdmp::RunConfig cfg = load(flags);
  const std::filesystem::path dir = cfg.outputs.directory;
  const pdmp::RateReport report = pdmp::compute_rates(cfg.model.model(), cfg.rates);
  pdmp::write_rate_report(report, cfg, dir / "rate_report.json");
  note(flags, "wrote " + (dir / "rate_report.json").string());
  return 0;
}

pdmp::CoupleResult couple_and_write(const CommonFlags& flags, const pdmp::RunConfig& cfg) {
  const std::filesystem::path dir = cfg.outputs.directory;
  pdmp::CoupleResult result = pdmp::run_couple(cfg);
  pdmp::write_rate_report(result.rates, cfg, dir / "rate_report.json");
  pdmp::write_curves(result.tv, dir / "curves_tv.csv");
  pdmp::write_curves(result.w1, dir / "curves_w1.csv");
  pdmp::write_coupling_reports(result.final_reports, dir / "coupling_reports.csv");
  if (cfg.outputs.paths) pdmp::dump_paths(cfg, dir / "paths");
  note(flags, "wrote rate_report.json, curves_tv.csv, curves_w1.csv, coupling_reports.csv to " +
                  dir.string());
  return result;
}

int cmd_couple(const CommonFlags& flags) {
  couple_and_write(flags, load(flags));
  return 0;
}

int cmd_verify(const CommonFlags& flags) {
  const pdmp::CoupleResult result = couple_and_write(flags, load(flags));
  bool ok = true;
  for (const auto& line : pdmp::verify_dominance(result)) {
    ok = ok && line.pass;
    if (!flags.quiet || !line.pass) {
      std::cout << (line.pass ? "PASS " : "FAIL ") << line.name << ": " << line.detail << '\n';
    }
  }
  std::cout << (ok ? "verify: all dominance checks passed" : "verify: dominance violated") << '\n';
  return ok ? 0 : 1;
}

int cmd_dump_paths(const CommonFlags& flags) {
  const pdmp::RunConfig cfg = load(flags);
  const std::filesystem::path dir = std::filesystem::path(cfg.outputs.directory) / "paths";
  pdmp::dump_paths(cfg, dir);
  note(flags, "wrote path files to " + dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate a contaminant PDMP, couple two copies and compare with convergence bounds"};
  app.require_subcommand(1);
  CommonFlags flags;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const CommonFlags&);
  };
  const Entry entries[] = {
      {"simulate", "simulate single paths and write marginal summaries", cmd_simulate},
      {"rates", "compute the rate report without simulation", cmd_rates},
      {"couple", "run the couplings and write curves and reports", cmd_couple},
      {"verify", "run the couplings and check bound dominance (exit 1 on failure)", cmd_verify},
      {"dump-paths", "write raw trajectories of the first replicas", cmd_dump_paths},
  };
  int (*selected)(const CommonFlags&) = nullptr;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, flags);
    sub->callback([&selected, run = e.run] { selected = run; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return selected(flags);
  } catch (const pdmp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pdmp::HypothesisError& e) {
    std::cerr << "assumption " << e.assumption() << " violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
