// Command-line driver for the lpmrl experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpmrl/harness/config.hpp"
#include "lpmrl/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace lpmrl;
using namespace lpmrl::harness;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "YAML configuration file");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--trials", o.trials, "number of independent trials");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--override", o.overrides, "key=value, applied after the config file")->allow_extra_args(false);
}

RunConfig resolve(Experiment e, const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("base_seed=" + std::to_string(*o.seed));
  if (o.trials) overrides.push_back("trials=" + std::to_string(*o.trials));
  RunConfig c = load_config(e, o.config_path, overrides);
  if (!o.out.empty()) {
    c.output = o.out;
  } else if (c.output.empty()) {
    const char* env = std::getenv("LPMRL_OUT_DIR");
    c.output = env != nullptr && *env != '\0' ? env : "out";
  }
  return c;
}

void save_effective_config(const RunConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / (to_string(c.experiment) + "_config.yaml")) << serialize(c);
}

int run(Experiment e, const CommonOptions& o) {
  const RunConfig c = resolve(e, o);
  const fs::path dir = c.output;
  save_effective_config(c, dir);
  bool diverged = false;
  switch (e) {
    case Experiment::landscape: {
      const auto r = run_landscape(c);
      write_landscape(r, dir / "landscape.csv");
      std::cout << "landscape: " << r.points.size() << " grid points -> " << (dir / "landscape.csv").string() << "\n";
      break;
    }
    case Experiment::bandit: {
      const auto curves = run_bandit_suite(c);
      write_bandit(curves, dir / "bandit.csv");
      for (const auto& cv : curves) {
        const auto& last = cv.mean_probs.empty() ? std::array<double, 3>{} : cv.mean_probs.back();
        std::cout << cv.objective.name << ": P(A)=" << last[0] << " P(B)=" << last[1] << " P(C)=" << last[2]
                  << " crossing=" << cv.crossing << "\n";
        diverged = diverged || cv.diverged;
      }
      break;
    }
    case Experiment::portfolio: {
      const auto r = run_frontier(c);
      write_frontier(r, dir, c.log_wall_clock);
      for (const auto& row : r.rows) {
        std::cout << "nu=" << nu_label(row.nu) << " trial=" << row.trial << " mean=" << row.mean_return
                  << " lpm=" << row.lpm_return << " min=" << row.min_return << (row.feasible ? "" : " infeasible")
                  << "\n";
        diverged = diverged || row.diverged;
      }
      std::cout << "spearman(nu, mean)=" << r.spearman_mean << " spearman(nu, lpm)=" << r.spearman_lpm << "\n";
      break;
    }
    case Experiment::consumption: {
      const auto r = run_consumption(c);
      write_consumption(r, dir, c.log_wall_clock);
      for (const auto& cr : r.runs) {
        std::cout << "nu=" << nu_label(cr.run.nu) << " trial=" << cr.run.trial << " J_R=" << cr.final_j_r
                  << " J_C=" << cr.final_j_c << " lambda=" << cr.run.log.final_lambda << "\n";
        diverged = diverged || cr.run.log.diverged;
      }
      break;
    }
    case Experiment::predict: {
      const auto rows = run_predict(c);
      write_predict(rows, dir / "predict.csv");
      std::size_t held = 0;
      for (const auto& r : rows) held += r.holds ? 1 : 0;
      std::cout << "bound holds at " << held << " of " << rows.size() << " (state, action, theta) points\n";
      break;
    }
  }
  if (diverged) {
    std::cerr << "error: at least one run diverged; see the diverged column in the output\n";
    return 2;
  }
  return 0;
}

int validate_only(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto e = peek_experiment(text, path);
  if (!e) throw ConfigError("missing 'experiment' key", 0, path);
  const RunConfig c = load_config(*e, path);
  std::cout << serialize(c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive actor-critic experiments"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, Experiment>> commands{{"landscape", Experiment::landscape},
                                                                  {"bandit", Experiment::bandit},
                                                                  {"portfolio", Experiment::portfolio},
                                                                  {"consumption", Experiment::consumption},
                                                                  {"predict", Experiment::predict}};
  const std::vector<std::string> descriptions{"exact and Monte-Carlo moment surfaces of the toy MDP",
                                              "three-armed bandit under three objectives",
                                              "constrained portfolio sweep over nu",
                                              "constrained consumption sweep over nu",
                                              "TD LPM proxy against the Monte-Carlo oracle on the toy MDP"};
  std::vector<CommonOptions> options(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    add_common(sub, options[i]);
    subs.push_back(sub);
  }
  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "parse and check a configuration file");
  validate_cmd->add_option("--config", validate_path, "YAML configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (validate_cmd->parsed()) return validate_only(validate_path);
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (subs[i]->parsed()) return run(commands[i].second, options[i]);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid setting: " << e.what() << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
