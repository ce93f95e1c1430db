// hjrl: command-line driver for the reachability / fitted-value experiments.
//
//   hjrl solve-pde|stage1|train-rl|compare|properties --config <path> --out <dir> [--seed N]
//
// HJRL_THREADS caps the worker count (0 or unset = all cores).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hjrl/config.hpp"
#include "hjrl/error.hpp"
#include "hjrl/experiments.hpp"
#include "hjrl/train.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi reachability and fitted-value RL experiments"};
  app.set_version_flag("--version", hjrl::tool_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string pde_path;
  std::string net_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "Override the config seed");
  };

  auto* solve = app.add_subcommand("solve-pde", "Stationary discounted semi-Lagrangian solve");
  auto* stage1 = app.add_subcommand("stage1", "Travel-cost vs reach-cost BRT comparison");
  auto* train = app.add_subcommand("train-rl", "Fitted-value TD training of the sine network");
  auto* compare = app.add_subcommand("compare", "Error statistics between PDE and network");
  auto* props = app.add_subcommand("properties", "Contraction / monotonicity / consistency / gradient suites");
  for (auto* cmd : {solve, stage1, train, compare, props}) {
    add_common(cmd);
  }
  compare->add_option("--pde", pde_path, "PDE value field (default <out>/value.field)");
  compare->add_option("--net", net_path, "Network checkpoint (default <out>/net.ckpt)");

  CLI11_PARSE(app, argc, argv);

  try {
    hjrl::ExperimentConfig cfg =
        config_path.empty() ? hjrl::ExperimentConfig{} : hjrl::load_config(config_path);
    if (seed) {
      cfg.seed = *seed;
    }
    const fs::path out(out_dir);

    hjrl::CommandOutcome outcome;
    std::string name;
    if (solve->parsed()) {
      name = "solve-pde";
      outcome = hjrl::cmd_solve_pde(cfg, out);
    } else if (stage1->parsed()) {
      name = "stage1";
      outcome = hjrl::cmd_stage1(cfg, out);
    } else if (train->parsed()) {
      name = "train-rl";
      outcome = hjrl::cmd_train_rl(cfg, out);
    } else if (compare->parsed()) {
      name = "compare";
      const fs::path pde = pde_path.empty() ? out / "value.field" : fs::path(pde_path);
      const fs::path net = net_path.empty() ? out / "net.ckpt" : fs::path(net_path);
      outcome = hjrl::cmd_compare(cfg, out, pde, net);
    } else {
      name = "properties";
      outcome = hjrl::cmd_properties(cfg, out);
    }
    hjrl::write_manifest(cfg, name, outcome, out);

    for (const auto& [key, value] : outcome.summary) {
      std::cout << key << " = " << value << '\n';
    }
    for (const auto& [stage, secs] : outcome.stage_seconds) {
      std::cout << "time." << stage << " = " << secs << " s\n";
    }
    return outcome.exit_code;
  } catch (const hjrl::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const hjrl::TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
