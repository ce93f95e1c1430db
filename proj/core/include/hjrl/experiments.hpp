#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjrl/config.hpp"

namespace hjrl {

/// What a command produced. exit_code is 0 on success, 1 when a checked
/// property fails or a solve does not converge.
struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::pair<std::string, std::string>> summary;
};

/// Stationary discounted solve on the Stage II region: value.field,
/// convergence.csv (iter,delta), value.pgm.
CommandOutcome cmd_solve_pde(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Travel-cost vs reach-cost vs brute-force oracle on the Stage I region.
CommandOutcome cmd_stage1(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Fitted-value TD training: net.ckpt, loss.csv, probe.csv, prediction.field.
CommandOutcome cmd_train_rl(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Error statistics between a PDE field and a network checkpoint, both
/// clamped to the value range: error.field, stats.csv, pde/net/error .pgm.
CommandOutcome cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& out,
                           const std::filesystem::path& pde_field,
                           const std::filesystem::path& checkpoint);

/// Contraction, monotonicity, residual-consistency and gradient suites.
CommandOutcome cmd_properties(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// manifest.json: command, config hash, seed, tool version, files, timings.
void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const CommandOutcome& outcome, const std::filesystem::path& out);

std::string tool_version();

}  // namespace hjrl
