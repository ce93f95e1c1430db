#include "hjrl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hjrl/bellman_mdp.hpp"
#include "hjrl/error.hpp"
#include "hjrl/hjb_solver.hpp"
#include "hjrl/properties.hpp"
#include "hjrl/reachability.hpp"
#include "hjrl/siren.hpp"
#include "hjrl/train.hpp"

namespace fs = std::filesystem;

namespace hjrl {

namespace {

// A zero cost collapses the value range to a point; keep the graymap valid.
void write_graymap(const ScalarField& field, double lo, double hi, const fs::path& path) {
  write_pgm(field, lo, hi > lo ? hi : lo + 1.0, path);
}

class StageTimer {
 public:
  StageTimer(CommandOutcome& outcome, std::string name)
      : outcome_(outcome), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    outcome_.stage_seconds.emplace_back(name_, dt.count());
  }

 private:
  CommandOutcome& outcome_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::ofstream open_out(const fs::path& path, CommandOutcome& outcome) {
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  outcome.files.push_back(path);
  return f;
}

void add_summary(CommandOutcome& o, std::string key, double value) {
  o.summary.emplace_back(std::move(key), format_double(value));
}

void add_summary(CommandOutcome& o, std::string key, std::size_t value) {
  o.summary.emplace_back(std::move(key), std::to_string(value));
}

void compare_row(std::ostream& csv, const std::string& name, const MaskComparison& cmp,
                 int band) {
  csv << name << ',' << cmp.agreements << ',' << cmp.disagreements << ',' << cmp.out_of_band
      << ',' << band << '\n';
}

}  // namespace

std::string tool_version() { return "hjrl 0.1.0"; }

CommandOutcome cmd_solve_pde(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  CommandOutcome outcome;
  const Grid2 grid = cfg.stage2_roi.grid();
  const auto dyn = cfg.dynamics(cfg.stage2_roi);
  const TravelCost cost = cfg.cost();
  const SweepConfig sweep = cfg.sweep();

  ValueSolution sol = [&] {
    StageTimer t(outcome, "solve");
    return solve_stationary(sweep, dyn, cost, grid);
  }();

  write_field(sol.field, out / "value.field");
  outcome.files.push_back(out / "value.field");
  {
    auto csv = open_out(out / "convergence.csv", outcome);
    csv << "iter,delta\n";
    for (std::size_t k = 0; k < sol.deltas.size(); ++k) {
      csv << k + 1 << ',' << format_double(sol.deltas[k]) << '\n';
    }
  }
  const ValueRange range = value_range(cost, sweep.disc);
  write_graymap(sol.field, range.lo, range.hi, out / "value.pgm");
  outcome.files.push_back(out / "value.pgm");

  add_summary(outcome, "iterations", static_cast<std::size_t>(sol.iterations));
  add_summary(outcome, "final_delta", sol.final_delta);
  add_summary(outcome, "value_min", sol.field.min());
  add_summary(outcome, "value_max", sol.field.max());
  outcome.summary.emplace_back("converged", sol.converged ? "true" : "false");
  outcome.exit_code = sol.converged ? 0 : 1;
  return outcome;
}

CommandOutcome cmd_stage1(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  CommandOutcome outcome;
  const Grid2 grid = cfg.stage1_roi.grid();
  const auto dyn = cfg.dynamics(cfg.stage1_roi);
  const TravelCost cost = cfg.cost();
  const Horizon horizon = make_horizon(cfg.horizon);

  const SweepConfig undiscounted{make_discount(0.0, cfg.dt), cfg.tol, cfg.max_iters};
  const SweepConfig discounted{make_discount(cfg.rate, cfg.dt), cfg.tol, cfg.max_iters};

  ScalarField travel = [&] {
    StageTimer t(outcome, "travel_solve");
    return solve_travel_finite_horizon(undiscounted, dyn, cost, grid, horizon).final_slice();
  }();
  ScalarField travel_disc = [&] {
    StageTimer t(outcome, "travel_solve_discounted");
    return solve_travel_finite_horizon(discounted, dyn, cost, grid, horizon).final_slice();
  }();
  ScalarField reach = [&] {
    StageTimer t(outcome, "reach_solve");
    return solve_reach_min_over_time(dyn, grid, horizon, cfg.dt, target_signed_distance(cost))
        .final_slice();
  }();

  for (const auto& [name, field] : {std::pair<const char*, const ScalarField*>{"stage1_travel.field", &travel},
                                    {"stage1_travel_discounted.field", &travel_disc},
                                    {"stage1_reach.field", &reach}}) {
    write_field(*field, out / name);
    outcome.files.push_back(out / name);
  }

  const BrtMask travel_mask = extract_brt(travel, cfg.brt_threshold);
  const BrtMask disc_mask = extract_brt(travel_disc, cfg.brt_threshold);
  BrtMask reach_mask{grid, std::vector<bool>(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    reach_mask.inside[k] = reach[k] < 0.0;
  }
  write_pbm(travel_mask, out / "stage1_travel_mask.pbm");
  write_pbm(disc_mask, out / "stage1_travel_discounted_mask.pbm");
  write_pbm(reach_mask, out / "stage1_reach_mask.pbm");
  outcome.files.push_back(out / "stage1_travel_mask.pbm");
  outcome.files.push_back(out / "stage1_travel_discounted_mask.pbm");
  outcome.files.push_back(out / "stage1_reach_mask.pbm");

  // Masks are compared on the coarser grid, reading solver values at the
  // coincident nodes; band_cells counts coarse cells.
  const Grid2 coarse(grid.x_min(), grid.x_max(), grid.y_min(), grid.y_max(), cfg.compare_nx,
                     cfg.compare_ny);
  const BrtMask travel_c = extract_brt(subsample(travel, coarse), cfg.brt_threshold);
  const BrtMask disc_c = extract_brt(subsample(travel_disc, coarse), cfg.brt_threshold);
  const ScalarField reach_sub = subsample(reach, coarse);
  BrtMask reach_c{coarse, std::vector<bool>(coarse.size())};
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    reach_c.inside[k] = reach_sub[k] < 0.0;
  }

  const MaskComparison vs_reach = compare_masks(travel_c, reach_c, cfg.band_cells);
  const MaskComparison vs_disc = compare_masks(travel_c, disc_c, cfg.band_cells);
  std::optional<MaskComparison> vs_oracle;
  if (cfg.run_oracle) {
    const int steps = horizon_steps(horizon, cfg.dt);
    BrtMask oracle = [&] {
      StageTimer t(outcome, "oracle");
      return oracle_mask(coarse, cost, OracleConfig{steps, cfg.dt, cfg.max_switches}, dyn);
    }();
    write_pbm(oracle, out / "stage1_oracle_mask.pbm");
    outcome.files.push_back(out / "stage1_oracle_mask.pbm");
    vs_oracle = compare_masks(travel_c, oracle, cfg.band_cells);
    write_disagreements_csv(*vs_oracle, coarse, out / "stage1_oracle_disagreements.csv");
    outcome.files.push_back(out / "stage1_oracle_disagreements.csv");
  }
  write_disagreements_csv(vs_disc, coarse, out / "stage1_discount_disagreements.csv");
  outcome.files.push_back(out / "stage1_discount_disagreements.csv");
  {
    auto csv = open_out(out / "stage1_compare.csv", outcome);
    csv << "pair,agreements,disagreements,out_of_band,band_cells\n";
    compare_row(csv, "travel_vs_reach", vs_reach, cfg.band_cells);
    compare_row(csv, "travel_vs_discounted", vs_disc, cfg.band_cells);
    if (vs_oracle) {
      compare_row(csv, "travel_vs_oracle", *vs_oracle, cfg.band_cells);
    }
  }

  // Travel-cost values on the reach-cost zero sublevel.
  std::vector<double> inside;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (reach_mask.inside[k]) {
      inside.push_back(travel[k]);
    }
  }
  {
    auto csv = open_out(out / "stage1_histogram.csv", outcome);
    csv << "bin_lo,bin_hi,count\n";
    if (!inside.empty()) {
      constexpr int bins = 20;
      const double lo = *std::min_element(inside.begin(), inside.end());
      const double hi = *std::max_element(inside.begin(), inside.end());
      const double width = hi > lo ? (hi - lo) / bins : 1.0;
      std::vector<std::size_t> counts(bins, 0);
      for (double v : inside) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
        ++counts[static_cast<std::size_t>(b)];
      }
      for (int b = 0; b < bins; ++b) {
        csv << format_double(lo + b * width) << ',' << format_double(lo + (b + 1) * width) << ','
            << counts[static_cast<std::size_t>(b)] << '\n';
      }
    }
  }

  add_summary(outcome, "travel_mask_nodes", travel_mask.count());
  add_summary(outcome, "reach_mask_nodes", reach_mask.count());
  add_summary(outcome, "travel_vs_reach_out_of_band", vs_reach.out_of_band);
  add_summary(outcome, "travel_vs_discounted_out_of_band", vs_disc.out_of_band);
  if (!inside.empty()) {
    add_summary(outcome, "travel_max_inside_reach", *std::max_element(inside.begin(), inside.end()));
  }
  bool ok = vs_disc.out_of_band == 0;
  if (vs_oracle) {
    add_summary(outcome, "travel_vs_oracle_out_of_band", vs_oracle->out_of_band);
    ok = ok && vs_oracle->out_of_band == 0;
  }
  outcome.exit_code = ok ? 0 : 1;
  return outcome;
}

CommandOutcome cmd_train_rl(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  CommandOutcome outcome;
  const Grid2 roi = cfg.stage2_roi.grid();
  const auto dyn = cfg.dynamics(cfg.stage2_roi);
  const TravelCost cost = cfg.cost();
  const DiscountConfig disc = cfg.discount();

  TrainResult result = [&] {
    StageTimer t(outcome, "train");
    return train(cfg.train_config(), cost, dyn, disc, roi);
  }();

  write_checkpoint(result.net, out / "net.ckpt");
  outcome.files.push_back(out / "net.ckpt");
  {
    auto csv = open_out(out / "loss.csv", outcome);
    csv << "step,loss\n";
    for (std::size_t k = 0; k < result.log.loss.size(); ++k) {
      csv << k + 1 << ',' << format_double(result.log.loss[k]) << '\n';
    }
  }
  {
    auto csv = open_out(out / "probe.csv", outcome);
    csv << "step,bellman_residual\n";
    for (std::size_t k = 0; k < result.log.probe_steps.size(); ++k) {
      csv << result.log.probe_steps[k] << ',' << format_double(result.log.probe_residual[k])
          << '\n';
    }
  }
  const ValueRange range = value_range(cost, disc);
  const ScalarField pred = clamp_field(predict_field(result.net, roi), range.lo, range.hi);
  write_field(pred, out / "prediction.field");
  outcome.files.push_back(out / "prediction.field");
  add_summary(outcome, "final_loss", result.log.loss.back());
  if (!result.log.probe_residual.empty()) {
    add_summary(outcome, "final_probe_residual", result.log.probe_residual.back());
  }
  return outcome;
}

CommandOutcome cmd_compare(const ExperimentConfig& cfg, const fs::path& out,
                           const fs::path& pde_field, const fs::path& checkpoint) {
  fs::create_directories(out);
  CommandOutcome outcome;
  const ScalarField pde = read_field(pde_field);
  const SirenNet net = read_checkpoint(checkpoint);
  require(pde.grid() == cfg.stage2_roi.grid(),
          "PDE field grid does not match the configured Stage II grid");

  const ValueRange range = value_range(cfg.cost(), cfg.discount());
  const ScalarField v = clamp_field(pde, range.lo, range.hi);
  const ScalarField w = clamp_field(predict_field(net, pde.grid()), range.lo, range.hi);
  const FieldStats stats = sup_diff(w, v);

  std::vector<double> err(v.grid().size());
  for (std::size_t k = 0; k < err.size(); ++k) {
    err[k] = std::abs(w[k] - v[k]);
  }
  const ScalarField error(v.grid(), std::move(err));
  write_field(error, out / "error.field");
  outcome.files.push_back(out / "error.field");
  {
    auto csv = open_out(out / "stats.csv", outcome);
    csv << "max_abs,mean_abs,argmax_x1,argmax_x2\n"
        << format_double(stats.max_abs) << ',' << format_double(stats.mean_abs) << ','
        << format_double(v.grid().x_at(stats.argmax_i)) << ','
        << format_double(v.grid().y_at(stats.argmax_j)) << '\n';
  }
  write_graymap(v, range.lo, range.hi, out / "pde.pgm");
  write_graymap(w, range.lo, range.hi, out / "net.pgm");
  write_graymap(error, 0.0, range.hi - range.lo, out / "error.pgm");
  for (const char* name : {"pde.pgm", "net.pgm", "error.pgm"}) {
    outcome.files.push_back(out / name);
  }
  add_summary(outcome, "max_abs", stats.max_abs);
  add_summary(outcome, "mean_abs", stats.mean_abs);
  return outcome;
}

CommandOutcome cmd_properties(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  CommandOutcome outcome;
  const Grid2 grid = cfg.stage2_roi.grid();
  const auto dyn = cfg.dynamics(cfg.stage2_roi);
  const TravelCost cost = cfg.cost();
  bool ok = true;

  {
    StageTimer t(outcome, "contraction");
    const auto trials =
        contraction_suite(grid, dyn, cost, {0.5, 1.0, 2.0}, {0.025, 0.05, 0.1}, 50, cfg.seed);
    auto csv = open_out(out / "properties_contraction.csv", outcome);
    csv << "lambda,sigma,trial,lhs,bound,ok\n";
    std::size_t failures = 0;
    for (const auto& tr : trials) {
      csv << format_double(tr.lambda) << ',' << format_double(tr.sigma) << ',' << tr.trial << ','
          << format_double(tr.lhs) << ',' << format_double(tr.bound) << ',' << tr.ok << '\n';
      failures += tr.ok ? 0 : 1;
    }
    add_summary(outcome, "contraction_failures", failures);
    ok = ok && failures == 0;
  }
  {
    StageTimer t(outcome, "monotonicity");
    const OneStepMdp mdp{dyn, cost, cfg.discount(), make_horizon(cfg.horizon)};
    const auto trials = monotonicity_suite(grid, mdp, 50, cfg.seed + 1);
    auto csv = open_out(out / "properties_monotone.csv", outcome);
    csv << "trial,violations\n";
    std::size_t violations = 0;
    for (const auto& tr : trials) {
      csv << tr.trial << ',' << tr.violations << '\n';
      violations += tr.violations;
    }
    add_summary(outcome, "monotone_violations", violations);
    ok = ok && violations == 0;
  }
  {
    StageTimer t(outcome, "consistency");
    const OneStepMdp mdp{dyn, cost, make_discount(cfg.rate > 0.0 ? cfg.rate : 1.0, 0.1),
                         make_horizon(cfg.horizon)};
    const auto res =
        residual_consistency_suite(mdp, {0.1, 0.05, 0.025, 0.0125}, 20, 0.35, 0.65, cfg.seed + 2);
    auto csv = open_out(out / "properties_consistency.csv", outcome);
    csv << "sigma,tau,x1,x2,bellman_res,hjb_res,gap\n";
    for (const auto& r : res.reports) {
      csv << format_double(r.sigma) << ',' << format_double(r.tau) << ',' << format_double(r.x[0])
          << ',' << format_double(r.x[1]) << ',' << format_double(r.bellman_residual) << ','
          << format_double(r.hjb_residual) << ',' << format_double(r.gap) << '\n';
    }
    add_summary(outcome, "consistency_onset_sigma", res.sigmas[res.onset]);
    add_summary(outcome, "consistency_ratio_min", res.ratio_min);
    add_summary(outcome, "consistency_ratio_max", res.ratio_max);
    ok = ok && res.ok;
  }
  {
    StageTimer t(outcome, "gradient");
    const auto trials =
        gradient_suite(20, 5, cfg.train.width, cfg.train.omega0, 1e-6, 1e-4, cfg.seed + 3);
    auto csv = open_out(out / "properties_gradient.csv", outcome);
    csv << "net,probe,max_rel_error\n";
    double worst = 0.0;
    for (const auto& tr : trials) {
      csv << tr.net << ',' << tr.probe << ',' << format_double(tr.max_rel_error) << '\n';
      worst = std::max(worst, tr.max_rel_error);
    }
    add_summary(outcome, "gradient_max_rel_error", worst);
    ok = ok && worst <= 1e-5;
  }
  outcome.exit_code = ok ? 0 : 1;
  return outcome;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const CommandOutcome& outcome, const fs::path& out) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["tool_version"] = tool_version();
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["exit_code"] = outcome.exit_code;
  j["files"] = nlohmann::json::array();
  for (const auto& f : outcome.files) {
    j["files"].push_back(f.filename().string());
  }
  j["stage_seconds"] = nlohmann::ordered_json::object();
  for (const auto& [name, secs] : outcome.stage_seconds) {
    j["stage_seconds"][name] = secs;
  }
  j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outcome.summary) {
    j["summary"][k] = v;
  }
  std::ofstream f(out / "manifest.json");
  f << j.dump(2) << '\n';
  std::ofstream c(out / "config.resolved.ini");
  c << serialize_config(cfg);
}

}  // namespace hjrl
