#include "hjrl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>

#include "hjrl/error.hpp"

namespace hjrl {

ControlledDynamics ExperimentConfig::dynamics(const RoiConfig& roi) const {
  return double_integrator(a_max, std::max(std::abs(roi.y_min), std::abs(roi.y_max)));
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v, std::size_t line) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ParseError("invalid number '" + v + "' for key '" + key + "'", line);
  }
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v, std::size_t line) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ParseError("invalid integer '" + v + "' for key '" + key + "'", line);
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v, std::size_t line) {
  if (v == "true" || v == "1") {
    return true;
  }
  if (v == "false" || v == "0") {
    return false;
  }
  throw ParseError("invalid boolean '" + v + "' for key '" + key + "'", line);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&,
                                  std::size_t)>;

#define HJRL_DOUBLE(field) \
  [](ExperimentConfig& c, const std::string& k, const std::string& v, std::size_t l) { c.field = to_double(k, v, l); }
#define HJRL_INT(field, type) \
  [](ExperimentConfig& c, const std::string& k, const std::string& v, std::size_t l) { c.field = to_int<type>(k, v, l); }
#define HJRL_BOOL(field) \
  [](ExperimentConfig& c, const std::string& k, const std::string& v, std::size_t l) { c.field = to_bool(k, v, l); }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", HJRL_INT(seed, std::uint64_t)},
      {"dynamics.a_max", HJRL_DOUBLE(a_max)},
      {"cost.radius", HJRL_DOUBLE(radius)},
      {"cost.scale", HJRL_DOUBLE(scale)},
      {"discount.rate", HJRL_DOUBLE(rate)},
      {"discount.dt", HJRL_DOUBLE(dt)},
      {"sweep.tol", HJRL_DOUBLE(tol)},
      {"sweep.max_iters", HJRL_INT(max_iters, int)},
      {"stage1.x_min", HJRL_DOUBLE(stage1_roi.x_min)},
      {"stage1.x_max", HJRL_DOUBLE(stage1_roi.x_max)},
      {"stage1.y_min", HJRL_DOUBLE(stage1_roi.y_min)},
      {"stage1.y_max", HJRL_DOUBLE(stage1_roi.y_max)},
      {"stage1.nx", HJRL_INT(stage1_roi.nx, std::size_t)},
      {"stage1.ny", HJRL_INT(stage1_roi.ny, std::size_t)},
      {"stage1.horizon", HJRL_DOUBLE(horizon)},
      {"stage1.threshold", HJRL_DOUBLE(brt_threshold)},
      {"stage1.band_cells", HJRL_INT(band_cells, int)},
      {"stage1.max_switches", HJRL_INT(max_switches, int)},
      {"stage1.oracle", HJRL_BOOL(run_oracle)},
      {"stage1.compare_nx", HJRL_INT(compare_nx, std::size_t)},
      {"stage1.compare_ny", HJRL_INT(compare_ny, std::size_t)},
      {"stage2.x_min", HJRL_DOUBLE(stage2_roi.x_min)},
      {"stage2.x_max", HJRL_DOUBLE(stage2_roi.x_max)},
      {"stage2.y_min", HJRL_DOUBLE(stage2_roi.y_min)},
      {"stage2.y_max", HJRL_DOUBLE(stage2_roi.y_max)},
      {"stage2.nx", HJRL_INT(stage2_roi.nx, std::size_t)},
      {"stage2.ny", HJRL_INT(stage2_roi.ny, std::size_t)},
      {"train.batch_size", HJRL_INT(train.batch_size, int)},
      {"train.steps", HJRL_INT(train.steps, int)},
      {"train.learning_rate", HJRL_DOUBLE(train.learning_rate)},
      {"train.target_refresh", HJRL_INT(train.target_refresh, int)},
      {"train.optimizer",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, std::size_t l) {
         try {
           c.train.optimizer = parse_optimizer(v);
         } catch (const ContractViolation&) {
           throw ParseError("invalid optimizer '" + v + "' for key '" + k + "'", l);
         }
       }},
      {"train.width", HJRL_INT(train.width, int)},
      {"train.omega0", HJRL_DOUBLE(train.omega0)},
      {"train.normalize_inputs", HJRL_BOOL(train.normalize_inputs)},
      {"train.probe_every", HJRL_INT(train.probe_every, int)},
      {"train.probe_count", HJRL_INT(train.probe_count, int)},
      {"train.divergence_factor", HJRL_DOUBLE(train.divergence_factor)},
  };
  return table;
}

#undef HJRL_DOUBLE
#undef HJRL_INT
#undef HJRL_BOOL

void validate(const ExperimentConfig& c) {
  auto check = [](bool ok, const char* key, const char* what) {
    if (!ok) {
      throw ParseError(std::string("key '") + key + "' " + what, 0);
    }
  };
  check(c.a_max > 0.0, "dynamics.a_max", "must be positive");
  check(c.radius > 0.0, "cost.radius", "must be positive");
  check(c.scale >= 0.0, "cost.scale", "must be nonnegative");
  check(c.rate >= 0.0, "discount.rate", "must be nonnegative");
  check(c.dt > 0.0, "discount.dt", "must be positive");
  check(c.tol > 0.0, "sweep.tol", "must be positive");
  check(c.max_iters > 0, "sweep.max_iters", "must be positive");
  check(c.horizon > 0.0, "stage1.horizon", "must be positive");
  check(c.brt_threshold < 0.0, "stage1.threshold", "must be negative");
  check(c.band_cells >= 0, "stage1.band_cells", "must be nonnegative");
  check(c.max_switches >= 0 && c.max_switches <= 3, "stage1.max_switches", "must be in [0, 3]");
  for (const auto* roi : {&c.stage1_roi, &c.stage2_roi}) {
    const char* name = roi == &c.stage1_roi ? "stage1" : "stage2";
    if (!(roi->x_min < roi->x_max && roi->y_min < roi->y_max && roi->nx >= 2 && roi->ny >= 2)) {
      throw ParseError(std::string("section '") + name + "' has an invalid region", 0);
    }
  }
  auto nests = [](std::size_t fine, std::size_t coarse) {
    return coarse >= 2 && coarse <= fine && (fine - 1) % (coarse - 1) == 0;
  };
  check(nests(c.stage1_roi.nx, c.compare_nx), "stage1.compare_nx",
        "must be >= 2 with (nx - 1) divisible by (compare_nx - 1)");
  check(nests(c.stage1_roi.ny, c.compare_ny), "stage1.compare_ny",
        "must be >= 2 with (ny - 1) divisible by (compare_ny - 1)");
  check(c.train.batch_size > 0, "train.batch_size", "must be positive");
  check(c.train.steps > 0, "train.steps", "must be positive");
  check(c.train.learning_rate > 0.0, "train.learning_rate", "must be positive");
  check(c.train.target_refresh > 0, "train.target_refresh", "must be positive");
  check(c.train.width > 0, "train.width", "must be positive");
  check(c.train.omega0 > 0.0, "train.omega0", "must be positive");
  check(c.train.probe_every > 0, "train.probe_every", "must be positive");
  check(c.train.probe_count > 0, "train.probe_count", "must be positive");
  check(c.train.divergence_factor > 1.0, "train.divergence_factor", "must exceed 1");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("unterminated section header", lineno);
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", lineno);
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) {
      throw ParseError("unknown key '" + full + "'", lineno);
    }
    if (value.empty()) {
      throw ParseError("missing value for key '" + full + "'", lineno);
    }
    it->second(cfg, full, value, lineno);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config " + path.string());
  }
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  auto d = [](double v) { return format_double(v); };
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "seed = " << c.seed << "\n\n"
    << "[dynamics]\na_max = " << d(c.a_max) << "\n\n"
    << "[cost]\nradius = " << d(c.radius) << "\nscale = " << d(c.scale) << "\n\n"
    << "[discount]\nrate = " << d(c.rate) << "\ndt = " << d(c.dt) << "\n\n"
    << "[sweep]\ntol = " << d(c.tol) << "\nmax_iters = " << c.max_iters << "\n\n";
  auto roi = [&](const RoiConfig& r) {
    o << "x_min = " << d(r.x_min) << "\nx_max = " << d(r.x_max) << "\ny_min = " << d(r.y_min)
      << "\ny_max = " << d(r.y_max) << "\nnx = " << r.nx << "\nny = " << r.ny << '\n';
  };
  o << "[stage1]\n";
  roi(c.stage1_roi);
  o << "horizon = " << d(c.horizon) << "\nthreshold = " << d(c.brt_threshold)
    << "\nband_cells = " << c.band_cells << "\nmax_switches = " << c.max_switches
    << "\noracle = " << b(c.run_oracle) << "\ncompare_nx = " << c.compare_nx
    << "\ncompare_ny = " << c.compare_ny << "\n\n[stage2]\n";
  roi(c.stage2_roi);
  const TrainConfig& t = c.train;
  o << "\n[train]\nbatch_size = " << t.batch_size << "\nsteps = " << t.steps
    << "\nlearning_rate = " << d(t.learning_rate) << "\ntarget_refresh = " << t.target_refresh
    << "\noptimizer = " << to_string(t.optimizer) << "\nwidth = " << t.width
    << "\nomega0 = " << d(t.omega0) << "\nnormalize_inputs = " << b(t.normalize_inputs)
    << "\nprobe_every = " << t.probe_every << "\nprobe_count = " << t.probe_count
    << "\ndivergence_factor = " << d(t.divergence_factor) << '\n';
  return o.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

}  // namespace hjrl
