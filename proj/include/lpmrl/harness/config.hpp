#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "lpmrl/control.hpp"
#include "lpmrl/envs/bandit.hpp"
#include "lpmrl/envs/consumption.hpp"
#include "lpmrl/envs/portfolio.hpp"
#include "lpmrl/prediction.hpp"

namespace lpmrl::harness {

/// Configuration problem, optionally anchored to a line of the source file (1-based).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, int line = 0, std::string source = {})
      : std::runtime_error(format(message, line, source)), line_(line) {}

  int line() const { return line_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& source) {
    std::string out = source.empty() ? "config" : source;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
  }
  int line_ = 0;
};

enum class Experiment { bandit, portfolio, consumption, landscape, predict };

struct PolicySpec {
  int fourier_order = 3;
  double sigma_floor = 1e-3;
  double wealth_max = 4.0;
  // Added to the constant-feature weight of each Gaussian-Beta head at start.
  double init_mu_bias = 0.0;
  double init_sigma_bias = 0.0;
  double init_alpha_bias = 0.0;
  double init_beta_bias = 0.0;

  bool operator==(const PolicySpec&) const = default;
};

struct CriticSpec {
  double step_size = 0.005;
  double rho_step_size = 0.0;
  double discount = 1.0;
  double trace_decay = 0.0;
  bool bounded_step = false;

  bool operator==(const CriticSpec&) const = default;
};

struct TargetSpec {
  TargetKind kind = TargetKind::centralised;
  double tau = 0.0;
  int order = 1;
  // Mean-estimator step; 0 selects 1/n sample means where supported.
  double mean_step = 0.0;

  bool operator==(const TargetSpec&) const = default;
};

struct LagrangianSpec {
  double nu = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  double step_size = 0.001;
  LagrangeMode mode = LagrangeMode::adaptive;

  /// Infinite nu means no constraint: constant lambda = 0.
  LagrangianState state() const {
    if (std::isinf(nu)) return {0.0, nu, step_size, LagrangeMode::constant};
    return {lambda, nu, step_size, mode};
  }

  bool operator==(const LagrangianSpec&) const = default;
};

struct BanditSuiteSpec {
  std::size_t record_every = 100;
  double lambda_first_order = 2.0;
  double lambda_second_order = 1.0;

  bool operator==(const BanditSuiteSpec&) const = default;
};

struct LandscapeSpec {
  int resolution = 51;
  std::size_t rollouts = 1000;

  bool operator==(const LandscapeSpec&) const = default;
};

struct PredictSpec {
  int resolution = 5;
  std::size_t td_episodes = 200000;
  std::size_t mc_rollouts = 20000;

  bool operator==(const PredictSpec&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::bandit;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  std::string output;
  // 0 uses every hardware thread.
  std::size_t threads = 0;
  bool log_wall_clock = false;

  envs::BanditParams bandit;
  envs::PortfolioParams portfolio;
  envs::ConsumptionParams consumption;

  PolicySpec policy;
  CriticSpec critic;
  TargetSpec target;
  LagrangianSpec lagrangian;
  TrainingSchedule schedule;
  std::size_t smoothing_window = 100;
  std::size_t final_rollouts = 10000;

  std::vector<double> nu_values;
  BanditSuiteSpec bandit_suite;
  LandscapeSpec landscape;
  PredictSpec predict;

  bool operator==(const RunConfig&) const = default;
};

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::bandit: return "bandit";
    case Experiment::portfolio: return "portfolio";
    case Experiment::consumption: return "consumption";
    case Experiment::landscape: return "landscape";
    case Experiment::predict: return "predict";
  }
  return "bandit";
}

namespace detail {

inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  std::string t = text;
  if (t == ".inf" || t == "+.inf" || t == ".Inf" || t == "+inf") t = "inf";
  if (t == "-.inf" || t == "-.Inf") t = "-inf";
  double x = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || std::isnan(x)) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
  return x;
}

template <class T>
T parse_integer(const std::string& text) {
  T x{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  }
  return x;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "True" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "False" || text == "no" || text == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

inline std::string scalar(const YAML::Node& node) {
  if (!node.IsScalar()) throw std::invalid_argument("expected a scalar value");
  return node.Scalar();
}

inline int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

}  // namespace detail

/// One dotted configuration key with its reader and writer.
struct ConfigField {
  std::string key;
  std::function<void(RunConfig&, const YAML::Node&)> read;
  std::function<std::string(const RunConfig&)> write;
};

namespace detail {

template <class Get>
ConfigField real_field(std::string key, Get get) {
  return {std::move(key), [get](RunConfig& c, const YAML::Node& n) { get(c) = parse_double(scalar(n)); },
          [get](const RunConfig& c) { return format_double(get(const_cast<RunConfig&>(c))); }};
}

template <class Get>
ConfigField count_field(std::string key, Get get) {
  using T = std::remove_reference_t<decltype(get(std::declval<RunConfig&>()))>;
  return {std::move(key), [get](RunConfig& c, const YAML::Node& n) { get(c) = parse_integer<T>(scalar(n)); },
          [get](const RunConfig& c) { return std::to_string(get(const_cast<RunConfig&>(c))); }};
}

template <class Get>
ConfigField bool_field(std::string key, Get get) {
  return {std::move(key), [get](RunConfig& c, const YAML::Node& n) { get(c) = parse_bool(scalar(n)); },
          [get](const RunConfig& c) { return std::string(get(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class E, class Get>
ConfigField enum_field(std::string key, Get get, std::vector<std::pair<std::string, E>> names) {
  auto read = [get, names](RunConfig& c, const YAML::Node& n) {
    const std::string s = scalar(n);
    for (const auto& [name, value] : names) {
      if (name == s) {
        get(c) = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
    throw std::invalid_argument("unknown value '" + s + "' (expected one of: " + allowed + ")");
  };
  auto write = [get, names](const RunConfig& c) {
    const E v = get(const_cast<RunConfig&>(c));
    for (const auto& [name, value] : names) {
      if (value == v) return name;
    }
    return std::string();
  };
  return {std::move(key), read, write};
}

}  // namespace detail

/// Every recognised key, in serialisation order.
inline const std::vector<ConfigField>& config_fields() {
  using namespace detail;
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> f;
    f.push_back(enum_field<Experiment>("experiment", [](RunConfig& c) -> Experiment& { return c.experiment; },
                                       {{"bandit", Experiment::bandit},
                                        {"portfolio", Experiment::portfolio},
                                        {"consumption", Experiment::consumption},
                                        {"landscape", Experiment::landscape},
                                        {"predict", Experiment::predict}}));
    f.push_back(count_field("trials", [](RunConfig& c) -> std::size_t& { return c.trials; }));
    f.push_back(count_field("base_seed", [](RunConfig& c) -> std::uint64_t& { return c.base_seed; }));
    f.push_back({"output", [](RunConfig& c, const YAML::Node& n) { c.output = scalar(n); },
                 [](const RunConfig& c) { return YAML::Dump(YAML::Node(c.output)); }});
    f.push_back(count_field("threads", [](RunConfig& c) -> std::size_t& { return c.threads; }));
    f.push_back(bool_field("log.wall_clock", [](RunConfig& c) -> bool& { return c.log_wall_clock; }));

    f.push_back(real_field("env.bandit.a_mean", [](RunConfig& c) -> double& { return c.bandit.a_mean; }));
    f.push_back(real_field("env.bandit.a_stddev", [](RunConfig& c) -> double& { return c.bandit.a_stddev; }));
    f.push_back(real_field("env.bandit.b_mean", [](RunConfig& c) -> double& { return c.bandit.b_mean; }));
    f.push_back(real_field("env.bandit.b_stddev", [](RunConfig& c) -> double& { return c.bandit.b_stddev; }));
    f.push_back(real_field("env.bandit.c_scale", [](RunConfig& c) -> double& { return c.bandit.c_scale; }));
    f.push_back(real_field("env.bandit.c_shape", [](RunConfig& c) -> double& { return c.bandit.c_shape; }));

    f.push_back(real_field("env.portfolio.r_liquid", [](RunConfig& c) -> double& { return c.portfolio.r_liquid; }));
    f.push_back(real_field("env.portfolio.r_illiquid_high",
                           [](RunConfig& c) -> double& { return c.portfolio.r_illiquid_high; }));
    f.push_back(real_field("env.portfolio.r_illiquid_low",
                           [](RunConfig& c) -> double& { return c.portfolio.r_illiquid_low; }));
    f.push_back(real_field("env.portfolio.p_up", [](RunConfig& c) -> double& { return c.portfolio.p_up; }));
    f.push_back(real_field("env.portfolio.p_down", [](RunConfig& c) -> double& { return c.portfolio.p_down; }));
    f.push_back(real_field("env.portfolio.p_default", [](RunConfig& c) -> double& { return c.portfolio.p_default; }));
    f.push_back(count_field("env.portfolio.max_order", [](RunConfig& c) -> int& { return c.portfolio.max_order; }));
    f.push_back(real_field("env.portfolio.unit_cost", [](RunConfig& c) -> double& { return c.portfolio.unit_cost; }));
    f.push_back(count_field("env.portfolio.maturity", [](RunConfig& c) -> int& { return c.portfolio.maturity; }));
    f.push_back(count_field("env.portfolio.horizon", [](RunConfig& c) -> int& { return c.portfolio.horizon; }));
    f.push_back(real_field("env.portfolio.initial_liquid",
                           [](RunConfig& c) -> double& { return c.portfolio.initial_liquid; }));
    f.push_back(bool_field("env.portfolio.start_high", [](RunConfig& c) -> bool& { return c.portfolio.start_high; }));

    f.push_back(real_field("env.consumption.r_liquid", [](RunConfig& c) -> double& { return c.consumption.r_liquid; }));
    f.push_back(real_field("env.consumption.risky_mean",
                           [](RunConfig& c) -> double& { return c.consumption.risky_mean; }));
    f.push_back(real_field("env.consumption.risky_vol", [](RunConfig& c) -> double& { return c.consumption.risky_vol; }));
    f.push_back(real_field("env.consumption.initial_wealth",
                           [](RunConfig& c) -> double& { return c.consumption.initial_wealth; }));
    f.push_back(real_field("env.consumption.dt", [](RunConfig& c) -> double& { return c.consumption.dt; }));
    f.push_back(real_field("env.consumption.p_default", [](RunConfig& c) -> double& { return c.consumption.p_default; }));
    f.push_back(count_field("env.consumption.horizon", [](RunConfig& c) -> int& { return c.consumption.horizon; }));
    f.push_back(real_field("env.consumption.exhaustion",
                           [](RunConfig& c) -> double& { return c.consumption.exhaustion; }));

    f.push_back(count_field("policy.fourier_order", [](RunConfig& c) -> int& { return c.policy.fourier_order; }));
    f.push_back(real_field("policy.sigma_floor", [](RunConfig& c) -> double& { return c.policy.sigma_floor; }));
    f.push_back(real_field("policy.wealth_max", [](RunConfig& c) -> double& { return c.policy.wealth_max; }));
    f.push_back(real_field("policy.init_mu_bias", [](RunConfig& c) -> double& { return c.policy.init_mu_bias; }));
    f.push_back(real_field("policy.init_sigma_bias", [](RunConfig& c) -> double& { return c.policy.init_sigma_bias; }));
    f.push_back(real_field("policy.init_alpha_bias", [](RunConfig& c) -> double& { return c.policy.init_alpha_bias; }));
    f.push_back(real_field("policy.init_beta_bias", [](RunConfig& c) -> double& { return c.policy.init_beta_bias; }));

    f.push_back(real_field("critic.step_size", [](RunConfig& c) -> double& { return c.critic.step_size; }));
    f.push_back(real_field("critic.rho_step_size", [](RunConfig& c) -> double& { return c.critic.rho_step_size; }));
    f.push_back(real_field("critic.discount", [](RunConfig& c) -> double& { return c.critic.discount; }));
    f.push_back(real_field("critic.trace_decay", [](RunConfig& c) -> double& { return c.critic.trace_decay; }));
    f.push_back(bool_field("critic.bounded_step", [](RunConfig& c) -> bool& { return c.critic.bounded_step; }));

    f.push_back(enum_field<TargetKind>("target.kind", [](RunConfig& c) -> TargetKind& { return c.target.kind; },
                                       {{"fixed", TargetKind::fixed},
                                        {"centralised", TargetKind::centralised},
                                        {"custom", TargetKind::custom}}));
    f.push_back(real_field("target.tau", [](RunConfig& c) -> double& { return c.target.tau; }));
    f.push_back(count_field("target.order", [](RunConfig& c) -> int& { return c.target.order; }));
    f.push_back(real_field("target.mean_step", [](RunConfig& c) -> double& { return c.target.mean_step; }));

    f.push_back(real_field("lagrangian.nu", [](RunConfig& c) -> double& { return c.lagrangian.nu; }));
    f.push_back(real_field("lagrangian.lambda", [](RunConfig& c) -> double& { return c.lagrangian.lambda; }));
    f.push_back(real_field("lagrangian.step_size", [](RunConfig& c) -> double& { return c.lagrangian.step_size; }));
    f.push_back(enum_field<LagrangeMode>("lagrangian.mode",
                                         [](RunConfig& c) -> LagrangeMode& { return c.lagrangian.mode; },
                                         {{"adaptive", LagrangeMode::adaptive}, {"constant", LagrangeMode::constant}}));

    f.push_back(count_field("schedule.policy_period",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.policy_period; }));
    f.push_back(enum_field<PeriodUnit>("schedule.period_unit",
                                       [](RunConfig& c) -> PeriodUnit& { return c.schedule.period_unit; },
                                       {{"steps", PeriodUnit::steps}, {"episodes", PeriodUnit::episodes}}));
    f.push_back(real_field("schedule.eta", [](RunConfig& c) -> double& { return c.schedule.eta; }));
    f.push_back(count_field("schedule.pretrain_episodes",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.pretrain_episodes; }));
    f.push_back(count_field("schedule.total_episodes",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.total_episodes; }));
    f.push_back(count_field("schedule.eval_every", [](RunConfig& c) -> std::size_t& { return c.schedule.eval_every; }));
    f.push_back(count_field("schedule.eval_rollouts",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.eval_rollouts; }));
    f.push_back(count_field("schedule.smoothing_window",
                            [](RunConfig& c) -> std::size_t& { return c.smoothing_window; }));
    f.push_back(count_field("schedule.max_episode_steps",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.max_episode_steps; }));
    f.push_back(count_field("schedule.constraint_window",
                            [](RunConfig& c) -> std::size_t& { return c.schedule.constraint_window; }));
    f.push_back(count_field("schedule.final_rollouts", [](RunConfig& c) -> std::size_t& { return c.final_rollouts; }));

    f.push_back({"sweep.nu_values",
                 [](RunConfig& c, const YAML::Node& n) {
                   if (!n.IsSequence()) throw std::invalid_argument("expected a list of numbers");
                   c.nu_values.clear();
                   for (const auto& item : n) c.nu_values.push_back(parse_double(scalar(item)));
                 },
                 [](const RunConfig& c) {
                   std::string out = "[";
                   for (std::size_t i = 0; i < c.nu_values.size(); ++i) {
                     out += (i ? ", " : "") + format_double(c.nu_values[i]);
                   }
                   return out + "]";
                 }});

    f.push_back(count_field("bandit_suite.record_every",
                            [](RunConfig& c) -> std::size_t& { return c.bandit_suite.record_every; }));
    f.push_back(real_field("bandit_suite.lambda_first_order",
                           [](RunConfig& c) -> double& { return c.bandit_suite.lambda_first_order; }));
    f.push_back(real_field("bandit_suite.lambda_second_order",
                           [](RunConfig& c) -> double& { return c.bandit_suite.lambda_second_order; }));

    f.push_back(count_field("landscape.resolution", [](RunConfig& c) -> int& { return c.landscape.resolution; }));
    f.push_back(count_field("landscape.rollouts", [](RunConfig& c) -> std::size_t& { return c.landscape.rollouts; }));

    f.push_back(count_field("predict.resolution", [](RunConfig& c) -> int& { return c.predict.resolution; }));
    f.push_back(count_field("predict.td_episodes", [](RunConfig& c) -> std::size_t& { return c.predict.td_episodes; }));
    f.push_back(count_field("predict.mc_rollouts", [](RunConfig& c) -> std::size_t& { return c.predict.mc_rollouts; }));
    return f;
  }();
  return fields;
}

inline const ConfigField* find_field(const std::string& key) {
  for (const auto& f : config_fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

/// Built-in defaults for each experiment.
inline RunConfig default_config(Experiment experiment) {
  RunConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::bandit:
      c.trials = 100;
      c.critic = {0.005, 0.0, 1.0, 0.0, false};
      c.target = {TargetKind::centralised, 0.0, 1, 0.0};
      c.lagrangian = {std::numeric_limits<double>::infinity(), 0.0, 0.001, LagrangeMode::constant};
      c.schedule.policy_period = 100;
      c.schedule.period_unit = PeriodUnit::episodes;
      c.schedule.eta = 0.001;
      c.schedule.pretrain_episodes = 0;
      c.schedule.total_episodes = 10000;
      c.schedule.eval_every = 0;
      break;
    case Experiment::portfolio:
      c.trials = 3;
      c.critic = {0.0001, 0.0, 0.99, 1.0, false};
      c.target = {TargetKind::centralised, 0.0, 1, 0.0001};
      c.lagrangian = {0.5, 0.0, 0.001, LagrangeMode::adaptive};
      c.schedule.policy_period = 200;
      c.schedule.period_unit = PeriodUnit::steps;
      c.schedule.eta = 0.0001;
      c.schedule.pretrain_episodes = 1000;
      c.schedule.total_episodes = 20000;
      c.schedule.eval_every = 1000;
      c.schedule.eval_rollouts = 1000;
      c.nu_values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
      break;
    case Experiment::consumption:
      c.trials = 3;
      c.critic = {0.00001, 0.0, 1.0, 0.97, false};
      c.target = {TargetKind::custom, 0.0, 1, 0.0};
      c.lagrangian = {0.1, 0.0, 0.0025, LagrangeMode::adaptive};
      c.schedule.policy_period = 1000;
      c.schedule.period_unit = PeriodUnit::steps;
      c.schedule.eta = 0.00001;
      c.schedule.pretrain_episodes = 1000;
      c.schedule.total_episodes = 200000;
      c.schedule.eval_every = 100;
      c.schedule.eval_rollouts = 100;
      c.nu_values = {0.05, 0.1, std::numeric_limits<double>::infinity()};
      break;
    case Experiment::landscape:
      c.critic = {0.01, 0.0, 1.0, 0.0, false};
      c.target = {TargetKind::fixed, 0.0, 1, 0.0};
      break;
    case Experiment::predict:
      c.critic = {0.01, 0.0, 1.0, 0.0, false};
      c.target = {TargetKind::fixed, 0.0, 1, 0.0};
      break;
  }
  return c;
}

/// Range checks; `lines` maps keys to the file line they came from.
inline void validate(const RunConfig& c, const std::map<std::string, int>& lines = {},
                     const std::string& source = {}) {
  auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (ok) return;
    auto it = lines.find(key);
    throw ConfigError(key + ": " + what, it == lines.end() ? 0 : it->second, source);
  };
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  check(c.trials >= 1, "trials", "must be at least 1");
  check(c.bandit.a_stddev >= 0.0, "env.bandit.a_stddev", "must be non-negative");
  check(c.bandit.b_stddev >= 0.0, "env.bandit.b_stddev", "must be non-negative");
  check(c.bandit.c_scale > 0.0, "env.bandit.c_scale", "must be positive");
  check(c.bandit.c_shape > 0.0, "env.bandit.c_shape", "must be positive");
  check(prob(c.portfolio.p_up), "env.portfolio.p_up", "must be in [0, 1]");
  check(prob(c.portfolio.p_down), "env.portfolio.p_down", "must be in [0, 1]");
  check(prob(c.portfolio.p_default), "env.portfolio.p_default", "must be in [0, 1]");
  check(c.portfolio.maturity >= 1, "env.portfolio.maturity", "must be at least 1");
  check(c.portfolio.horizon >= 1, "env.portfolio.horizon", "must be at least 1");
  check(c.portfolio.unit_cost > 0.0, "env.portfolio.unit_cost", "must be positive");
  check(c.portfolio.initial_liquid > 0.0, "env.portfolio.initial_liquid", "must be positive");
  check(c.portfolio.r_liquid > 0.0 && c.portfolio.r_illiquid_high > 0.0 && c.portfolio.r_illiquid_low > 0.0,
        "env.portfolio.r_liquid", "rates must be positive");
  check(c.consumption.dt > 0.0, "env.consumption.dt", "must be positive");
  check(c.consumption.horizon >= 1, "env.consumption.horizon", "must be at least 1");
  check(prob(c.consumption.p_default), "env.consumption.p_default", "must be in [0, 1]");
  check(c.consumption.initial_wealth > 0.0, "env.consumption.initial_wealth", "must be positive");
  check(c.consumption.risky_vol >= 0.0, "env.consumption.risky_vol", "must be non-negative");
  check(c.policy.fourier_order >= 0, "policy.fourier_order", "must be non-negative");
  check(c.policy.sigma_floor > 0.0, "policy.sigma_floor", "must be positive");
  check(c.policy.wealth_max > 0.0, "policy.wealth_max", "must be positive");
  check(c.critic.step_size > 0.0, "critic.step_size", "must be positive");
  check(c.critic.rho_step_size >= 0.0, "critic.rho_step_size", "must be non-negative");
  check(prob(c.critic.discount), "critic.discount", "must be in [0, 1]");
  check(prob(c.critic.trace_decay), "critic.trace_decay", "must be in [0, 1]");
  check(std::isfinite(c.target.tau), "target.tau", "must be finite");
  check(c.target.order >= 1, "target.order", "must be at least 1");
  check(c.target.order == 1 || c.experiment == Experiment::bandit, "target.order",
        "orders above 1 need single-step episodes");
  check(c.target.mean_step >= 0.0, "target.mean_step", "must be non-negative");
  check(c.target.kind != TargetKind::custom || c.experiment == Experiment::consumption, "target.kind",
        "custom targets are only defined for the consumption experiment");
  check(c.target.kind != TargetKind::centralised || c.experiment != Experiment::portfolio || c.target.mean_step > 0.0,
        "target.mean_step", "the portfolio mean estimator needs a positive step");
  check(c.lagrangian.nu >= 0.0, "lagrangian.nu", "must be non-negative (or inf)");
  check(c.lagrangian.lambda >= 0.0 && std::isfinite(c.lagrangian.lambda), "lagrangian.lambda",
        "must be finite and non-negative");
  check(c.lagrangian.step_size >= 0.0, "lagrangian.step_size", "must be non-negative");
  check(c.schedule.policy_period >= 1, "schedule.policy_period", "must be at least 1");
  check(c.schedule.eta > 0.0, "schedule.eta", "must be positive");
  check(c.schedule.total_episodes >= 1, "schedule.total_episodes", "must be at least 1");
  check(c.schedule.eval_rollouts >= 1, "schedule.eval_rollouts", "must be at least 1");
  check(c.smoothing_window >= 1, "schedule.smoothing_window", "must be at least 1");
  check(c.schedule.max_episode_steps >= 1, "schedule.max_episode_steps", "must be at least 1");
  check(c.schedule.constraint_window >= 1, "schedule.constraint_window", "must be at least 1");
  check(c.final_rollouts >= 1, "schedule.final_rollouts", "must be at least 1");
  for (double nu : c.nu_values) check(nu >= 0.0, "sweep.nu_values", "entries must be non-negative (or inf)");
  check(c.bandit_suite.record_every >= 1, "bandit_suite.record_every", "must be at least 1");
  check(c.landscape.resolution >= 2, "landscape.resolution", "must be at least 2");
  check(c.landscape.rollouts >= 2, "landscape.rollouts", "must be at least 2");
  check(c.predict.resolution >= 2, "predict.resolution", "must be at least 2");
  check(c.predict.td_episodes >= 1, "predict.td_episodes", "must be at least 1");
  check(c.predict.mc_rollouts >= 2, "predict.mc_rollouts", "must be at least 2");
}

namespace detail {

inline void flatten(const YAML::Node& node, const std::string& prefix,
                    std::vector<std::pair<std::string, YAML::Node>>& out) {
  for (const auto& kv : node) {
    const std::string key = prefix.empty() ? kv.first.Scalar() : prefix + "." + kv.first.Scalar();
    if (kv.second.IsMap()) {
      flatten(kv.second, key, out);
    } else {
      out.emplace_back(key, kv.second);
    }
  }
}

inline void apply_node(RunConfig& c, const std::string& key, const YAML::Node& value, int line,
                       const std::string& source) {
  const ConfigField* field = find_field(key);
  if (field == nullptr) throw ConfigError("unknown key '" + key + "'", line, source);
  try {
    field->read(c, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what(), line, source);
  }
}

}  // namespace detail

/// Applies the keys of a YAML document (flat dotted keys or nested maps) on top of `base`.
inline RunConfig apply_yaml(RunConfig base, const std::string& text, const std::string& source = {},
                            std::map<std::string, int>* lines = nullptr) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, source);
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) throw ConfigError("top level must be a mapping", detail::line_of(root), source);
  std::vector<std::pair<std::string, YAML::Node>> entries;
  detail::flatten(root, "", entries);
  for (const auto& [key, value] : entries) {
    const int line = detail::line_of(value);
    detail::apply_node(base, key, value, line, source);
    if (lines != nullptr) (*lines)[key] = line;
  }
  return base;
}

/// Reads the experiment named in a document, if any.
inline std::optional<Experiment> peek_experiment(const std::string& text, const std::string& source = {}) {
  RunConfig probe;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, source);
  }
  if (!root.IsMap() || !root["experiment"]) return std::nullopt;
  detail::apply_node(probe, "experiment", root["experiment"], detail::line_of(root["experiment"]), source);
  return probe.experiment;
}

/// Applies one "key=value" override; the value is read as a YAML scalar or list.
inline void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value", 0, "--override");
  }
  const std::string key = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(key + ": " + e.msg, 0, "--override");
  }
  if (value.IsNull()) value = YAML::Node(std::string());
  detail::apply_node(c, key, value, 0, "--override");
}

/// Flat dotted-key YAML with every field.
inline std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  for (const auto& f : config_fields()) out << f.key << ": " << f.write(c) << "\n";
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file", 0, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Defaults for `experiment`, then the file at `path` (may be empty), then overrides; validated.
inline RunConfig load_config(Experiment experiment, const std::string& path,
                             const std::vector<std::string>& overrides = {}) {
  RunConfig c = default_config(experiment);
  std::map<std::string, int> lines;
  if (!path.empty()) {
    const std::string text = read_text_file(path);
    if (auto named = peek_experiment(text, path); named && *named != experiment) {
      throw ConfigError("file is for experiment '" + to_string(*named) + "', not '" + to_string(experiment) + "'",
                        0, path);
    }
    c = apply_yaml(c, text, path, &lines);
  }
  for (const auto& o : overrides) {
    apply_override(c, o);
    lines.erase(o.substr(0, o.find('=')));
  }
  c.experiment = experiment;
  validate(c, lines, path);
  return c;
}

}  // namespace lpmrl::harness
