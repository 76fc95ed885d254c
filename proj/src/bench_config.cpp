#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "pce/bench.hpp"
#include "pce/errors.hpp"

namespace pce::bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v.front() == '-') throw ConfigError("key '" + key + "': '" + v + "' is not a nonnegative integer");
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("key '" + key + "': '" + v + "' is not a nonnegative integer");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const std::uint64_t x = to_unsigned(key, v);
  if (x > 1000000000ULL) throw ConfigError("key '" + key + "': value out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += f(xs[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Recovery:
      return "recovery";
    case Experiment::Duffing:
      return "duffing";
    case Experiment::Battery:
      return "battery";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  if (name == "recovery") return Experiment::Recovery;
  if (name == "duffing") return Experiment::Duffing;
  if (name == "battery") return Experiment::Battery;
  throw ConfigError("unknown experiment '" + std::string(name) + "' (expected recovery, duffing or battery)");
}

const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> names{"standard",  "lhs",       "asymptotic", "coh-opt",
                                              "rand-quad", "qmc",       "d-coh-opt",  "a-coh-opt",
                                              "e-coh-opt", "k-coh-opt", "d-opt"};
  return names;
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.strategies = {"standard", "lhs", "coh-opt", "d-coh-opt"};
  switch (e) {
    case Experiment::Recovery:
      c.family = "legendre";
      c.d = 15;
      c.p = 2;
      c.n_over_p = {1.25, 1.5, 2, 3, 5, 10};
      c.nc_rule = CandidateRule::FourN;
      break;
    case Experiment::Duffing:
      c.family = "legendre";
      c.d = 3;
      c.p = 9;
      c.n = {242, 440, 660};
      c.nc_rule = CandidateRule::PLogP;
      c.times = {4.0};
      c.dt = 1e-3;
      break;
    case Experiment::Battery:
      c.family = "battery";
      c.d = 7;
      c.p = 3;
      c.nc_rule = CandidateRule::PLogP;
      c.tp = {0.0, 200.0, 400.0, 600.0};
      c.dt = 0.1;
      break;
  }
  return c;
}

void apply_config(ExperimentConfig& cfg, std::istream& in) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"experiment",
       [&](auto& k, auto& v) {
         if (parse_experiment(v) != cfg.experiment)
           throw ConfigError("key '" + k + "': config is for '" + v + "' but the command runs '" +
                             std::string(to_string(cfg.experiment)) + "'");
       }},
      {"family",
       [&](auto& k, auto& v) {
         if (v != "legendre" && v != "hermite") throw ConfigError("key '" + k + "': family must be legendre or hermite");
         cfg.family = v;
       }},
      {"d", [&](auto& k, auto& v) { cfg.d = to_int(k, v); }},
      {"p", [&](auto& k, auto& v) { cfg.p = to_int(k, v); }},
      {"strategies", [&](auto&, auto& v) { cfg.strategies = split_list(v); }},
      {"n_over_p",
       [&](auto& k, auto& v) {
         cfg.n_over_p.clear();
         for (auto& x : split_list(v)) cfg.n_over_p.push_back(to_double(k, x));
       }},
      {"n",
       [&](auto& k, auto& v) {
         cfg.n.clear();
         for (auto& x : split_list(v)) cfg.n.push_back(to_unsigned(k, x));
       }},
      {"nc_rule",
       [&](auto& k, auto& v) {
         if (v == "4n")
           cfg.nc_rule = CandidateRule::FourN;
         else if (v == "plogp")
           cfg.nc_rule = CandidateRule::PLogP;
         else
           throw ConfigError("key '" + k + "': expected 4n or plogp");
       }},
      {"replications", [&](auto& k, auto& v) { cfg.replications = to_unsigned(k, v); }},
      {"n_validation", [&](auto& k, auto& v) { cfg.n_validation = to_unsigned(k, v); }},
      {"seed", [&](auto& k, auto& v) { cfg.seed = to_unsigned(k, v); }},
      {"noise_rel", [&](auto& k, auto& v) { cfg.noise_rel = to_double(k, v); }},
      {"times",
       [&](auto& k, auto& v) {
         cfg.times.clear();
         for (auto& x : split_list(v)) cfg.times.push_back(to_double(k, x));
       }},
      {"tp",
       [&](auto& k, auto& v) {
         cfg.tp.clear();
         for (auto& x : split_list(v)) cfg.tp.push_back(to_double(k, x));
       }},
      {"dt", [&](auto& k, auto& v) { cfg.dt = to_double(k, v); }},
      {"mcmc_burn_in", [&](auto& k, auto& v) { cfg.mcmc_burn_in = to_int(k, v); }},
      {"mcmc_thinning", [&](auto& k, auto& v) { cfg.mcmc_thinning = to_int(k, v); }},
      {"quad_level", [&](auto& k, auto& v) { cfg.quad_level = to_int(k, v); }},
      {"fedorov_max_iter", [&](auto& k, auto& v) { cfg.fedorov_max_iter = to_unsigned(k, v); }},
      {"current_low", [&](auto& k, auto& v) { cfg.battery.current_low = to_double(k, v); }},
      {"current_high", [&](auto& k, auto& v) { cfg.battery.current_high = to_double(k, v); }},
      {"state_cov", [&](auto& k, auto& v) { cfg.battery.state_cov = to_double(k, v); }},
      {"noise_sd",
       [&](auto& k, auto& v) {
         const auto xs = split_list(v);
         if (xs.size() != 3) throw ConfigError("key '" + k + "': expected three values");
         for (std::size_t i = 0; i < 3; ++i) cfg.battery.noise_sd[i] = to_double(k, xs[i]);
       }},
      {"horizon", [&](auto& k, auto& v) { cfg.battery.horizon = to_double(k, v); }},
      {"pdf", [&](auto& k, auto& v) { cfg.pdf = to_bool(k, v); }},
      {"pdf_draws", [&](auto& k, auto& v) { cfg.pdf_draws = to_unsigned(k, v); }},
      {"pdf_bins", [&](auto& k, auto& v) { cfg.pdf_bins = to_unsigned(k, v); }},
      {"p_sweep",
       [&](auto& k, auto& v) {
         cfg.p_sweep.clear();
         for (auto& x : split_list(v)) cfg.p_sweep.push_back(to_int(k, x));
       }},
      {"workers", [&](auto& k, auto& v) { cfg.workers = to_unsigned(k, v); }},
      {"aggregate", [&](auto& k, auto& v) { cfg.aggregate = to_bool(k, v); }},
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config(cfg, in);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
  if (cfg.d < 1) throw ConfigError("d must be positive");
  if (cfg.strategies.empty()) throw ConfigError("strategy list is empty");
  const auto& names = known_strategies();
  for (const auto& s : cfg.strategies)
    if (std::find(names.begin(), names.end(), s) == names.end()) throw ConfigError("unknown strategy '" + s + "'");
  for (double r : cfg.n_over_p)
    if (!(r > 0.0)) throw ConfigError("n_over_p values must be positive");
  for (std::size_t n : cfg.n)
    if (n == 0) throw ConfigError("n values must be positive");
  if (cfg.n_validation < 1) throw ConfigError("n_validation must be positive");
  if (cfg.noise_rel < 0.0) throw ConfigError("noise_rel must be nonnegative");
  if (cfg.mcmc_thinning < 0 || cfg.mcmc_burn_in < 0) throw ConfigError("MCMC settings must be nonnegative");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  switch (cfg.experiment) {
    case Experiment::Recovery:
      if (cfg.n.empty() && cfg.n_over_p.empty()) throw ConfigError("recovery needs an n or n_over_p grid");
      break;
    case Experiment::Duffing:
      if (cfg.d != 3) throw ConfigError("the Duffing model has d = 3");
      if (cfg.times.empty()) throw ConfigError("duffing needs at least one output time");
      for (double t : cfg.times)
        if (!(t >= 0.0)) throw ConfigError("duffing times must be nonnegative");
      if (!std::is_sorted(cfg.times.begin(), cfg.times.end())) throw ConfigError("duffing times must be ascending");
      if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
      for (int p : cfg.p_sweep)
        if (p < 0) throw ConfigError("p_sweep orders must be nonnegative");
      break;
    case Experiment::Battery:
      if (cfg.d != 7) throw ConfigError("the battery model has d = 7");
      if (cfg.tp.empty()) throw ConfigError("battery needs at least one prediction time");
      for (double t : cfg.tp)
        if (!(t >= 0.0)) throw ConfigError("battery prediction times must be nonnegative");
      if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
      if (cfg.battery.current_high < cfg.battery.current_low) throw ConfigError("current_high must be >= current_low");
      if (cfg.battery.state_cov < 0.0) throw ConfigError("state_cov must be nonnegative");
      if (cfg.pdf && cfg.pdf_draws < 2) throw ConfigError("pdf_draws must be at least 2");
      break;
  }
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg) {
  auto num = [](auto x) { return std::to_string(x); };
  std::vector<std::pair<std::string, std::string>> out{
      {"experiment", std::string(to_string(cfg.experiment))},
      {"family", cfg.family},
      {"d", num(cfg.d)},
      {"p", num(cfg.p)},
      {"strategies", join(cfg.strategies, [](const std::string& s) { return s; })},
      {"n_over_p", join(cfg.n_over_p, fmt)},
      {"n", join(cfg.n, [](std::size_t x) { return std::to_string(x); })},
      {"nc_rule", cfg.nc_rule == CandidateRule::FourN ? "4n" : "plogp"},
      {"replications", num(cfg.replications)},
      {"n_validation", num(cfg.n_validation)},
      {"seed", num(cfg.seed)},
      {"mcmc_burn_in", num(cfg.mcmc_burn_in)},
      {"mcmc_thinning", num(cfg.mcmc_thinning)},
      {"quad_level", num(cfg.quad_level)},
      {"fedorov_max_iter", num(cfg.fedorov_max_iter)},
  };
  switch (cfg.experiment) {
    case Experiment::Recovery:
      out.emplace_back("noise_rel", fmt(cfg.noise_rel));
      break;
    case Experiment::Duffing:
      out.emplace_back("times", join(cfg.times, fmt));
      out.emplace_back("dt", fmt(cfg.dt));
      out.emplace_back("p_sweep", join(cfg.p_sweep, [](int x) { return std::to_string(x); }));
      break;
    case Experiment::Battery:
      out.emplace_back("tp", join(cfg.tp, fmt));
      out.emplace_back("dt", fmt(cfg.dt));
      out.emplace_back("current_low", fmt(cfg.battery.current_low));
      out.emplace_back("current_high", fmt(cfg.battery.current_high));
      out.emplace_back("state_cov", fmt(cfg.battery.state_cov));
      out.emplace_back("noise_sd", fmt(cfg.battery.noise_sd[0]) + "," + fmt(cfg.battery.noise_sd[1]) + "," +
                                       fmt(cfg.battery.noise_sd[2]));
      out.emplace_back("horizon", fmt(cfg.battery.horizon));
      out.emplace_back("pdf", cfg.pdf ? "true" : "false");
      out.emplace_back("pdf_draws", num(cfg.pdf_draws));
      out.emplace_back("pdf_bins", num(cfg.pdf_bins));
      break;
  }
  return out;
}

}  // namespace pce::bench
