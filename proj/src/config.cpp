#include "pdmp/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pdmp/errors.hpp"

namespace pdmp {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) {
  std::ostringstream os;
  if (node.IsDefined() && node.Mark().line >= 0) os << "line " << node.Mark().line + 1 << ", ";
  os << "field '" << field << "': " << msg;
  throw ConfigError(os.str());
}

void expect_map(const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) fail(node, field, "expected a mapping");
}

void expect_keys(const YAML::Node& node, const std::string& field,
                 std::initializer_list<const char*> allowed) {
  expect_map(node, field);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, field + "." + key, "unknown key");
  }
}

double as_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a number");
  const auto text = node.as<std::string>();
  if (text == "inf" || text == ".inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) fail(node, field, "expected a number, got '" + text + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(node, field, "expected a number, got '" + text + "'");
  }
}

std::uint64_t as_u64(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a non-negative integer");
  const auto text = node.as<std::string>();
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::logic_error&) {
    fail(node, field, "expected a non-negative integer, got '" + text + "'");
  }
}

bool as_bool(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(node, field, "expected true or false");
  }
}

std::optional<double> opt_double(const YAML::Node& parent, const char* key,
                                 const std::string& field) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) return std::nullopt;
  return as_double(n, field + "." + key);
}

double req_double(const YAML::Node& parent, const char* key, const std::string& field) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull()) fail(parent, field + "." + key, "missing");
  return as_double(n, field + "." + key);
}

Law parse_law(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) return Dirac{as_double(node, field)};
  expect_keys(node, field, {"family", "params", "role"});
  if (!node["family"].IsDefined()) fail(node, field + ".family", "missing");
  const auto family = node["family"].as<std::string>();
  const YAML::Node params = node["params"];
  const std::string pf = field + ".params";
  if (!params.IsDefined()) fail(node, pf, "missing");
  auto keys = [&](std::initializer_list<const char*> allowed) { expect_keys(params, pf, allowed); };
  if (family == "exponential") {
    keys({"rate"});
    return Exponential{req_double(params, "rate", pf)};
  }
  if (family == "gamma") {
    keys({"shape", "scale"});
    return Gamma{req_double(params, "shape", pf), req_double(params, "scale", pf)};
  }
  if (family == "uniform") {
    keys({"lo", "hi"});
    return Uniform{req_double(params, "lo", pf), req_double(params, "hi", pf)};
  }
  if (family == "weibull") {
    keys({"shape", "scale"});
    return Weibull{req_double(params, "shape", pf), req_double(params, "scale", pf)};
  }
  if (family == "rayleigh") {
    keys({"sigma"});
    return Weibull{2.0, std::sqrt(2.0) * req_double(params, "sigma", pf)};
  }
  if (family == "dirac") {
    keys({"value"});
    return Dirac{req_double(params, "value", pf)};
  }
  if (family == "shifted_exponential") {
    keys({"shift", "rate"});
    return ShiftedExponential{req_double(params, "shift", pf), req_double(params, "rate", pf)};
  }
  fail(node["family"], field + ".family",
       "unknown family '" + family +
           "' (exponential, gamma, uniform, weibull, rayleigh, dirac, shifted_exponential)");
}

DistributionSpec parse_distribution(const YAML::Node& node, Role role, const std::string& field) {
  if (!node.IsDefined() || node.IsNull()) fail(node, field, "missing");
  if (node.IsMap() && node["role"].IsDefined()) {
    const auto declared = node["role"].as<std::string>();
    if (declared != to_string(role)) {
      fail(node["role"], field + ".role",
           "declared role '" + declared + "' but the slot expects '" +
               std::string(to_string(role)) + "'");
    }
  }
  try {
    return DistributionSpec(parse_law(node, field), role);
  } catch (const InvalidSpecError& e) {
    fail(node, field, e.what());
  }
}

InitialLaw parse_initial(const YAML::Node& node, const std::string& field) {
  if (!node.IsDefined()) fail(node, field, "missing");
  expect_keys(node, field, {"x", "theta", "age"});
  return {parse_distribution(node["x"], Role::Initial, field + ".x"),
          parse_distribution(node["theta"], Role::Initial, field + ".theta"),
          parse_distribution(node["age"], Role::Initial, field + ".age")};
}

ModelConfig parse_model(const YAML::Node& node) {
  expect_keys(node, "model", {"intake", "interarrival", "metabolic", "first_interarrival", "initial"});
  std::optional<DistributionSpec> first;
  if (node["first_interarrival"].IsDefined()) {
    first = parse_distribution(node["first_interarrival"], Role::InterArrival,
                               "model.first_interarrival");
  }
  const YAML::Node init = node["initial"];
  if (!init.IsDefined()) fail(node, "model.initial", "missing");
  expect_keys(init, "model.initial", {"first", "second"});
  return {parse_distribution(node["intake"], Role::Intake, "model.intake"),
          parse_distribution(node["interarrival"], Role::InterArrival, "model.interarrival"),
          parse_distribution(node["metabolic"], Role::Metabolic, "model.metabolic"),
          std::move(first),
          parse_initial(init["first"], "model.initial.first"),
          parse_initial(init["second"], "model.initial.second")};
}

CouplingConfig parse_coupling(const YAML::Node& node) {
  CouplingConfig c;
  if (!node.IsDefined() || node.IsNull()) return c;
  expect_keys(node, "coupling", {"alpha", "beta", "epsilon_tv", "age"});
  c.alpha = opt_double(node, "alpha", "coupling");
  c.beta = opt_double(node, "beta", "coupling");
  c.epsilon_tv = opt_double(node, "epsilon_tv", "coupling");
  if (const YAML::Node age = node["age"]; age.IsDefined()) {
    expect_keys(age, "coupling.age", {"case", "epsilon", "b", "c"});
    if (age["case"].IsDefined()) {
      try {
        c.age_case = parse_age_case(age["case"].as<std::string>());
      } catch (const InvalidSpecError& e) {
        fail(age["case"], "coupling.age.case", e.what());
      }
    }
    if (age["epsilon"].IsDefined() || age["b"].IsDefined() || age["c"].IsDefined()) {
      c.age = AgeCouplingParams{req_double(age, "epsilon", "coupling.age"),
                                req_double(age, "b", "coupling.age"),
                                req_double(age, "c", "coupling.age")};
    }
  }
  return c;
}

RateOptions parse_rates(const YAML::Node& node) {
  RateOptions r;
  if (!node.IsDefined() || node.IsNull()) return r;
  expect_keys(node, "rates",
              {"holder", "tail", "eta_eps_max", "w_margin", "w_cap", "renewal_step",
               "renewal_horizon", "directly_integrable", "age_tail_draws", "age_tail_seed", "v3"});
  if (const YAML::Node h = node["holder"]; h.IsDefined()) {
    expect_keys(h, "rates.holder", {"K", "h", "M"});
    HolderData d;
    d.constant = req_double(h, "K", "rates.holder");
    d.exponent = req_double(h, "h", "rates.holder");
    d.support_bound = opt_double(h, "M", "rates.holder").value_or(d.support_bound);
    r.holder = d;
  }
  if (const YAML::Node t = node["tail"]; t.IsDefined()) {
    expect_keys(t, "rates.tail", {"C", "p"});
    r.tail = TailData{req_double(t, "C", "rates.tail"), req_double(t, "p", "rates.tail")};
  }
  r.eta_eps_max = opt_double(node, "eta_eps_max", "rates").value_or(r.eta_eps_max);
  r.w_margin = opt_double(node, "w_margin", "rates").value_or(r.w_margin);
  r.w_cap = opt_double(node, "w_cap", "rates").value_or(r.w_cap);
  r.renewal_step = opt_double(node, "renewal_step", "rates").value_or(r.renewal_step);
  r.renewal_horizon = opt_double(node, "renewal_horizon", "rates");
  r.v3 = opt_double(node, "v3", "rates");
  if (node["directly_integrable"].IsDefined()) {
    r.directly_integrable = as_bool(node["directly_integrable"], "rates.directly_integrable");
  }
  if (node["age_tail_draws"].IsDefined()) {
    r.age_tail_draws = as_u64(node["age_tail_draws"], "rates.age_tail_draws");
  }
  if (node["age_tail_seed"].IsDefined()) {
    r.age_tail_seed = as_u64(node["age_tail_seed"], "rates.age_tail_seed");
  }
  if (!(r.w_margin > 0.0 && r.w_margin < 1.0)) fail(node, "rates.w_margin", "must lie in (0,1)");
  return r;
}

std::vector<double> parse_grid(const YAML::Node& node, double horizon) {
  std::vector<double> grid;
  if (!node.IsDefined()) {
    fail(node, "experiment.grid", "missing");
  }
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      grid.push_back(as_double(node[i], "experiment.grid[" + std::to_string(i) + "]"));
    }
  } else {
    expect_keys(node, "experiment.grid", {"from", "to", "step"});
    const double from = req_double(node, "from", "experiment.grid");
    const double to = req_double(node, "to", "experiment.grid");
    const double step = req_double(node, "step", "experiment.grid");
    if (!(step > 0.0) || !(to >= from)) fail(node, "experiment.grid", "needs step > 0, to >= from");
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) grid.push_back(from + step * static_cast<double>(k));
  }
  if (grid.empty()) fail(node, "experiment.grid", "must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= horizon)) {
      fail(node, "experiment.grid", "points must lie in (0, horizon]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) fail(node, "experiment.grid", "must be increasing");
  }
  return grid;
}

ExperimentConfig parse_experiment(const YAML::Node& node, const YAML::Node& root) {
  if (!node.IsDefined()) fail(root, "experiment", "missing");
  expect_keys(node, "experiment", {"horizon", "grid", "replicas", "parallelism"});
  ExperimentConfig e;
  e.horizon = req_double(node, "horizon", "experiment");
  if (!(e.horizon > 0.0) || !std::isfinite(e.horizon)) {
    fail(node["horizon"], "experiment.horizon", "must be finite and > 0");
  }
  e.grid = parse_grid(node["grid"], e.horizon);
  if (node["replicas"].IsDefined()) e.replicas = as_u64(node["replicas"], "experiment.replicas");
  if (e.replicas < 1) fail(node["replicas"], "experiment.replicas", "must be >= 1");
  if (node["parallelism"].IsDefined()) {
    e.parallelism = as_u64(node["parallelism"], "experiment.parallelism");
  }
  if (!root["seed"].IsDefined()) fail(root, "seed", "missing (a seed is mandatory)");
  e.seed = as_u64(root["seed"], "seed");
  return e;
}

OutputConfig parse_outputs(const YAML::Node& node) {
  OutputConfig o;
  if (!node.IsDefined() || node.IsNull()) return o;
  expect_keys(node, "outputs", {"directory", "paths", "path_replicas"});
  if (node["directory"].IsDefined()) o.directory = node["directory"].as<std::string>();
  if (node["paths"].IsDefined()) o.paths = as_bool(node["paths"], "outputs.paths");
  if (node["path_replicas"].IsDefined()) {
    o.path_replicas = as_u64(node["path_replicas"], "outputs.path_replicas");
  }
  return o;
}

RunConfig from_yaml(const YAML::Node& root) {
  expect_keys(root, "<root>", {"seed", "model", "coupling", "rates", "experiment", "outputs"});
  if (!root["model"].IsDefined()) fail(root, "model", "missing");
  ModelConfig model = parse_model(root["model"]);
  CouplingConfig coupling = parse_coupling(root["coupling"]);
  RateOptions rates = parse_rates(root["rates"]);
  ExperimentConfig experiment = parse_experiment(root["experiment"], root);
  OutputConfig outputs = parse_outputs(root["outputs"]);
  rates.initial = model.initial_moments();
  rates.alpha = coupling.alpha;
  rates.beta = coupling.beta;
  rates.age_case = coupling.age_case;
  rates.age_tuning = coupling.age;
  return RunConfig{std::move(model), coupling, std::move(rates), experiment, outputs};
}

}  // namespace

ProcessState InitialLaw::sample(RandomStream& rng) const {
  ProcessState s;
  s.x = x.sample(rng);
  s.theta = theta.sample(rng);
  s.age = age.sample(rng);
  s.t = 0.0;
  return s;
}

Model ModelConfig::model() const {
  return Model(intake, interarrival, metabolic, first_interarrival);
}

InitialMoments ModelConfig::initial_moments() const {
  return {initial.x.mean() + initial_tilde.x.mean(), expected_max(initial.x, initial_tilde.x)};
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
  return from_yaml(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  try {
    return parse_config(os.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

DistributionSpec parse_distribution_text(const std::string& text, Role role) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_distribution(node, role, "distribution");
}

}  // namespace pdmp
