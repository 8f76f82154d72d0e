#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdmp/bounds.hpp"
#include "pdmp/distributions.hpp"
#include "pdmp/process.hpp"

namespace pdmp {

/// Malformed configuration; the message carries the line and the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Law of an initial state, one independent law per coordinate.
struct InitialLaw {
  DistributionSpec x;
  DistributionSpec theta;
  DistributionSpec age;

  ProcessState sample(RandomStream& rng) const;
};

struct ModelConfig {
  DistributionSpec intake;
  DistributionSpec interarrival;
  DistributionSpec metabolic;
  std::optional<DistributionSpec> first_interarrival;
  InitialLaw initial;
  InitialLaw initial_tilde;

  Model model() const;
  /// E[X0 + X~0] and E[X0 v X~0] under independent initial laws.
  InitialMoments initial_moments() const;
};

struct CouplingConfig {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> epsilon_tv;  // default exp(-v' (beta - alpha) t)
  std::optional<AgeCase> age_case;
  std::optional<AgeCouplingParams> age;
};

struct ExperimentConfig {
  double horizon = 0.0;
  std::vector<double> grid;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::size_t parallelism = 0;  // 0: hardware concurrency
};

struct OutputConfig {
  std::string directory = "out";
  bool paths = false;
  std::size_t path_replicas = 1;
};

struct RunConfig {
  ModelConfig model;
  CouplingConfig coupling;
  RateOptions rates;  // `initial`, alpha/beta and age fields are filled from the other sections
  ExperimentConfig experiment;
  OutputConfig outputs;
};

/// Parses a YAML run description. Throws ConfigError with line diagnostics.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Parses a single `{family, params, role?}` record.
DistributionSpec parse_distribution_text(const std::string& text, Role role);

}  // namespace pdmp
