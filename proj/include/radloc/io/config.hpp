#pragma once

#include "radloc/mapping/occupancy_grid.hpp"
#include "radloc/mapping/query_map.hpp"
#include "radloc/matching/matcher.hpp"
#include "radloc/rio/estimator.hpp"
#include "radloc/sim/scenario.hpp"

#include <stdexcept>
#include <string>

namespace radloc::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Ablation {
  bool single_sensor = false;               // use sensor 0 only
  bool disable_heading_constraint = false;  // no landmark factors
};

struct LocalizeParams {
  double interval = 1.0;  // s between match attempts
  double warmup = 2.0;    // s of query-map accumulation before the first attempt
};

/// Every tunable of the pipeline. Field names in the JSON file mirror the
/// member names; absent keys keep their defaults, unknown keys are errors.
struct RunConfig {
  std::uint64_t seed = 1;
  sim::ScenarioConfig scenario;
  sim::SensorRig rig = sim::SensorRig::default_rig();
  rio::RioParams rio;
  bool init_from_gt = true;  // seed the first state from ground truth when available
  mapping::OgmParams ogm;
  mapping::QueryMapParams query;
  int chunk_cells = 80;
  matching::MatcherParams match;
  LocalizeParams localize;
  Ablation ablation;
  bool timing = false;  // wall-clock fields in outputs (breaks byte-identical reruns)

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Extrinsics actually used by the estimator after ablation switches.
  std::vector<RigidTransform> active_extrinsics() const;
  rio::RioParams active_rio() const;
};

/// Throws ConfigError (with the key path) on a malformed file or value.
RunConfig load_config(const std::string& path);
RunConfig config_from_json_text(const std::string& text);
/// Effective configuration, including defaults, as pretty JSON.
std::string config_to_json(const RunConfig& cfg);

}  // namespace radloc::io
