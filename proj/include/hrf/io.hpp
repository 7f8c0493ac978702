#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrf/hrf.hpp"
#include "hrf/sampler.hpp"

namespace hrf {

using json = nlohmann::json;

/// DistributionSpec <-> tagged JSON ({"variant": ..., ...}).
json spec_to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const json& j);

json mlp_config_to_json(const MlpConfig& cfg);
MlpConfig mlp_config_from_json(const json& j);

/// Versioned checkpoint: network config, per-level sources, seed, and the
/// flat parameter vector.
void save_checkpoint(const std::filesystem::path& path, const HrfModel& model,
                     std::uint64_t seed);
HrfModel load_checkpoint(const std::filesystem::path& path,
                         std::uint64_t* seed = nullptr);

/// Declarative experiment description; parsing rejects unknown keys.
struct ExperimentConfig {
  std::string name = "experiment";
  int depth = 2;
  DistributionSpec source = StandardGaussian{1};
  DistributionSpec target = StandardGaussian{1};
  MlpConfig net;
  TrainConfig train;
  std::vector<SamplerSchedule> schedules;
  // evaluation
  Eigen::Index eval_samples = 100000;
  std::string metric = "w1";  // or "swd"
  int n_projections = 512;
  // ablation protocol
  int n_models = 5;
  int n_eval_repeats = 5;
  std::uint64_t seed = 0;

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// FNV-1a hash of the canonical serialization; stable across re-parses.
std::string config_hash(const ExperimentConfig& cfg);

/// Run manifest: config hash, seed, timestamps, and every emitted artifact.
struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started_at, finished_at;
  std::vector<std::string> artifacts;

  void save(const std::filesystem::path& path) const;
};

std::string timestamp_utc();

// CSV helpers
void write_samples_csv(const std::filesystem::path& path, const MatrixXd& pts);
MatrixXd read_samples_csv(const std::filesystem::path& path);
void write_loss_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<int, double>>& curve);
void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<Trajectory>& trajs);

}  // namespace hrf
