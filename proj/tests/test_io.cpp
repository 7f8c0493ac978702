#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "hrf/fixtures.hpp"
#include "hrf/io.hpp"

using namespace hrf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("hrf_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
#ifdef HRF_CLI_PATH
  const std::string cmd = std::string(HRF_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
#else
  (void)args;
  return -1;
#endif
}

json small_config() {
  ExperimentConfig cfg;
  cfg.name = "smoke";
  cfg.depth = 1;
  cfg.source = StandardGaussian{1};
  cfg.target = fixtures::single_gauss_1d(1.0, 0.5);
  cfg.net.depth = 1;
  cfg.net.embed_dim = 8;
  cfg.net.slot_width = 8;
  cfg.net.trunk_hidden = {16};
  cfg.train.depth = 1;
  cfg.train.batch = 64;
  cfg.train.iterations = 60;
  cfg.train.log_every = 20;
  cfg.train.dataset_size = 1024;
  cfg.schedules = {SamplerSchedule{{10}}};
  cfg.eval_samples = 2000;
  cfg.n_models = 1;
  cfg.n_eval_repeats = 1;
  cfg.seed = 3;
  return cfg.to_json();
}

}  // namespace

TEST_CASE("distribution specs round trip through json") {
  for (const DistributionSpec& spec :
       {DistributionSpec(StandardGaussian{2}),
        DistributionSpec(fixtures::two_gauss_1d()),
        DistributionSpec(fixtures::moons()),
        DistributionSpec(fixtures::ring8())}) {
    const DistributionSpec back = spec_from_json(spec_to_json(spec));
    CHECK(spec_to_json(back) == spec_to_json(spec));
    CHECK(spec_dim(back) == spec_dim(spec));
  }
  CHECK_THROWS_AS(spec_from_json(json{{"variant", "laplace"}}), ConfigError);
  CHECK_THROWS_AS(
      spec_from_json(json{{"variant", "moons"}, {"bogus", 1}}), ConfigError);
}

TEST_CASE("experiment config round trip is the identity") {
  const json j = small_config();
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.to_json() == j);
  CHECK(config_hash(cfg) ==
        config_hash(ExperimentConfig::from_json(cfg.to_json())));
}

TEST_CASE("unknown config keys are rejected") {
  json j = small_config();
  j["typo_key"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = small_config();
  j["train"]["momentum"] = 0.1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = small_config();
  j["train"]["lr_decay"] = "linear";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = small_config();
  j.erase("target");
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = small_config();
  j["eval"]["metric"] = "mmd";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
}

TEST_CASE("checkpoints restore the exact parameter vector") {
  const fs::path dir = temp_dir();
  Rng rng(1);
  HrfModel model;
  MlpConfig nc;
  nc.depth = 2;
  nc.embed_dim = 8;
  nc.slot_width = 8;
  nc.trunk_hidden = {16};
  model.net = Mlp(nc, rng);
  model.sources = {StandardGaussian{1}, StandardGaussian{1}};

  save_checkpoint(dir / "ckpt.json", model, 42);
  std::uint64_t seed = 0;
  const HrfModel back = load_checkpoint(dir / "ckpt.json", &seed);
  CHECK(seed == 42);
  CHECK(back.net.params() == model.net.params());
  CHECK(back.depth() == 2);
  CHECK(back.sources.size() == 2);

  // byte determinism of repeated saves
  save_checkpoint(dir / "ckpt2.json", model, 42);
  std::ifstream a(dir / "ckpt.json"), b(dir / "ckpt2.json");
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  fs::remove_all(dir);
}

TEST_CASE("csv round trips") {
  const fs::path dir = temp_dir();
  Rng rng(2);
  const MatrixXd pts = rng.normal_mat(17, 2);
  write_samples_csv(dir / "s.csv", pts);
  const MatrixXd back = read_samples_csv(dir / "s.csv");
  CHECK(back == pts);  // 17 significant digits round trip doubles

  std::ofstream(dir / "empty.csv");
  CHECK_THROWS_AS(read_samples_csv(dir / "empty.csv"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("manifest lists artifacts") {
  const fs::path dir = temp_dir();
  RunManifest m;
  m.config_hash = "abc";
  m.seed = 7;
  m.started_at = m.finished_at = timestamp_utc();
  m.artifacts = {"samples.csv"};
  m.save(dir / "manifest.json");
  std::ifstream in(dir / "manifest.json");
  json j;
  in >> j;
  CHECK(j["config_hash"] == "abc");
  CHECK(j["artifacts"].size() == 1);
  fs::remove_all(dir);
}

#ifdef HRF_CLI_PATH
TEST_CASE("cli end to end: train, sample, eval, density exit codes") {
  const fs::path dir = temp_dir();
  {
    std::ofstream out(dir / "cfg.json");
    out << small_config().dump();
  }

  // invalid config -> exit 2
  {
    json bad = small_config();
    bad.erase("target");
    std::ofstream out(dir / "bad.json");
    out << bad.dump();
  }
  CHECK(run_cli("train --config " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("train --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("bogus-subcommand") == 2);

  const std::string out1 = (dir / "run1").string();
  const std::string out2 = (dir / "run2").string();
  CHECK(run_cli("train --config " + (dir / "cfg.json").string() + " --out " +
                out1) == 0);
  CHECK(fs::exists(dir / "run1" / "checkpoint.json"));
  CHECK(fs::exists(dir / "run1" / "loss.csv"));
  CHECK(fs::exists(dir / "run1" / "manifest.json"));
  {
    // loss.csv has header + iterations/log_every + final row
    std::ifstream in(dir / "run1" / "loss.csv");
    int lines = 0;
    std::string l;
    while (std::getline(in, l)) lines++;
    CHECK(lines == 1 + 60 / 20 + 1);
  }

  // same seed, same config -> byte-identical checkpoint
  CHECK(run_cli("train --config " + (dir / "cfg.json").string() + " --out " +
                out2) == 0);
  std::ifstream a(dir / "run1" / "checkpoint.json"),
      b(dir / "run2" / "checkpoint.json");
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);

  const std::string ckpt = (dir / "run1" / "checkpoint.json").string();
  CHECK(run_cli("sample --checkpoint " + ckpt +
                " --steps 5 -n 200 --trajectories --out " + out1) == 0);
  CHECK(read_samples_csv(dir / "run1" / "samples.csv").rows() == 200);
  CHECK(fs::exists(dir / "run1" / "trajectories.csv"));

  // schedule depth mismatch -> exit 2
  CHECK(run_cli("sample --checkpoint " + ckpt + " --steps 5,5 -n 10 --out " +
                out1) == 2);

  CHECK(run_cli("eval --samples " + (dir / "run1" / "samples.csv").string() +
                " --config " + (dir / "cfg.json").string() + " --out " +
                out1) == 0);
  CHECK(fs::exists(dir / "run1" / "metrics.csv"));

  // density needs depth 2 -> exit 2 on this depth-1 checkpoint
  CHECK(run_cli("density --checkpoint " + ckpt + " --out " + out1) == 2);

  fs::remove_all(dir);
}
#endif
