#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "hrf/density.hpp"
#include "hrf/fixtures.hpp"
#include "hrf/io.hpp"
#include "hrf/metrics.hpp"

namespace fs = std::filesystem;
using namespace hrf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<int> parse_steps(const std::string& s) {
  std::vector<int> steps;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    steps.push_back(std::stoi(tok));
  if (steps.empty()) throw ConfigError("empty step schedule");
  return steps;
}

std::string steps_label(const std::vector<int>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(steps[i]);
  }
  return out;
}

double eval_metric(const ExperimentConfig& cfg, const MatrixXd& samples,
                   Rng& rng) {
  const MatrixXd ref = sample(cfg.target, cfg.eval_samples, rng);
  if (samples.cols() != ref.cols())
    throw ConfigError("sample dimension does not match target");
  if (cfg.metric == "swd")
    return sliced_w2(samples, ref, cfg.n_projections, rng);
  if (samples.cols() != 1)
    throw ConfigError("w1 metric needs 1D samples; use swd");
  return wasserstein1_1d(samples.col(0), ref.col(0));
}

void write_metric_csv(const fs::path& path,
                      const std::vector<MetricReport>& rows) {
  std::ofstream out(path);
  out.precision(17);
  out << "metric,value,n_samples,n_projections,seed\n";
  for (const auto& r : rows)
    out << r.metric << ',' << r.value << ',' << r.n_samples << ','
        << r.n_projections << ',' << r.seed << '\n';
}

RunManifest start_manifest(const ExperimentConfig& cfg) {
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.started_at = timestamp_utc();
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& dir) {
  m.finished_at = timestamp_utc();
  m.artifacts.push_back("manifest.json");
  m.save(dir / "manifest.json");
}

int cmd_train(const std::string& config_path, std::int64_t seed_override,
              const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.train.seed = cfg.seed;
  }
  fs::create_directories(out_dir);
  RunManifest manifest = start_manifest(cfg);

  const TrainResult result = train(cfg.train, cfg.net, cfg.source, cfg.target);
  save_checkpoint(fs::path(out_dir) / "checkpoint.json", result.model,
                  cfg.seed);
  write_loss_csv(fs::path(out_dir) / "loss.csv", result.loss_curve);
  manifest.artifacts = {"checkpoint.json", "loss.csv"};
  finish_manifest(manifest, out_dir);
  std::cout << "trained " << cfg.name << ": final loss "
            << result.loss_curve.back().second << "\n";
  return 0;
}

int cmd_sample(const std::string& ckpt_path, const std::string& steps_str,
               long long n, bool record, std::int64_t seed_override,
               const std::string& out_dir) {
  std::uint64_t seed = 0;
  const HrfModel model = load_checkpoint(ckpt_path, &seed);
  if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
  SamplerSchedule schedule{parse_steps(steps_str)};
  schedule.validate();
  if (schedule.depth() != model.depth())
    throw ConfigError("schedule depth " + std::to_string(schedule.depth()) +
                      " does not match checkpoint depth " +
                      std::to_string(model.depth()));
  fs::create_directories(out_dir);

  Rng rng = Rng::child(seed, 10);
  SampleOptions opts;
  opts.record_trajectories = record;
  const MlpField field = model.field();
  const SampleResult result =
      sample_batch(field, model.sources, schedule, n, rng, opts);

  write_samples_csv(fs::path(out_dir) / "samples.csv", result.points);
  RunManifest manifest;
  manifest.seed = seed;
  manifest.started_at = manifest.finished_at = timestamp_utc();
  manifest.config_hash = "nfe=" + std::to_string(schedule.nfe());
  manifest.artifacts = {"samples.csv"};
  if (record) {
    write_trajectories_csv(fs::path(out_dir) / "trajectories.csv",
                           result.trajectories);
    manifest.artifacts.push_back("trajectories.csv");
  }
  finish_manifest(manifest, out_dir);
  std::cout << "wrote " << n << " samples, NFE per sample " << schedule.nfe()
            << "\n";
  return 0;
}

int cmd_eval(const std::string& samples_path, const std::string& config_path,
             std::int64_t seed_override, const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  const MatrixXd samples = read_samples_csv(samples_path);
  fs::create_directories(out_dir);
  RunManifest manifest = start_manifest(cfg);

  Rng rng = Rng::child(cfg.seed, 20);
  MetricReport report;
  report.metric = cfg.metric;
  report.value = eval_metric(cfg, samples, rng);
  report.n_samples = samples.rows();
  report.n_projections = cfg.metric == "swd" ? cfg.n_projections : 0;
  report.seed = cfg.seed;
  write_metric_csv(fs::path(out_dir) / "metrics.csv", {report});
  manifest.artifacts = {"metrics.csv"};
  finish_manifest(manifest, out_dir);
  std::cout << cfg.metric << " = " << report.value << "\n";
  return 0;
}

int cmd_velocity_check(long long n_cond, std::uint64_t seed,
                       const std::string& out_dir) {
  const VelocityLaw law(fixtures::two_gauss_1d());
  const std::vector<std::pair<double, double>> grid = {
      {-1.0, 0.0}, {0.0, 0.4}, {0.5, 0.6}, {1.0, 1.0}};
  fs::create_directories(out_dir);
  Rng rng = Rng::child(seed, 30);

  std::ofstream curves(fs::path(out_dir) / "velocity_curves.csv");
  curves.precision(12);
  curves << "x_t,t,v,analytic_pdf,histogram_density\n";
  std::ofstream l1csv(fs::path(out_dir) / "velocity_l1.csv");
  l1csv.precision(12);
  l1csv << "x_t,t,l1,status\n";

  const double lo = -5.0, hi = 5.0, window = 0.01;
  const int bins = static_cast<int>(std::lround((hi - lo) / window));
  for (const auto& [x_t, t] : grid) {
    VectorXd vs;
    try {
      // rejection-sample X0, X1 pairs conditioned on the interpolant
      // passing near x_t, following the Fig. 2 histogram protocol
      vs = VectorXd(n_cond);
      if (t == 0.0 || t == 1.0) {
        // boundary: one endpoint is pinned, the other is free
        const MatrixXd other =
            t == 0.0 ? sample(DistributionSpec(law.target), n_cond, rng)
                     : MatrixXd(rng.normal_mat(n_cond, 1));
        for (long long i = 0; i < n_cond; ++i)
          vs[i] = t == 0.0 ? other(i, 0) - x_t : x_t - other(i, 0);
      } else {
        long long kept = 0;
        const double half = window / 2.0;
        while (kept < n_cond) {
          const double x0 = rng.normal();
          const double x1 =
              sample(DistributionSpec(law.target), 1, rng)(0, 0);
          const double xt = (1.0 - t) * x0 + t * x1;
          if (std::abs(xt - x_t) <= half) vs[kept++] = x1 - x0;
        }
      }
      const VectorXd hist = histogram(vs, bins, lo, hi);
      double l1 = 0.0;
      for (int b = 0; b < bins; ++b) {
        const double v = lo + (b + 0.5) * window;
        const double pdf = velocity_pdf(law, v, x_t, t);
        curves << x_t << ',' << t << ',' << v << ',' << pdf << ','
               << hist[b] << '\n';
        l1 += std::abs(pdf - hist[b]) * window;
      }
      l1csv << x_t << ',' << t << ',' << l1 << ",ok\n";
      std::cout << "(x_t, t) = (" << x_t << ", " << t << "): L1 = " << l1
                << "\n";
    } catch (const UndefinedRegionError&) {
      l1csv << x_t << ',' << t << ",,undefined-region\n";
      std::cout << "(x_t, t) = (" << x_t << ", " << t
                << "): undefined region, skipped\n";
    }
  }
  return 0;
}

int cmd_density(const std::string& ckpt_path, const std::string& estimator,
                double t, int n_points, int n_avg, bool pin_z0,
                std::int64_t seed_override, const std::string& out_dir) {
  std::uint64_t seed = 0;
  const HrfModel model = load_checkpoint(ckpt_path, &seed);
  if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
  if (model.depth() != 2)
    throw ConfigError("density estimation needs a depth-2 checkpoint");
  if (estimator == "alg4" && (t == 1.0 || t == 0.0))
    throw ConfigError("alg4 requires t strictly inside (0, 1)");
  if (estimator == "alg4" && t > 0.95)
    std::cerr << "warning: t close to 1 inflates estimator variance\n";
  fs::create_directories(out_dir);

  Rng rng = Rng::child(seed, 40);
  const MlpField field = model.field();
  const LikelihoodOptions opts;
  // test points drawn from the data source itself
  const MatrixXd pts = sample(model.sources[0], n_points, rng);

  std::ofstream out(fs::path(out_dir) / "density.csv");
  out.precision(12);
  out << "z1,log_density,bpd,estimator,n_outer\n";
  double mean_bpd = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const VectorXd z1 = pts.row(i).transpose();
    const LikelihoodReport r =
        estimator == "alg3"
            ? density_alg3(field, model.sources[0], z1, rng, n_avg, opts,
                           pin_z0)
            : density_alg4(field, model.sources[0], z1, rng, n_avg, t, opts);
    out << z1[0] << ',' << r.log_density << ',' << r.bpd << ','
        << r.estimator << ',' << r.n_outer_samples << '\n';
    mean_bpd += r.bpd;
  }
  mean_bpd /= n_points;
  out << "aggregate,," << mean_bpd << ",mean,\n";
  std::cout << "mean bpd over " << n_points << " points: " << mean_bpd
            << "\n";
  return 0;
}

int cmd_ablate(const std::string& config_path, std::int64_t seed_override,
               const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.train.seed = cfg.seed;
  }
  if (cfg.schedules.empty())
    throw ConfigError("ablate needs a non-empty schedule grid");
  const long long budget = cfg.schedules[0].nfe();
  for (const auto& s : cfg.schedules) {
    s.validate();
    if (s.depth() != cfg.depth)
      throw ConfigError("schedule depth does not match model depth");
    if (s.nfe() != budget)
      throw ConfigError("all schedules must share one NFE budget");
  }
  fs::create_directories(out_dir);
  RunManifest manifest = start_manifest(cfg);

  std::vector<std::vector<std::vector<double>>> values(
      cfg.schedules.size());  // [schedule][model][repeat]
  for (auto& v : values) v.resize(cfg.n_models);
  for (int m = 0; m < cfg.n_models; ++m) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed + 1000ull * (m + 1);
    const TrainResult result = train(tc, cfg.net, cfg.source, cfg.target);
    const MlpField field = result.model.field();
    for (std::size_t s = 0; s < cfg.schedules.size(); ++s)
      for (int r = 0; r < cfg.n_eval_repeats; ++r) {
        Rng rng = Rng::child(tc.seed, 50 + r);
        const SampleResult sr =
            sample_batch(field, result.model.sources, cfg.schedules[s],
                         cfg.eval_samples, rng);
        values[s][m].push_back(eval_metric(cfg, sr.points, rng));
      }
  }

  std::ofstream out(fs::path(out_dir) / "ablation.csv");
  out.precision(12);
  out << "schedule,nfe,metric,mean,std,n_runs\n";
  for (std::size_t s = 0; s < cfg.schedules.size(); ++s) {
    std::vector<double> flat;
    for (const auto& per_model : values[s])
      flat.insert(flat.end(), per_model.begin(), per_model.end());
    const double n = static_cast<double>(flat.size());
    const double mean =
        std::accumulate(flat.begin(), flat.end(), 0.0) / n;
    double var = 0.0;
    for (double v : flat) var += (v - mean) * (v - mean);
    out << steps_label(cfg.schedules[s].steps) << ','
        << cfg.schedules[s].nfe() << ',' << cfg.metric << ',' << mean << ',';
    if (flat.size() > 1)
      out << std::sqrt(var / (n - 1.0));
    out << ',' << flat.size() << '\n';
    std::cout << steps_label(cfg.schedules[s].steps) << ": " << cfg.metric
              << " = " << mean << "\n";
  }
  manifest.artifacts = {"ablation.csv"};
  finish_manifest(manifest, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical rectified flow experiment harness"};
  app.require_subcommand(1);

  std::string config_path, ckpt_path, samples_path, out_dir = "out";
  std::string steps_str = "5,20", estimator = "alg3";
  std::int64_t seed_override = -1;
  long long n = 1000;
  bool record = false, pin_z0 = false;
  double t = 0.5;
  int n_points = 100, n_avg = 20;
  std::uint64_t vseed = 0;
  long long n_cond = 1000000;

  auto* tr = app.add_subcommand("train", "train a model from a config");
  tr->add_option("--config", config_path)->required();
  tr->add_option("--seed", seed_override);
  tr->add_option("--out", out_dir);

  auto* sa = app.add_subcommand("sample", "generate samples from a checkpoint");
  sa->add_option("--checkpoint", ckpt_path)->required();
  sa->add_option("--steps", steps_str, "per-level Euler steps, outermost first");
  sa->add_option("-n,--num", n);
  sa->add_flag("--trajectories", record);
  sa->add_option("--seed", seed_override);
  sa->add_option("--out", out_dir);

  auto* ev = app.add_subcommand("eval", "score a sample file against a target");
  ev->add_option("--samples", samples_path)->required();
  ev->add_option("--config", config_path)->required();
  ev->add_option("--seed", seed_override);
  ev->add_option("--out", out_dir);

  auto* vc = app.add_subcommand(
      "velocity-check", "analytic vs empirical velocity distributions");
  vc->add_option("-n,--num", n_cond, "conditional samples per grid point");
  vc->add_option("--seed", vseed);
  vc->add_option("--out", out_dir);

  auto* de = app.add_subcommand("density", "likelihood estimation");
  de->add_option("--checkpoint", ckpt_path)->required();
  de->add_option("--estimator", estimator)
      ->check(CLI::IsMember({"alg3", "alg4"}));
  de->add_option("--t", t);
  de->add_option("--points", n_points);
  de->add_option("--n-avg", n_avg);
  de->add_flag("--pin-z0", pin_z0);
  de->add_option("--seed", seed_override);
  de->add_option("--out", out_dir);

  auto* ab = app.add_subcommand("ablate", "step-split ablation grid");
  ab->add_option("--config", config_path)->required();
  ab->add_option("--seed", seed_override);
  ab->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (tr->parsed()) return cmd_train(config_path, seed_override, out_dir);
    if (sa->parsed())
      return cmd_sample(ckpt_path, steps_str, n, record, seed_override,
                        out_dir);
    if (ev->parsed())
      return cmd_eval(samples_path, config_path, seed_override, out_dir);
    if (vc->parsed()) return cmd_velocity_check(n_cond, vseed, out_dir);
    if (de->parsed())
      return cmd_density(ckpt_path, estimator, t, n_points, n_avg, pin_z0,
                         seed_override, out_dir);
    if (ab->parsed()) return cmd_ablate(config_path, seed_override, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
