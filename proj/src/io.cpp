#include "hrf/io.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace hrf {

namespace {

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

VectorXd json_to_vec(const json& j) {
  VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

MatrixXd json_to_mat(const json& j) {
  if (j.empty()) return MatrixXd(0, 0);
  MatrixXd m(j.size(), j[0].size());
  Eigen::Index r = 0;
  for (const auto& row : j) {
    Eigen::Index c = 0;
    for (const auto& x : row) m(r, c++) = x.get<double>();
    ++r;
  }
  return m;
}

json mat_to_json(const MatrixXd& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

json vec_to_json(const VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

json spec_to_json(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StandardGaussian>) {
          return {{"variant", "standard_gaussian"}, {"dim", s.dim}};
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return {{"variant", "gaussian_mixture"},
                  {"weights", vec_to_json(s.weights)},
                  {"means", mat_to_json(s.means)},
                  {"stds", mat_to_json(s.stds)}};
        } else if constexpr (std::is_same_v<T, Moons>) {
          return {{"variant", "moons"}, {"noise_std", s.noise_std}};
        } else {
          return {{"variant", "gaussian_ring"},
                  {"count", s.count},
                  {"radius", s.radius},
                  {"component_std", s.component_std}};
        }
      },
      spec);
}

DistributionSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant"))
    throw ConfigError("distribution spec must be an object with a 'variant'");
  const std::string v = j.at("variant").get<std::string>();
  if (v == "standard_gaussian") {
    require_keys(j, {"variant", "dim"}, "standard_gaussian");
    return StandardGaussian{j.at("dim").get<int>()};
  }
  if (v == "gaussian_mixture") {
    require_keys(j, {"variant", "weights", "means", "stds"},
                 "gaussian_mixture");
    GaussianMixture m;
    m.weights = json_to_vec(j.at("weights"));
    m.means = json_to_mat(j.at("means"));
    m.stds = json_to_mat(j.at("stds"));
    m.validate();
    return m;
  }
  if (v == "moons") {
    require_keys(j, {"variant", "noise_std"}, "moons");
    Moons m;
    if (j.contains("noise_std")) m.noise_std = j.at("noise_std").get<double>();
    return m;
  }
  if (v == "gaussian_ring") {
    require_keys(j, {"variant", "count", "radius", "component_std"},
                 "gaussian_ring");
    GaussianRing r;
    r.count = j.at("count").get<int>();
    r.radius = j.at("radius").get<double>();
    r.component_std = j.at("component_std").get<double>();
    return r;
  }
  throw ConfigError("unknown distribution variant: " + v);
}

json mlp_config_to_json(const MlpConfig& cfg) {
  return {{"depth", cfg.depth},
          {"space_dim", cfg.space_dim},
          {"embed_dim", cfg.embed_dim},
          {"slot_width", cfg.slot_width},
          {"trunk_hidden", cfg.trunk_hidden},
          {"activation",
           cfg.activation == Activation::SmoothGate ? "smooth-gated" : "tanh"},
          {"zero_init_last", cfg.zero_init_last}};
}

MlpConfig mlp_config_from_json(const json& j) {
  require_keys(j,
               {"depth", "space_dim", "embed_dim", "slot_width",
                "trunk_hidden", "activation", "zero_init_last"},
               "net config");
  MlpConfig cfg;
  if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
  if (j.contains("space_dim")) cfg.space_dim = j.at("space_dim").get<int>();
  if (j.contains("embed_dim")) cfg.embed_dim = j.at("embed_dim").get<int>();
  if (j.contains("slot_width"))
    cfg.slot_width = j.at("slot_width").get<int>();
  if (j.contains("trunk_hidden"))
    cfg.trunk_hidden = j.at("trunk_hidden").get<std::vector<int>>();
  if (j.contains("activation")) {
    const std::string a = j.at("activation").get<std::string>();
    if (a == "smooth-gated")
      cfg.activation = Activation::SmoothGate;
    else if (a == "tanh")
      cfg.activation = Activation::Tanh;
    else
      throw ConfigError("unknown activation: " + a);
  }
  if (j.contains("zero_init_last"))
    cfg.zero_init_last = j.at("zero_init_last").get<bool>();
  cfg.validate();
  return cfg;
}

void save_checkpoint(const std::filesystem::path& path, const HrfModel& model,
                     std::uint64_t seed) {
  json j;
  j["version"] = 1;
  j["net"] = mlp_config_to_json(model.net.config());
  j["depth"] = model.depth();
  j["seed"] = seed;
  json srcs = json::array();
  for (const auto& s : model.sources) srcs.push_back(spec_to_json(s));
  j["sources"] = srcs;
  j["params"] = vec_to_json(model.net.params());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path.string());
  out << j.dump() << "\n";
}

HrfModel load_checkpoint(const std::filesystem::path& path,
                         std::uint64_t* seed) {
  const json j = load_json_file(path);
  require_keys(j, {"version", "net", "depth", "seed", "sources", "params"},
               "checkpoint");
  if (!j.contains("version") || j.at("version").get<int>() != 1)
    throw ConfigError("unsupported checkpoint version");
  HrfModel model;
  const MlpConfig cfg = mlp_config_from_json(j.at("net"));
  Rng dummy(0);
  model.net = Mlp(cfg, dummy);
  const VectorXd params = json_to_vec(j.at("params"));
  if (params.size() != model.net.param_count())
    throw ConfigError("checkpoint parameter count mismatch");
  model.net.params() = params;
  for (const auto& s : j.at("sources")) model.sources.push_back(spec_from_json(s));
  if (static_cast<int>(model.sources.size()) != cfg.depth)
    throw ConfigError("checkpoint sources do not match depth");
  if (seed) *seed = j.at("seed").get<std::uint64_t>();
  return model;
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["name"] = name;
  j["depth"] = depth;
  j["source"] = spec_to_json(source);
  j["target"] = spec_to_json(target);
  j["net"] = mlp_config_to_json(net);
  j["train"] = {{"batch", train.batch},
                {"iterations", train.iterations},
                {"lr", train.lr},
                {"lr_decay",
                 train.lr_decay == LrDecay::Cosine ? "cosine" : "none"},
                {"log_every", train.log_every},
                {"coupling",
                 train.coupling == CouplingMode::Independent ? "independent"
                                                             : "ot"},
                {"ot_cap", train.ot_cap},
                {"dataset_size", train.dataset_size},
                {"fresh_samples", train.fresh_samples}};
  json scheds = json::array();
  for (const auto& s : schedules) scheds.push_back(s.steps);
  j["schedules"] = scheds;
  j["eval"] = {{"n_samples", eval_samples},
               {"metric", metric},
               {"n_projections", n_projections}};
  j["ablate"] = {{"n_models", n_models}, {"n_eval_repeats", n_eval_repeats}};
  j["seed"] = seed;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  require_keys(j,
               {"schema_version", "name", "depth", "source", "target", "net",
                "train", "schedules", "eval", "ablate", "seed"},
               "experiment config");
  if (!j.contains("schema_version") ||
      j.at("schema_version").get<int>() != 1)
    throw ConfigError("unsupported or missing config schema_version");
  ExperimentConfig cfg;
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
  if (!j.contains("target")) throw ConfigError("config is missing 'target'");
  cfg.target = spec_from_json(j.at("target"));
  if (j.contains("source"))
    cfg.source = spec_from_json(j.at("source"));
  else
    cfg.source = StandardGaussian{spec_dim(cfg.target)};
  if (j.contains("net"))
    cfg.net = mlp_config_from_json(j.at("net"));
  cfg.net.depth = cfg.depth;
  cfg.net.space_dim = spec_dim(cfg.target);
  if (j.contains("train")) {
    const json& t = j.at("train");
    require_keys(t,
                 {"batch", "iterations", "lr", "lr_decay", "log_every",
                  "coupling", "ot_cap", "dataset_size", "fresh_samples"},
                 "train config");
    if (t.contains("batch")) cfg.train.batch = t.at("batch").get<int>();
    if (t.contains("iterations"))
      cfg.train.iterations = t.at("iterations").get<int>();
    if (t.contains("lr")) cfg.train.lr = t.at("lr").get<double>();
    if (t.contains("lr_decay")) {
      const std::string d = t.at("lr_decay").get<std::string>();
      if (d == "cosine")
        cfg.train.lr_decay = LrDecay::Cosine;
      else if (d == "none")
        cfg.train.lr_decay = LrDecay::None;
      else
        throw ConfigError("unknown lr_decay '" + d + "'");
    }
    if (t.contains("log_every"))
      cfg.train.log_every = t.at("log_every").get<int>();
    if (t.contains("coupling")) {
      const std::string c = t.at("coupling").get<std::string>();
      if (c == "independent")
        cfg.train.coupling = CouplingMode::Independent;
      else if (c == "ot")
        cfg.train.coupling = CouplingMode::OptimalTransport;
      else
        throw ConfigError("unknown coupling mode: " + c);
    }
    if (t.contains("ot_cap")) cfg.train.ot_cap = t.at("ot_cap").get<int>();
    if (t.contains("dataset_size"))
      cfg.train.dataset_size = t.at("dataset_size").get<int>();
    if (t.contains("fresh_samples"))
      cfg.train.fresh_samples = t.at("fresh_samples").get<bool>();
  }
  cfg.train.depth = cfg.depth;
  if (j.contains("schedules"))
    for (const auto& s : j.at("schedules"))
      cfg.schedules.push_back(SamplerSchedule{s.get<std::vector<int>>()});
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    require_keys(e, {"n_samples", "metric", "n_projections"}, "eval config");
    if (e.contains("n_samples"))
      cfg.eval_samples = e.at("n_samples").get<Eigen::Index>();
    if (e.contains("metric")) cfg.metric = e.at("metric").get<std::string>();
    if (cfg.metric != "w1" && cfg.metric != "swd")
      throw ConfigError("unknown metric: " + cfg.metric);
    if (e.contains("n_projections"))
      cfg.n_projections = e.at("n_projections").get<int>();
  }
  if (j.contains("ablate")) {
    const json& a = j.at("ablate");
    require_keys(a, {"n_models", "n_eval_repeats"}, "ablate config");
    if (a.contains("n_models")) cfg.n_models = a.at("n_models").get<int>();
    if (a.contains("n_eval_repeats"))
      cfg.n_eval_repeats = a.at("n_eval_repeats").get<int>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.train.seed = cfg.seed;
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_json(load_json_file(path));
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = cfg.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

void RunManifest::save(const std::filesystem::path& path) const {
  json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["artifacts"] = artifacts;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

void write_samples_csv(const std::filesystem::path& path,
                       const MatrixXd& pts) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.precision(17);
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
      if (c) out << ',';
      out << pts(r, c);
    }
    out << '\n';
  }
}

MatrixXd read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows[0].size())
      throw ConfigError("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty samples file: " + path.string());
  MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[0].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_loss_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<int, double>>& curve) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.precision(17);
  out << "iteration,loss\n";
  for (const auto& [it, loss] : curve) out << it << ',' << loss << '\n';
}

void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<Trajectory>& trajs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.precision(17);
  out << "sample_id,step,t";
  const Eigen::Index dim = trajs.empty() ? 0 : trajs[0].positions.cols();
  for (Eigen::Index d = 0; d < dim; ++d) out << ",z" << d;
  out << '\n';
  for (std::size_t i = 0; i < trajs.size(); ++i)
    for (Eigen::Index s = 0; s < trajs[i].times.size(); ++s) {
      out << i << ',' << s << ',' << trajs[i].times[s];
      for (Eigen::Index d = 0; d < dim; ++d)
        out << ',' << trajs[i].positions(s, d);
      out << '\n';
    }
}

}  // namespace hrf
