#include "awsgd/config_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace awsgd {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("key '" + key + "' must be a number");
  return obj[key].get<double>();
}

LossKind parse_loss(const json& obj, const std::string& where) {
  if (obj.is_string()) {
    const std::string name = obj.get<std::string>();
    if (name == "squared_hinge") return LossKind::squared_hinge();
    if (name == "hinge") return LossKind::hinge();
    if (name == "logistic") return LossKind::logistic();
    if (name == "zero_one") return LossKind::zero_one();
    if (name == "abs_error") return LossKind::abs_error();
    throw ConfigError("unknown loss '" + name + "' in " + where);
  }
  reject_unknown(obj, {"kind", "a", "k"}, where);
  const std::string name = obj.at("kind").get<std::string>();
  if (name == "gen_smooth_hinge") return LossKind::gen_smooth_hinge(get_num(obj, "a", 1.0));
  if (name == "multi_cross_entropy")
    return LossKind::multi_cross_entropy(static_cast<int>(get_num(obj, "k", 2)));
  json plain = name;
  return parse_loss(plain, where);
}

json loss_to_json(const LossKind& kind) {
  switch (kind.tag) {
    case LossTag::gen_smooth_hinge:
      return {{"kind", "gen_smooth_hinge"}, {"a", kind.a}};
    case LossTag::multi_cross_entropy:
      return {{"kind", "multi_cross_entropy"}, {"k", kind.k}};
    default:
      return kind.name();
  }
}

PiSpec parse_pi(const json& obj) {
  reject_unknown(obj, {"family", "a", "b", "mu", "omega", "beta", "rho", "c", "R", "eta",
                       "p", "k", "top2_gap"},
                 "pi");
  const std::string family = obj.at("family").get<std::string>();
  if (family == "exp_saturating") return PiSpec::exp_saturating();
  if (family == "clamp_linear") return PiSpec::clamp_linear();
  if (family == "clamp_power")
    return PiSpec::clamp_power(get_num(obj, "a", 1.0), get_num(obj, "b", 1.0));
  if (family == "ratio") return PiSpec::ratio(get_num(obj, "mu", 1.0));
  if (family == "ratio_sqrt") return PiSpec::ratio_sqrt(get_num(obj, "mu", 1.0));
  if (family == "star_squared_hinge")
    return PiSpec::star_squared_hinge(get_num(obj, "beta", 2.0), get_num(obj, "mu", 1.0));
  if (family == "star_gsh")
    return PiSpec::star_gsh(get_num(obj, "a", 1.0), get_num(obj, "beta", 1.0),
                            get_num(obj, "rho", 2.0));
  if (family == "abs_error_proportional")
    return PiSpec::abs_error_proportional(get_num(obj, "omega", 0.5));
  if (family == "zero_one_proportional")
    return PiSpec::zero_one_proportional(get_num(obj, "omega", 1.0));
  if (family == "uncertainty_binary")
    return PiSpec::uncertainty_binary(get_num(obj, "a", 0.5), get_num(obj, "beta", 1.0),
                                      get_num(obj, "c", 0.5), get_num(obj, "rho", 1.0),
                                      get_num(obj, "R", 1.0));
  if (family == "uncertainty_multiclass") {
    PiSpec spec = PiSpec::uncertainty_multiclass(
        get_num(obj, "a", 0.5), get_num(obj, "beta", 1.0), get_num(obj, "c", 0.5),
        get_num(obj, "rho", 1.0), get_num(obj, "R", 1.0),
        static_cast<int>(get_num(obj, "k", 2)));
    if (obj.contains("top2_gap")) spec.top2_gap = obj["top2_gap"].get<bool>();
    return spec;
  }
  if (family == "power_of_zeta")
    return PiSpec::power_of_zeta(get_num(obj, "eta", 1.0), get_num(obj, "beta", 1.0),
                                 get_num(obj, "rho", 1.0));
  if (family == "constant") return PiSpec::constant(get_num(obj, "p", 1.0));
  throw ConfigError("unknown pi family '" + family + "'");
}

json pi_to_json(const PiSpec& s) {
  json o{{"family", s.name()}};
  switch (s.family) {
    case PiFamily::clamp_power: o["a"] = s.a; o["b"] = s.b; break;
    case PiFamily::ratio:
    case PiFamily::ratio_sqrt: o["mu"] = s.mu; break;
    case PiFamily::star_squared_hinge: o["beta"] = s.beta; o["mu"] = s.mu; break;
    case PiFamily::star_gsh: o["a"] = s.a; o["beta"] = s.beta; o["rho"] = s.rho; break;
    case PiFamily::abs_error_proportional:
    case PiFamily::zero_one_proportional: o["omega"] = s.omega; break;
    case PiFamily::uncertainty_binary:
      o["a"] = s.a; o["beta"] = s.beta; o["c"] = s.c; o["rho"] = s.rho; o["R"] = s.R;
      break;
    case PiFamily::uncertainty_multiclass:
      o["a"] = s.a; o["beta"] = s.beta; o["c"] = s.c; o["rho"] = s.rho; o["R"] = s.R;
      o["k"] = s.k; o["top2_gap"] = s.top2_gap;
      break;
    case PiFamily::power_of_zeta: o["eta"] = s.eta; o["beta"] = s.beta; o["rho"] = s.rho; break;
    case PiFamily::constant: o["p"] = s.p; break;
    default: break;
  }
  return o;
}

EstimatorKind parse_estimator(const json& obj) {
  reject_unknown(obj, {"kind", "alpha", "k", "trees", "warmup_steps", "max_depth",
                       "min_leaf", "refit_every", "warmup_estimate"},
                 "estimator");
  const std::string kind = obj.at("kind").get<std::string>();
  EstimatorKind e;
  if (kind == "oracle") {
    e = EstimatorKind::oracle();
  } else if (kind == "beta_noise") {
    e = EstimatorKind::beta_noise(get_num(obj, "alpha", 100.0));
  } else if (kind == "knn") {
    e = EstimatorKind::knn(static_cast<int>(get_num(obj, "k", 3)));
  } else if (kind == "forest") {
    e = EstimatorKind::forest(static_cast<int>(get_num(obj, "trees", 25)),
                              static_cast<int>(get_num(obj, "warmup_steps", 1)),
                              static_cast<int>(get_num(obj, "max_depth", 8)),
                              static_cast<int>(get_num(obj, "min_leaf", 2)));
    e.refit_every = static_cast<int>(get_num(obj, "refit_every", 1));
  } else {
    throw ConfigError("unknown estimator kind '" + kind + "'");
  }
  e.warmup_estimate = get_num(obj, "warmup_estimate", 0.5);
  return e;
}

json estimator_to_json(const EstimatorKind& e) {
  json o{{"kind", e.name()}};
  switch (e.tag) {
    case EstimatorTag::beta_noise: o["alpha"] = e.alpha; break;
    case EstimatorTag::knn: o["k"] = e.k; break;
    case EstimatorTag::forest:
      o["trees"] = e.trees; o["warmup_steps"] = e.warmup_steps;
      o["max_depth"] = e.max_depth; o["min_leaf"] = e.min_leaf;
      o["refit_every"] = e.refit_every;
      break;
    default: break;
  }
  return o;
}

LabelMap parse_label_map(const std::string& name) {
  if (name == "auto") return LabelMap::auto_detect;
  if (name == "zero_one") return LabelMap::zero_one;
  if (name == "one_two") return LabelMap::one_two;
  if (name == "none") return LabelMap::none;
  throw ConfigError("unknown label_map '" + name + "'");
}

DatasetSpec parse_dataset(const json& obj) {
  reject_unknown(obj, {"kind", "path", "label_map", "n", "d", "rho_star", "R", "seed",
                       "theta_scale", "rbf"},
                 "dataset");
  DatasetSpec spec;
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "libsvm")
    spec.kind = DatasetSpec::Kind::libsvm;
  else if (kind == "csv")
    spec.kind = DatasetSpec::Kind::csv;
  else if (kind == "margin")
    spec.kind = DatasetSpec::Kind::margin;
  else if (kind == "tictactoe")
    spec.kind = DatasetSpec::Kind::tictactoe;
  else
    throw ConfigError("unknown dataset kind '" + kind + "'");
  if (obj.contains("path")) spec.path = obj["path"].get<std::string>();
  if (obj.contains("label_map")) spec.label_map = parse_label_map(obj["label_map"]);
  spec.margin.n = static_cast<std::size_t>(get_num(obj, "n", 1000));
  spec.margin.d = static_cast<int>(get_num(obj, "d", 10));
  spec.margin.rho_star = get_num(obj, "rho_star", 0.5);
  spec.margin.R = get_num(obj, "R", 1.0);
  spec.margin.seed = static_cast<std::uint64_t>(get_num(obj, "seed", 0));
  spec.theta_scale = get_num(obj, "theta_scale", 1.0);
  if (obj.contains("rbf")) {
    const json& r = obj["rbf"];
    reject_unknown(r, {"landmarks", "gamma", "seed"}, "dataset.rbf");
    RbfSpec rbf;
    rbf.landmarks = static_cast<std::size_t>(get_num(r, "landmarks", 300));
    rbf.gamma = get_num(r, "gamma", 0.0);
    rbf.seed = static_cast<std::uint64_t>(get_num(r, "seed", 0));
    spec.rbf = rbf;
  }
  return spec;
}

json dataset_to_json(const DatasetSpec& spec) {
  json o;
  switch (spec.kind) {
    case DatasetSpec::Kind::libsvm: o["kind"] = "libsvm"; o["path"] = spec.path; break;
    case DatasetSpec::Kind::csv: o["kind"] = "csv"; o["path"] = spec.path; break;
    case DatasetSpec::Kind::tictactoe: o["kind"] = "tictactoe"; break;
    case DatasetSpec::Kind::margin:
      o["kind"] = "margin";
      o["n"] = spec.margin.n;
      o["d"] = spec.margin.d;
      o["rho_star"] = spec.margin.rho_star;
      o["R"] = spec.margin.R;
      o["seed"] = spec.margin.seed;
      o["theta_scale"] = spec.theta_scale;
      break;
  }
  if (spec.rbf)
    o["rbf"] = {{"landmarks", spec.rbf->landmarks}, {"gamma", spec.rbf->gamma},
                {"seed", spec.rbf->seed}};
  return o;
}

StepPolicy parse_policy(const json& obj) {
  reject_unknown(obj, {"kind", "gamma", "beta", "rho"}, "step_policy");
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "constant_weight") return StepPolicy::constant_weight(get_num(obj, "gamma", 1.0));
  if (kind == "adaptive_weight")
    return StepPolicy::adaptive_weight(get_num(obj, "beta", 1.0), get_num(obj, "rho", 1.0));
  throw ConfigError("unknown step_policy kind '" + kind + "'");
}

json policy_to_json(const StepPolicy& p) {
  if (p.is_adaptive())
    return {{"kind", "adaptive_weight"}, {"beta", p.beta}, {"rho", p.rho}};
  return {{"kind", "constant_weight"}, {"gamma", p.gamma}};
}

}  // namespace

MaterializedDataset materialize(const DatasetSpec& spec) {
  MaterializedDataset out;
  switch (spec.kind) {
    case DatasetSpec::Kind::libsvm:
      out.data = load_libsvm(spec.path, spec.label_map);
      break;
    case DatasetSpec::Kind::csv:
      out.data = load_csv(spec.path, spec.label_map);
      break;
    case DatasetSpec::Kind::tictactoe:
      out.data = gen_tictactoe();
      break;
    case DatasetSpec::Kind::margin: {
      auto [ds, theta_star] = gen_margin_dataset(spec.margin);
      if (spec.theta_scale != 1.0) scale(theta_star, spec.theta_scale);
      out.data = std::move(ds);
      out.theta_star = std::move(theta_star);
      break;
    }
  }
  if (spec.rbf) {
    out.data = rbf_featurize(out.data, spec.rbf->landmarks, spec.rbf->gamma, spec.rbf->seed);
    out.theta_star.reset();  // the separator does not survive featurization
  }
  return out;
}

RunSpec parse_run_spec_json(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root,
                 {"dataset", "train_loss", "eval_losses", "step_policy", "pi", "pi_scale",
                  "sampling_loss", "discrete_abs_input", "estimator", "projection",
                  "theta_init", "n_iterations", "allow_repeat", "shuffle", "seed"},
                 "config");
  RunSpec spec;
  spec.dataset = parse_dataset(root.at("dataset"));
  RunConfig& cfg = spec.config;
  if (root.contains("train_loss")) cfg.train_loss = parse_loss(root["train_loss"], "train_loss");
  if (root.contains("eval_losses")) {
    cfg.eval_losses.clear();
    for (const auto& item : root["eval_losses"])
      cfg.eval_losses.push_back(parse_loss(item, "eval_losses"));
  }
  if (root.contains("step_policy")) cfg.policy = parse_policy(root["step_policy"]);
  if (root.contains("pi")) cfg.pi = parse_pi(root["pi"]);
  cfg.pi_scale = get_num(root, "pi_scale", 1.0);
  if (root.contains("sampling_loss"))
    cfg.sampling_loss = parse_loss(root["sampling_loss"], "sampling_loss");
  if (root.contains("discrete_abs_input"))
    cfg.discrete_abs_input = root["discrete_abs_input"].get<bool>();
  if (root.contains("estimator")) cfg.estimator = parse_estimator(root["estimator"]);
  if (root.contains("projection")) {
    const json& p = root["projection"];
    reject_unknown(p, {"radius", "center"}, "projection");
    cfg.projection.radius = get_num(p, "radius", std::numeric_limits<double>::infinity());
    if (p.contains("center") && !p["center"].is_null())
      cfg.projection.center = p["center"].get<Vec>();
  }
  if (root.contains("theta_init") && !root["theta_init"].is_null())
    cfg.theta_init = root["theta_init"].get<Vec>();
  cfg.n_iterations = static_cast<std::size_t>(get_num(root, "n_iterations", 0));
  if (root.contains("allow_repeat")) cfg.allow_repeat = root["allow_repeat"].get<bool>();
  if (root.contains("shuffle")) cfg.shuffle = root["shuffle"].get<bool>();
  cfg.seed = static_cast<std::uint64_t>(get_num(root, "seed", 1));
  return spec;
}

RunSpec load_run_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_spec_json(buf.str());
}

std::string apply_override(const std::string& json_text, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json root = json::parse(json_text);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare strings pass through
  }
  json* node = &root;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("--set: empty key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
  return root.dump();
}

std::string run_spec_to_json(const RunSpec& spec) {
  const RunConfig& cfg = spec.config;
  json o;
  o["dataset"] = dataset_to_json(spec.dataset);
  o["train_loss"] = loss_to_json(cfg.train_loss);
  json evals = json::array();
  for (const auto& kind : cfg.eval_losses) evals.push_back(loss_to_json(kind));
  o["eval_losses"] = evals;
  o["step_policy"] = policy_to_json(cfg.policy);
  o["pi"] = pi_to_json(cfg.pi);
  o["pi_scale"] = cfg.pi_scale;
  o["sampling_loss"] = loss_to_json(cfg.sampling_loss);
  o["discrete_abs_input"] = cfg.discrete_abs_input;
  o["estimator"] = estimator_to_json(cfg.estimator);
  if (std::isfinite(cfg.projection.radius)) {
    o["projection"] = {{"radius", cfg.projection.radius}};
    if (!cfg.projection.center.empty()) o["projection"]["center"] = cfg.projection.center;
  }
  o["n_iterations"] = cfg.n_iterations;
  o["allow_repeat"] = cfg.allow_repeat;
  o["shuffle"] = cfg.shuffle;
  o["seed"] = cfg.seed;
  return o.dump(2);
}

std::string summary_json(const RunResult& result, const std::vector<LossKind>& eval_losses) {
  json o;
  json losses;
  for (std::size_t i = 0; i < eval_losses.size(); ++i)
    losses[eval_losses[i].name()] = result.avg_progressive_losses[i];
  o["avg_progressive_losses"] = losses;
  o["total_samples"] = result.total_samples;
  o["sampling_rate"] = result.sampling_rate;
  o["n_iterations"] = result.rows.size();
  o["wall_seconds"] = result.wall_seconds;
  return o.dump(2);
}

}  // namespace awsgd
