#include "awsgd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>

#include "awsgd/log.hpp"

namespace awsgd {

void RunConfig::validate(const Dataset& ds) const {
  if (!train_loss.is_trainable())
    throw std::invalid_argument("config: " + train_loss.name() +
                                " is a sampling/evaluation loss, not a training loss");
  if (eval_losses.empty()) throw std::invalid_argument("config: need at least one eval loss");
  const std::size_t n = n_iterations == 0 ? ds.size() : n_iterations;
  if (!allow_repeat && n > ds.size())
    throw std::invalid_argument("config: n_iterations exceeds the single-epoch stream");
  if (pi_scale < 0.0) throw std::invalid_argument("config: pi_scale must be nonnegative");
  pi.validate();
  if (policy.is_adaptive() && (policy.beta <= 0.0 || policy.rho <= 0.0))
    throw std::invalid_argument("config: adaptive-weight policy needs beta > 0 and rho > 0");
  if (!policy.is_adaptive() && policy.gamma <= 0.0)
    throw std::invalid_argument("config: constant-weight policy needs gamma > 0");
  if (!theta_init.empty()) {
    const std::size_t want = ds.task.is_binary()
                                 ? static_cast<std::size_t>(ds.d)
                                 : static_cast<std::size_t>(ds.d) * ds.task.num_classes;
    if (theta_init.size() != want)
      throw std::invalid_argument("config: theta_init has the wrong dimension");
  }
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Probability assigned to the example's own class; stable at any score.
double realized_abs_loss(const Example& ex, const ModelParams& params) {
  if (params.task.is_binary()) return sigmoid(-margin(params, ex));
  const double ce = loss_value(LossKind::multi_cross_entropy(params.task.num_classes), ex, params);
  return 1.0 - std::exp(-ce);
}

double model_prediction_feature(const Example& ex, const ModelParams& params) {
  if (params.task.is_binary()) return predict_prob(params, ex.features);
  const int k = params.task.num_classes;
  double best = -std::numeric_limits<double>::infinity();
  Vec scores(k);
  for (int y = 0; y < k; ++y) {
    scores[y] = dot(params.class_block(y), ex.features);
    best = std::max(best, scores[y]);
  }
  double z = 0.0;
  for (int y = 0; y < k; ++y) z += std::exp(scores[y] - best);
  return 1.0 / z;  // softmax probability of the argmax class
}

}  // namespace

RunResult run_stream(const Dataset& ds, const RunConfig& cfg) {
  cfg.validate(ds);
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = cfg.n_iterations == 0 ? ds.size() : cfg.n_iterations;
  std::mt19937_64 rng(cfg.seed);

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  if (cfg.shuffle) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
  }

  PiSpec pi = cfg.pi;
  if (cfg.policy.is_adaptive() && pi.has_beta_param()) pi.beta = cfg.policy.beta;

  ModelParams theta = ModelParams::zeros(ds.d, ds.task);
  if (!cfg.theta_init.empty()) theta.theta = cfg.theta_init;
  theta = project(std::move(theta), cfg.projection);

  EstimatorState estimator(cfg.estimator, rng());

  RunResult result;
  result.rows.reserve(n);
  result.avg_progressive_losses.assign(cfg.eval_losses.size(), 0.0);
  Vec averaged = theta.theta;

  std::size_t samples = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const Example& ex = ds.examples[order[t % ds.size()]];

    MetricsRow row;
    row.t = t;
    row.progressive_losses.resize(cfg.eval_losses.size());
    for (std::size_t i = 0; i < cfg.eval_losses.size(); ++i) {
      row.progressive_losses[i] = loss_value(cfg.eval_losses[i], ex, theta);
      result.avg_progressive_losses[i] += row.progressive_losses[i];
    }

    double input = 0.0;
    switch (pi.input()) {
      case PiInput::scalar_loss: {
        if (cfg.discrete_abs_input) {
          const double u = margin(theta, ex);
          input = u < 0.0 ? 2.0 : (u == 0.0 ? 1.0 : 0.0);
        } else if (cfg.estimator.is_learned()) {
          input = estimator.estimate(ex.features, model_prediction_feature(ex, theta),
                                     std::nullopt);
        } else {
          input = estimator.estimate(ex.features, model_prediction_feature(ex, theta),
                                     loss_value(cfg.sampling_loss, ex, theta));
        }
        break;
      }
      case PiInput::zeta:
        input = oracle_sampling_input(pi, cfg.train_loss, ex, theta);
        break;
      default:
        input = oracle_sampling_input(pi, cfg.sampling_loss, ex, theta);
        break;
    }

    const double prob = clamp01(cfg.pi_scale * pi_eval(pi, input));
    const double zeta = cfg.policy.is_adaptive()
                            ? zeta_polyak(cfg.train_loss, ex, theta, cfg.policy.beta,
                                          cfg.policy.rho)
                            : 0.0;
    const StepDraw draw = draw_step(cfg.policy, prob, zeta, rng);

    if (draw.sampled) {
      ++samples;
      if (cfg.estimator.is_learned())
        estimator.observe(ex.features, model_prediction_feature(ex, theta),
                          realized_abs_loss(ex, theta));
      if (draw.step_size != 0.0) {
        const Vec grad = loss_gradient(cfg.train_loss, ex, theta);
        axpy(-draw.step_size, grad, theta.theta);
        theta = project(std::move(theta), cfg.projection);
      }
    }

    row.pi = draw.pi_used;
    row.sampled = draw.sampled;
    row.step_size = draw.step_size;
    row.cumulative_samples = samples;
    row.theta_norm = norm2(theta.theta);
    result.rows.push_back(std::move(row));

    if (t + 1 < n) running_average(averaged, t + 1, theta.theta);
  }

  for (double& v : result.avg_progressive_losses) v /= static_cast<double>(n);
  result.final_theta = theta;
  result.averaged_theta = {std::move(averaged), ds.task};
  result.total_samples = samples;
  result.sampling_rate = static_cast<double>(samples) / static_cast<double>(n);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_metrics_csv(const RunResult& result, const std::vector<LossKind>& eval_losses,
                       const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(f, "t,sampled,pi,step_size,cumulative_samples,theta_norm");
  for (const auto& kind : eval_losses) std::fprintf(f, ",loss_%s", kind.name().c_str());
  std::fprintf(f, "\n");
  for (const auto& row : result.rows) {
    std::fprintf(f, "%zu,%d,%.10g,%.10g,%zu,%.10g", row.t, row.sampled ? 1 : 0, row.pi,
                 row.step_size, row.cumulative_samples, row.theta_norm);
    for (double loss : row.progressive_losses) std::fprintf(f, ",%.10g", loss);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

void apply_calibration_beta(RunConfig& cfg, double beta) {
  // The knob multiplies the sampling probability only; the step policy keeps
  // its configured scale. Scaling the Polyak beta as well would make the
  // empirical rate non-monotone (large steps push margins past the point
  // where anything is sampled again).
  cfg.pi_scale = beta;
}

CalibrationResult calibrate_beta(const Dataset& ds, const RunConfig& base, double target_rate,
                                 double tol, int max_iter) {
  if (target_rate <= 0.0 || target_rate >= 1.0)
    throw std::invalid_argument("calibrate_beta: target rate must be in (0,1)");
  int probes = 0;
  const auto rate_at = [&](double beta) {
    RunConfig cfg = base;
    apply_calibration_beta(cfg, beta);
    ++probes;
    const double rate = run_stream(ds, cfg).sampling_rate;
    log_debug("calibrate probe beta=" + std::to_string(beta) +
              " rate=" + std::to_string(rate));
    return rate;
  };

  double lo = 1.0, hi = 1.0;
  double rate_hi = rate_at(1.0);
  if (rate_hi >= target_rate) {
    double rate_lo = rate_hi;
    int i = 0;
    while (rate_lo >= target_rate) {
      if (++i > 60) throw std::runtime_error("calibrate_beta: no lower bracket in 60 halvings");
      lo /= 2.0;
      rate_lo = rate_at(lo);
    }
    hi = lo * 2.0;
  } else {
    int i = 0;
    while (rate_hi < target_rate) {
      if (++i > 60) throw std::runtime_error("calibrate_beta: no upper bracket in 60 doublings");
      hi *= 2.0;
      rate_hi = rate_at(hi);
    }
    lo = hi / 2.0;
  }

  double beta = hi, rate = rate_hi;
  for (int i = 0; i < max_iter && std::abs(rate - target_rate) > tol; ++i) {
    beta = 0.5 * (lo + hi);
    rate = rate_at(beta);
    if (rate < target_rate)
      lo = beta;
    else
      hi = beta;
  }
  return {beta, rate, probes};
}

std::size_t cross_entropy_index(const RunConfig& cfg) {
  const LossTag want =
      cfg.train_loss.tag == LossTag::multi_cross_entropy ? LossTag::multi_cross_entropy
                                                         : LossTag::logistic;
  for (std::size_t i = 0; i < cfg.eval_losses.size(); ++i)
    if (cfg.eval_losses[i].tag == want) return i;
  throw std::invalid_argument("sweep: cross-entropy eval loss missing from eval_losses");
}

SweepResult sweep(const Dataset& ds, const RunConfig& base, const SweepSpace& space,
                  int budget, double target_rate, double tol, int jobs) {
  if (budget < 1) throw std::invalid_argument("sweep: budget must be >= 1");
  const std::size_t ce_index = cross_entropy_index(base);

  const auto run_trial = [&](int index) {
    std::mt19937_64 rng(base.seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RunConfig cfg = base;
    if (space.eta) {
      cfg.pi.eta = space.eta->first + (space.eta->second - space.eta->first) * unif(rng);
    }
    if (space.rho) {
      const double rho =
          std::max(1e-6, space.rho->first + (space.rho->second - space.rho->first) * unif(rng));
      cfg.policy.rho = rho;
      if (cfg.pi.input() == PiInput::zeta) cfg.pi.rho = rho;
    }
    if (space.gamma) {
      const double lg = std::log(space.gamma->first) +
                        (std::log(space.gamma->second) - std::log(space.gamma->first)) * unif(rng);
      cfg.policy.gamma = std::exp(lg);
    }
    if (space.omega) {
      cfg.pi.omega = space.omega->first + (space.omega->second - space.omega->first) * unif(rng);
    }
    SweepEntry entry;
    const CalibrationResult cal = calibrate_beta(ds, cfg, target_rate, tol);
    apply_calibration_beta(cfg, cal.beta);
    entry.config = cfg;
    entry.beta = cal.beta;
    const RunResult run = run_stream(ds, cfg);
    entry.achieved_rate = run.sampling_rate;
    entry.cross_entropy = run.avg_loss(ce_index);
    return entry;
  };

  std::vector<SweepEntry> entries(budget);
  if (jobs <= 1) {
    for (int i = 0; i < budget; ++i) entries[i] = run_trial(i);
  } else {
    std::vector<std::future<SweepEntry>> futures;
    futures.reserve(budget);
    for (int i = 0; i < budget; ++i)
      futures.push_back(std::async(std::launch::async, run_trial, i));
    for (int i = 0; i < budget; ++i) entries[i] = futures[i].get();
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     return a.cross_entropy < b.cross_entropy;
                   });
  return {std::move(entries)};
}

HoldoutSummary evaluate_holdout(const ModelParams& params, const Dataset& test,
                                const std::vector<LossKind>& losses) {
  if (test.size() == 0) throw std::invalid_argument("evaluate_holdout: empty test set");
  HoldoutSummary out;
  out.mean_losses.assign(losses.size(), 0.0);
  std::size_t correct = 0;
  for (const auto& ex : test.examples) {
    for (std::size_t i = 0; i < losses.size(); ++i)
      out.mean_losses[i] += loss_value(losses[i], ex, params);
    if (margin(params, ex) > 0.0) ++correct;
  }
  for (double& v : out.mean_losses) v /= static_cast<double>(test.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return out;
}

}  // namespace awsgd
