#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "awsgd/config_json.hpp"
#include "awsgd/log.hpp"
#include "awsgd/theory.hpp"

namespace fs = std::filesystem;
using namespace awsgd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_model(const fs::path& path, const Vec& theta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char buf[64];
  for (double v : theta) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << '\n';
  }
}

std::string load_config_text(const std::string& path, const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  for (const auto& assignment : sets) text = apply_override(text, assignment);
  return text;
}

int cmd_gen_data(const std::string& kind, std::size_t n, int d, double rho_star, double R,
                 std::uint64_t seed, const std::string& out,
                 const std::string& theta_out) {
  Dataset ds;
  Vec theta_star;
  if (kind == "margin") {
    MarginSpec spec;
    spec.n = n;
    spec.d = d;
    spec.rho_star = rho_star;
    spec.R = R;
    spec.seed = seed;
    auto [gen, theta] = gen_margin_dataset(spec);
    ds = std::move(gen);
    theta_star = std::move(theta);
  } else if (kind == "tictactoe") {
    ds = gen_tictactoe();
  } else {
    std::cerr << "gen-data: unknown kind '" << kind << "'\n";
    return kExitUsage;
  }
  save_libsvm(ds, out);
  if (!theta_out.empty() && !theta_star.empty()) write_model(theta_out, theta_star);
  std::cout << "wrote " << ds.size() << " examples (d=" << ds.d << ") to " << out << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            std::optional<std::uint64_t> seed, const std::string& out_dir) {
  RunSpec spec = parse_run_spec_json(load_config_text(config_path, sets));
  if (seed) spec.config.seed = *seed;
  const MaterializedDataset data = materialize(spec.dataset);
  const RunResult result = run_stream(data.data, spec.config);

  fs::create_directories(out_dir);
  write_metrics_csv(result, spec.config.eval_losses, (fs::path(out_dir) / "metrics.csv").string());
  write_text(fs::path(out_dir) / "summary.json",
             summary_json(result, spec.config.eval_losses));
  write_model(fs::path(out_dir) / "model.txt", result.final_theta.theta);
  write_model(fs::path(out_dir) / "averaged_model.txt", result.averaged_theta.theta);
  write_text(fs::path(out_dir) / "config.json", run_spec_to_json(spec));
  std::cout << "run complete: " << result.rows.size() << " iterations, "
            << result.total_samples << " samples (rate "
            << result.sampling_rate << ")\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& config_path, const std::vector<std::string>& sets,
                  double target_rate, double tol, const std::string& out_dir) {
  RunSpec spec = parse_run_spec_json(load_config_text(config_path, sets));
  const MaterializedDataset data = materialize(spec.dataset);
  const CalibrationResult cal = calibrate_beta(data.data, spec.config, target_rate, tol);
  std::cout << "beta=" << cal.beta << " achieved_rate=" << cal.achieved_rate
            << " probes=" << cal.probes << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ostringstream os;
    os << "{\n  \"beta\": " << cal.beta << ",\n  \"achieved_rate\": " << cal.achieved_rate
       << ",\n  \"probes\": " << cal.probes << "\n}\n";
    write_text(fs::path(out_dir) / "calibration.json", os.str());
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets,
              int budget, double target_rate, int jobs, const std::string& out_dir) {
  RunSpec spec = parse_run_spec_json(load_config_text(config_path, sets));
  const MaterializedDataset data = materialize(spec.dataset);
  SweepSpace space;
  if (spec.config.pi.family == PiFamily::power_of_zeta) space.eta = {0.01, 1.0};
  if (spec.config.policy.is_adaptive()) space.rho = {0.0, 1.0};
  else space.gamma = {0.1, 10.0};
  const SweepResult result = sweep(data.data, spec.config, space, budget, target_rate,
                                   0.01, jobs);
  fs::create_directories(out_dir);
  std::ostringstream os;
  os << "rank,beta,achieved_rate,cross_entropy,eta,rho,gamma\n";
  for (std::size_t i = 0; i < result.leaderboard.size(); ++i) {
    const SweepEntry& e = result.leaderboard[i];
    os << i << ',' << e.beta << ',' << e.achieved_rate << ',' << e.cross_entropy << ','
       << e.config.pi.eta << ',' << e.config.policy.rho << ',' << e.config.policy.gamma
       << '\n';
  }
  write_text(fs::path(out_dir) / "leaderboard.csv", os.str());
  RunSpec best = spec;
  best.config = result.best().config;
  write_text(fs::path(out_dir) / "best_config.json", run_spec_to_json(best));
  std::cout << "sweep complete: best cross_entropy=" << result.best().cross_entropy
            << " beta=" << result.best().beta << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, int jobs, const std::string& out_dir) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = verify_suite_names();
  } else {
    const auto all = verify_suite_names();
    if (std::find(all.begin(), all.end(), suite) == all.end()) {
      std::cerr << "verify: unknown suite '" << suite << "'\navailable:";
      for (const auto& n : all) std::cerr << ' ' << n;
      std::cerr << "\n";
      return kExitUsage;
    }
    names = {suite};
  }
  bool all_hold = true;
  std::ostringstream json;
  json << "[\n";
  bool first = true;
  for (const auto& name : names) {
    log_info("running verify suite " + name);
    const auto reports = run_verify_suite(name, jobs);
    for (const auto& r : reports) {
      all_hold = all_hold && r.holds;
      std::printf("%-44s %s  empirical=%.6g theoretical=%.6g  %s\n", r.name.c_str(),
                  r.holds ? "PASS" : "FAIL", r.empirical, r.theoretical,
                  r.config_echo.c_str());
      std::fflush(stdout);
      if (!first) json << ",\n";
      first = false;
      json << "  {\"suite\": \"" << name << "\", \"name\": \"" << r.name
           << "\", \"holds\": " << (r.holds ? "true" : "false")
           << ", \"empirical\": " << r.empirical << ", \"theoretical\": " << r.theoretical
           << ", \"config\": \"" << r.config_echo << "\"}";
    }
  }
  json << "\n]\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "verify.json", json.str());
  }
  return all_hold ? kExitOk : kExitVerifyFailed;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out) {
  std::ostringstream os;
  os << "method,t,avg_progressive_loss,cumulative_samples\n";
  for (const auto& dir : run_dirs) {
    const fs::path metrics = fs::path(dir) / "metrics.csv";
    std::ifstream in(metrics);
    if (!in) {
      std::cerr << "report: missing " << metrics.string() << "\n";
      return kExitUsage;
    }
    std::string header;
    std::getline(in, header);
    std::vector<std::string> columns;
    {
      std::stringstream ss(header);
      std::string cell;
      while (std::getline(ss, cell, ',')) columns.push_back(cell);
    }
    int loss_col = -1, samples_col = -1;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == "loss_logistic" || columns[i] == "loss_multi_cross_entropy")
        loss_col = static_cast<int>(i);
      if (columns[i] == "cumulative_samples") samples_col = static_cast<int>(i);
    }
    if (loss_col < 0) {
      for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].rfind("loss_", 0) == 0) {
          loss_col = static_cast<int>(i);
          break;
        }
    }
    if (loss_col < 0 || samples_col < 0) {
      std::cerr << "report: " << metrics.string() << " lacks loss/sample columns\n";
      return kExitUsage;
    }
    const std::string method = fs::path(dir).filename().string();
    std::string line;
    double running = 0.0;
    std::size_t t = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      running += std::strtod(cells[loss_col].c_str(), nullptr);
      os << method << ',' << t << ',' << std::setprecision(12)
         << running / static_cast<double>(t + 1) << ',' << cells[samples_col] << '\n';
      ++t;
    }
  }
  write_text(out, os.str());
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss- and uncertainty-based sampling for streaming SGD"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  std::string gen_kind = "margin", gen_out = "data.libsvm", gen_theta_out;
  std::size_t gen_n = 1000;
  int gen_d = 10;
  double gen_rho = 0.5, gen_R = 1.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "margin | tictactoe");
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--rho-star", gen_rho, "margin wrt the unit separator");
  gen->add_option("--R", gen_R, "feature norm cap");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path (LIBSVM format)");
  gen->add_option("--theta-star-out", gen_theta_out, "write the separator here");

  // run
  auto* run = app.add_subcommand("run", "run one configured stream");
  std::string run_config, run_out = "out";
  std::vector<std::string> run_sets;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--config", run_config, "config JSON path")->required();
  run->add_option("--seed", run_seed, "seed override");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--set", run_sets, "KEY=VALUE config override (repeatable)");

  // calibrate-beta
  auto* cal = app.add_subcommand("calibrate-beta", "binary-search beta for a target rate");
  std::string cal_config, cal_out;
  std::vector<std::string> cal_sets;
  double cal_target = 0.5, cal_tol = 0.01;
  cal->add_option("--config", cal_config, "config JSON path")->required();
  cal->add_option("--target-rate", cal_target, "target empirical sampling rate")->required();
  cal->add_option("--tol", cal_tol, "rate tolerance");
  cal->add_option("--out", cal_out, "output directory");
  cal->add_option("--set", cal_sets, "KEY=VALUE config override (repeatable)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "random search with nested calibration");
  std::string sw_config, sw_out = "sweep";
  std::vector<std::string> sw_sets;
  int sw_budget = 10, sw_jobs = static_cast<int>(std::thread::hardware_concurrency());
  double sw_target = 0.5;
  sw->add_option("--config", sw_config, "config JSON path")->required();
  sw->add_option("--budget", sw_budget, "number of sampled configurations");
  sw->add_option("--target-rate", sw_target, "target empirical sampling rate");
  sw->add_option("--jobs", sw_jobs, "parallel workers");
  sw->add_option("--out", sw_out, "output directory");
  sw->add_option("--set", sw_sets, "KEY=VALUE config override (repeatable)");

  // verify
  auto* ver = app.add_subcommand("verify", "numeric theorem/lemma verification");
  std::string ver_suite = "all", ver_out;
  int ver_jobs = static_cast<int>(std::thread::hardware_concurrency());
  ver->add_option("suite", ver_suite, "suite name or 'all'");
  ver->add_option("--jobs", ver_jobs, "parallel workers");
  ver->add_option("--out", ver_out, "output directory for verify.json");

  // report
  auto* rep = app.add_subcommand("report", "tidy long-format CSV from run directories");
  std::vector<std::string> rep_dirs;
  std::string rep_out = "report.csv";
  rep->add_option("dirs", rep_dirs, "run directories with metrics.csv")->required();
  rep->add_option("--out", rep_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen_data(gen_kind, gen_n, gen_d, gen_rho, gen_R, gen_seed, gen_out,
                          gen_theta_out);
    if (run->parsed()) return cmd_run(run_config, run_sets, run_seed, run_out);
    if (cal->parsed()) return cmd_calibrate(cal_config, cal_sets, cal_target, cal_tol, cal_out);
    if (sw->parsed()) return cmd_sweep(sw_config, sw_sets, sw_budget, sw_target, sw_jobs, sw_out);
    if (ver->parsed()) return cmd_verify(ver_suite, ver_jobs, ver_out);
    if (rep->parsed()) return cmd_report(rep_dirs, rep_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
