// End-to-end checks of the command-line tool. The binary path arrives as
// argv[1] from ctest.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << "\n";
  }
}

struct CommandResult {
  int code = -1;
  std::string output;
};

CommandResult run_cmd(const std::string& cmd) {
  const fs::path out = fs::temp_directory_path() / "awsgd_cli_out.txt";
  const std::string full = cmd + " > " + out.string() + " 2>&1";
  const int raw = std::system(full.c_str());
  CommandResult r;
  r.code = WEXITSTATUS(raw);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <aws_sgd binary>\n";
    return 1;
  }
  const std::string bin = argv[1];
  const fs::path work = fs::temp_directory_path() / "awsgd_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);

  // gen-data writes a loadable LIBSVM file
  {
    const auto r = run_cmd(bin + " gen-data --kind margin --n 120 --d 4 --rho-star 0.4" +
                           " --R 1.0 --seed 3 --out " + (work / "margin.libsvm").string());
    expect(r.code == 0, "gen-data exits 0: " + r.output);
    expect(fs::exists(work / "margin.libsvm"), "gen-data output exists");
  }
  {
    const auto r = run_cmd(bin + " gen-data --kind nosuch --out " + (work / "x").string());
    expect(r.code == 2, "gen-data unknown kind exits 2");
  }

  // run: deterministic outputs, row count, exit codes
  const fs::path config = work / "config.json";
  {
    std::ofstream out(config);
    out << R"({
      "dataset": {"kind": "libsvm", "path": ")" << (work / "margin.libsvm").string() << R"("},
      "train_loss": "logistic",
      "eval_losses": ["logistic", "zero_one"],
      "step_policy": {"kind": "adaptive_weight", "beta": 0.5, "rho": 2.0},
      "pi": {"family": "abs_error_proportional", "omega": 0.5},
      "seed": 7
    })";
  }
  {
    const auto r1 = run_cmd(bin + " run --config " + config.string() + " --seed 7 --out " +
                            (work / "run1").string());
    const auto r2 = run_cmd(bin + " run --config " + config.string() + " --seed 7 --out " +
                            (work / "run2").string());
    expect(r1.code == 0 && r2.code == 0, "run exits 0");
    const std::string m1 = slurp(work / "run1" / "metrics.csv");
    const std::string m2 = slurp(work / "run2" / "metrics.csv");
    expect(!m1.empty() && m1 == m2, "same seed gives byte-identical metrics");
    expect(count_lines(m1) == 121, "one row per iteration plus header");
    expect(fs::exists(work / "run1" / "summary.json"), "summary.json written");
    expect(fs::exists(work / "run1" / "model.txt"), "model.txt written");
    const auto r3 = run_cmd(bin + " run --config " + config.string() + " --seed 8 --out " +
                            (work / "run3").string());
    expect(r3.code == 0, "run with another seed exits 0");
    expect(slurp(work / "run3" / "metrics.csv") != m1, "different seed changes the trace");
  }
  {
    const auto r = run_cmd(bin + " run --config " + config.string() +
                           " --set typo_key=1 --out " + (work / "runx").string());
    expect(r.code == 2, "unknown config key exits 2");
    expect(r.output.find("typo_key") != std::string::npos, "diagnostic names the key");
  }
  {
    std::ofstream out(work / "missing.json");
    out << R"({"dataset": {"kind": "libsvm", "path": "/nonexistent/data.libsvm"}})";
    const auto r = run_cmd(bin + " run --config " + (work / "missing.json").string() +
                           " --out " + (work / "runy").string());
    expect(r.code == 2, "missing dataset path exits 2");
  }

  // report: tidy long CSV with prefix means
  {
    const auto r = run_cmd(bin + " report " + (work / "run1").string() + " " +
                           (work / "run3").string() + " --out " +
                           (work / "report.csv").string());
    expect(r.code == 0, "report exits 0");
    const std::string rep = slurp(work / "report.csv");
    expect(count_lines(rep) == 2 * 120 + 1, "report rows per run");
    std::istringstream in(rep);
    std::string line;
    std::getline(in, line);
    expect(line == "method,t,avg_progressive_loss,cumulative_samples", "report header");
    // prefix-mean property against the raw metrics
    std::istringstream metrics(slurp(work / "run1" / "metrics.csv"));
    std::getline(metrics, line);
    double running = 0.0;
    for (int t = 0; t < 5; ++t) {
      std::getline(metrics, line);
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      running += std::strtod(cells[6].c_str(), nullptr);  // loss_logistic column
      std::getline(in, line);
      cells.clear();
      std::stringstream ss2(line);
      while (std::getline(ss2, cell, ',')) cells.push_back(cell);
      const double reported = std::strtod(cells[2].c_str(), nullptr);
      expect(std::abs(reported - running / (t + 1)) <= 1e-12 * std::max(1.0, running),
             "prefix mean at t=" + std::to_string(t));
    }
  }

  // calibrate-beta on the constant family
  {
    const fs::path cal_config = work / "cal.json";
    std::ofstream out(cal_config);
    out << R"({
      "dataset": {"kind": "libsvm", "path": ")" << (work / "margin.libsvm").string() << R"("},
      "train_loss": "logistic",
      "eval_losses": ["logistic"],
      "step_policy": {"kind": "constant_weight", "gamma": 1.0},
      "pi": {"family": "constant", "p": 1.0},
      "seed": 5
    })";
    out.close();
    const auto r = run_cmd(bin + " calibrate-beta --config " + cal_config.string() +
                           " --target-rate 0.5 --tol 0.05");
    expect(r.code == 0, "calibrate-beta exits 0: " + r.output);
    expect(r.output.find("beta=") != std::string::npos, "calibrate-beta prints beta");
  }

  // verify: unknown suite exits 2, a fast suite exits 0
  {
    const auto r = run_cmd(bin + " verify nosuch");
    expect(r.code == 2, "verify nosuch exits 2");
    const auto ok = run_cmd(bin + " verify pi-machinery --out " + (work / "ver").string());
    expect(ok.code == 0, "verify pi-machinery exits 0: " + ok.output);
    expect(ok.output.find("PASS") != std::string::npos, "verify prints pass lines");
    expect(fs::exists(work / "ver" / "verify.json"), "verify.json written");
  }

  if (failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cout << "test_cli: " << failures << " checks failed\n";
  return 1;
}
