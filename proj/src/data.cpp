#include "awsgd/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace awsgd {

double Dataset::max_feature_norm() const {
  double best = 0.0;
  for (const auto& ex : examples) best = std::max(best, norm2(ex.features));
  return best;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

void apply_label_map(Dataset& ds, LabelMap map, const std::string& path) {
  std::set<int> labels;
  for (const auto& ex : ds.examples) labels.insert(ex.label);
  if (map == LabelMap::auto_detect) {
    if (labels == std::set<int>{-1, 1} || labels.size() <= 1 ||
        labels == std::set<int>{-1} || labels == std::set<int>{1})
      map = LabelMap::none;
    else if (labels == std::set<int>{0, 1})
      map = LabelMap::zero_one;
    else if (labels == std::set<int>{1, 2})
      map = LabelMap::one_two;
    else
      map = LabelMap::none;
  }
  switch (map) {
    case LabelMap::zero_one:
      for (auto& ex : ds.examples) ex.label = ex.label == 0 ? -1 : 1;
      break;
    case LabelMap::one_two:
      for (auto& ex : ds.examples) ex.label = ex.label == 1 ? -1 : 1;
      break;
    default:
      break;
  }
  std::set<int> mapped;
  for (const auto& ex : ds.examples) mapped.insert(ex.label);
  bool binary = true;
  for (int l : mapped)
    if (l != -1 && l != 1) binary = false;
  if (binary) {
    ds.task = TaskSpec::binary_task();
  } else {
    int k = 0;
    for (int l : mapped) {
      if (l < 0) throw std::runtime_error(path + ": labels are neither binary nor class indices");
      k = std::max(k, l + 1);
    }
    ds.task = TaskSpec::multiclass_task(std::max(k, 2));
  }
}

}  // namespace

Dataset load_libsvm(const std::string& path, LabelMap map) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Dataset ds;
  ds.name = path;
  std::string line;
  std::size_t line_no = 0;
  int max_index = 0;
  std::vector<std::vector<std::pair<int, double>>> sparse_rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank line
    std::size_t pos = 0;
    int label = 0;
    try {
      label = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      parse_fail(path, line_no, "bad label '" + tok + "'");
    }
    if (pos != tok.size()) parse_fail(path, line_no, "bad label '" + tok + "'");
    std::vector<std::pair<int, double>> row;
    int prev_index = 0;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        parse_fail(path, line_no, "expected index:value, got '" + tok + "'");
      int index = 0;
      try {
        index = std::stoi(tok.substr(0, colon), &pos);
      } catch (const std::exception&) {
        parse_fail(path, line_no, "bad feature index in '" + tok + "'");
      }
      if (index < 1) parse_fail(path, line_no, "feature indices are 1-based");
      if (index <= prev_index)
        parse_fail(path, line_no, "feature indices must be strictly increasing");
      const std::string vstr = tok.substr(colon + 1);
      char* end = nullptr;
      const double value = std::strtod(vstr.c_str(), &end);
      if (end == vstr.c_str() || *end != '\0')
        parse_fail(path, line_no, "bad feature value in '" + tok + "'");
      row.emplace_back(index, value);
      prev_index = index;
    }
    max_index = std::max(max_index, prev_index);
    sparse_rows.push_back(std::move(row));
    labels.push_back(label);
  }
  ds.d = max_index;
  ds.examples.reserve(sparse_rows.size());
  for (std::size_t i = 0; i < sparse_rows.size(); ++i) {
    Example ex;
    ex.features.assign(ds.d, 0.0);
    for (const auto& [idx, val] : sparse_rows[i]) ex.features[idx - 1] = val;
    ex.label = labels[i];
    ds.examples.push_back(std::move(ex));
  }
  apply_label_map(ds, map, path);
  return ds;
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[64];
  for (const auto& ex : ds.examples) {
    out << ex.label;
    for (std::size_t i = 0; i < ex.features.size(); ++i) {
      if (ex.features[i] == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", ex.features[i]);
      out << ' ' << (i + 1) << ':' << buf;
    }
    out << '\n';
  }
}

Dataset load_csv(const std::string& path, LabelMap map) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> columns;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) columns.push_back(cell);
  }
  int label_col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == "label") label_col = static_cast<int>(i);
  if (label_col < 0) throw std::runtime_error(path + ": no 'label' column in header");

  Dataset ds;
  ds.name = path;
  ds.d = static_cast<int>(columns.size()) - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Example ex;
    ex.features.reserve(ds.d);
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        parse_fail(path, line_no, "bad numeric value '" + cell + "'");
      if (static_cast<int>(col) == label_col)
        ex.label = static_cast<int>(std::lround(v));
      else
        ex.features.push_back(v);
      ++col;
    }
    if (col != columns.size()) parse_fail(path, line_no, "wrong number of columns");
    ds.examples.push_back(std::move(ex));
  }
  apply_label_map(ds, map, path);
  return ds;
}

std::pair<Dataset, Vec> gen_margin_dataset(const MarginSpec& spec) {
  if (spec.rho_star >= spec.R)
    throw std::invalid_argument("gen_margin_dataset: rho_star must be below R");
  if (spec.rho_star <= 0.0 || spec.d < 1)
    throw std::invalid_argument("gen_margin_dataset: invalid spec");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vec theta_star(spec.d);
  for (auto& v : theta_star) v = gauss(rng);
  const double nrm = norm2(theta_star);
  for (auto& v : theta_star) v /= nrm;

  Dataset ds;
  ds.d = spec.d;
  ds.task = TaskSpec::binary_task();
  ds.name = "margin";
  ds.examples.reserve(spec.n);
  const double inv_d = 1.0 / static_cast<double>(spec.d);
  std::size_t rejections = 0;
  while (ds.examples.size() < spec.n) {
    Vec x(spec.d);
    for (auto& v : x) v = gauss(rng);
    const double xn = norm2(x);
    const double r = spec.R * std::pow(unif(rng), inv_d);
    for (auto& v : x) v *= r / xn;
    const double proj = dot(x, theta_star);
    if (std::abs(proj) < spec.rho_star) {
      if (++rejections >= 1000000)
        throw std::runtime_error("gen_margin_dataset: 1e6 consecutive rejections");
      continue;
    }
    rejections = 0;
    Example ex;
    ex.features = std::move(x);
    ex.label = proj >= 0.0 ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  return {std::move(ds), std::move(theta_star)};
}

Dataset rbf_featurize(const Dataset& ds, std::size_t landmarks, double gamma,
                      std::uint64_t seed) {
  if (landmarks > ds.size())
    throw std::invalid_argument("rbf_featurize: more landmarks than points");
  if (landmarks == 0) throw std::invalid_argument("rbf_featurize: need at least one landmark");
  std::mt19937_64 rng(seed);

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::size_t> centers(order.begin(), order.begin() + landmarks);

  if (gamma <= 0.0) {
    // median of pairwise squared distances over a capped subsample
    const std::size_t m = std::min<std::size_t>(ds.size(), 500);
    std::vector<double> dists;
    dists.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        double d2 = 0.0;
        const auto& xi = ds.examples[order[i]].features;
        const auto& xj = ds.examples[order[j]].features;
        for (std::size_t t = 0; t < xi.size(); ++t) {
          const double diff = xi[t] - xj[t];
          d2 += diff * diff;
        }
        dists.push_back(d2);
      }
    if (dists.empty()) throw std::invalid_argument("rbf_featurize: need >= 2 points for auto gamma");
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double median = dists[dists.size() / 2];
    if (median <= 0.0) throw std::runtime_error("rbf_featurize: degenerate distances");
    gamma = 1.0 / median;
  }

  Dataset out;
  out.d = static_cast<int>(landmarks);
  out.task = ds.task;
  out.name = ds.name + "+rbf";
  out.examples.reserve(ds.size());
  for (const auto& ex : ds.examples) {
    Example n;
    n.label = ex.label;
    n.id = ex.id;
    n.features.resize(landmarks);
    for (std::size_t j = 0; j < landmarks; ++j) {
      const auto& cj = ds.examples[centers[j]].features;
      double d2 = 0.0;
      for (std::size_t t = 0; t < cj.size(); ++t) {
        const double diff = ex.features[t] - cj[t];
        d2 += diff * diff;
      }
      n.features[j] = std::exp(-gamma * d2);
    }
    out.examples.push_back(std::move(n));
  }
  return out;
}

std::pair<Dataset, Dataset> shuffle_split(const Dataset& ds, double test_fraction,
                                          std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("shuffle_split: test_fraction must be in [0,1)");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const std::size_t train_n =
      static_cast<std::size_t>(std::ceil(ds.size() * (1.0 - test_fraction)));
  Dataset train, test;
  train.d = test.d = ds.d;
  train.task = test.task = ds.task;
  train.name = ds.name + "/train";
  test.name = ds.name + "/test";
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < train_n ? train : test).examples.push_back(ds.examples[order[i]]);
  return {std::move(train), std::move(test)};
}

namespace {

// Cells hold 0 = blank, 1 = x, 2 = o.
bool three_in_a_row(const std::array<int, 9>& b, int player) {
  static constexpr int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                      {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  for (const auto& l : lines)
    if (b[l[0]] == player && b[l[1]] == player && b[l[2]] == player) return true;
  return false;
}

void play(std::array<int, 9>& board, int player, std::set<std::array<int, 9>>& finals) {
  bool moved = false;
  for (int cell = 0; cell < 9; ++cell) {
    if (board[cell] != 0) continue;
    moved = true;
    board[cell] = player;
    if (three_in_a_row(board, player))
      finals.insert(board);
    else
      play(board, 3 - player, finals);
    board[cell] = 0;
  }
  if (!moved) finals.insert(board);  // full board, drawn game
}

}  // namespace

Dataset gen_tictactoe() {
  std::set<std::array<int, 9>> finals;
  std::array<int, 9> board{};
  play(board, 1, finals);

  Dataset ds;
  ds.d = 27;
  ds.task = TaskSpec::binary_task();
  ds.name = "tictactoe";
  ds.examples.reserve(finals.size());
  for (const auto& b : finals) {
    Example ex;
    ex.features.assign(27, 0.0);
    for (int cell = 0; cell < 9; ++cell) ex.features[cell * 3 + b[cell]] = 1.0;
    ex.label = three_in_a_row(b, 1) ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace awsgd
