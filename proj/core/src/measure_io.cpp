#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "covfield/errors.hpp"
#include "covfield/measure.hpp"

namespace covfield {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string& s, long line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'", line);
  return v;
}

int file_label_to_memory(long long v, long line) {
  if (v == kOutlierFileLabel) return kOutlierLabel;
  if (v < 0 || v > kOutlierFileLabel)
    throw ParseError("line " + std::to_string(line) + ": labels must be non-negative", line);
  return static_cast<int>(v);
}

long long memory_label_to_file(int l) { return l == kOutlierLabel ? kOutlierFileLabel : l; }

void check_weights(const Eigen::VectorXd& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0)) throw ParseError("weights must be positive (row " + std::to_string(i + 1) + ")", i + 2);
}

void write_csv(const WeightedMeasure& m, const std::vector<int>* labels, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < m.dim; ++i) os << "x_" << (i + 1) << ',';
  os << "weight";
  if (labels) os << ",label";
  os << '\n';
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    for (int i = 0; i < m.dim; ++i) os << format_double(m.atoms(i, k)) << ',';
    os << format_double(m.weights[k]);
    if (labels) os << ',' << memory_label_to_file((*labels)[static_cast<std::size_t>(k)]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void save_csv(const WeightedMeasure& m, const std::string& path) { write_csv(m, nullptr, path); }

void save_csv(const LabeledDataset& ds, const std::string& path) {
  validate(ds);
  write_csv(ds.measure, ds.labels.empty() ? nullptr : &ds.labels, path);
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  long lineno = 0;
  if (!std::getline(is, line)) throw ParseError("line 1: missing header", 1);
  ++lineno;
  const auto header = split_csv(line);
  int dim = 0;
  while (dim < static_cast<int>(header.size()) && header[dim] == "x_" + std::to_string(dim + 1)) ++dim;
  if (dim == 0 || dim >= static_cast<int>(header.size()) || header[dim] != "weight")
    throw ParseError("line 1: header must be x_1,...,x_d,weight[,label]", 1);
  const bool has_label = static_cast<int>(header.size()) == dim + 2 && header[dim + 1] == "label";
  if (static_cast<int>(header.size()) != dim + 1 + (has_label ? 1 : 0))
    throw ParseError("line 1: unexpected header columns", 1);
  const std::size_t ncols = header.size();

  std::vector<double> coords, weights;
  std::vector<int> labels;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != ncols)
      throw ParseError("line " + std::to_string(lineno) + ": ragged row (row " + std::to_string(lineno - 1) +
                           " has " + std::to_string(cells.size()) + " fields, expected " +
                           std::to_string(ncols) + ")",
                       lineno);
    for (int i = 0; i < dim; ++i) coords.push_back(parse_number(cells[i], lineno));
    const double w = parse_number(cells[dim], lineno);
    if (!(w > 0.0))
      throw ParseError("line " + std::to_string(lineno) + ": weights must be positive", lineno);
    weights.push_back(w);
    if (has_label) {
      long long v = 0;
      const auto& s = cells[dim + 1];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(lineno) + ": bad label '" + s + "'", lineno);
      labels.push_back(file_label_to_memory(v, lineno));
    }
  }
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (n == 0) throw ParseError("no data rows", lineno);
  Eigen::MatrixXd atoms = Eigen::Map<Eigen::MatrixXd>(coords.data(), dim, n);
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), n);
  LabeledDataset ds;
  ds.measure = make_measure(std::move(atoms), std::move(w));
  if (has_label) ds.labels = std::move(labels);
  ds.description = path;
  return ds;
}

void save_json(const LabeledDataset& ds, const std::string& path) {
  validate(ds);
  nlohmann::json j;
  j["dim"] = ds.measure.dim;
  auto atoms = nlohmann::json::array();
  for (Eigen::Index k = 0; k < ds.measure.size(); ++k) {
    auto row = nlohmann::json::array();
    for (int i = 0; i < ds.measure.dim; ++i) row.push_back(ds.measure.atoms(i, k));
    atoms.push_back(row);
  }
  j["atoms"] = atoms;
  j["weights"] = std::vector<double>(ds.measure.weights.data(), ds.measure.weights.data() + ds.measure.size());
  auto labels = nlohmann::json::array();
  for (int l : ds.labels) labels.push_back(memory_label_to_file(l));
  j["labels"] = labels;
  if (!ds.description.empty()) j["description"] = ds.description;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  // nlohmann prints doubles with round-trip precision.
  os << j.dump() << '\n';
}

LabeledDataset load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json: ") + e.what(), -1);
  }
  try {
    const int dim = j.at("dim").get<int>();
    const auto& atoms = j.at("atoms");
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(atoms.size());
    if (static_cast<Eigen::Index>(weights.size()) != n) throw ParseError("json: weights length differs from atoms", -1);
    Eigen::MatrixXd a(dim, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto row = atoms[static_cast<std::size_t>(k)].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != dim)
        throw ParseError("json: atom " + std::to_string(k) + " has wrong dimension", k);
      for (int i = 0; i < dim; ++i) a(i, k) = row[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
    check_weights(w);
    LabeledDataset ds;
    ds.measure = make_measure(std::move(a), std::move(w));
    if (j.contains("labels")) {
      const auto raw = j.at("labels").get<std::vector<long long>>();
      if (!raw.empty() && static_cast<Eigen::Index>(raw.size()) != n) throw ParseError("json: labels length differs from atoms", -1);
      for (auto v : raw) ds.labels.push_back(file_label_to_memory(v, -1));
    } else {
      ds.labels.clear();
    }
    ds.description = j.value("description", path);
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json: ") + e.what(), -1);
  }
}

LabeledDataset load_dataset(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return load_json(path);
  return load_csv(path);
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return save_json(ds, path);
  save_csv(ds, path);
}

}  // namespace covfield
