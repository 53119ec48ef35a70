#include "opl/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "opl/errors.hpp"

namespace opl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad numeric field '" + s + "' in " + context);
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto& name : split_csv_line(line)) table.header.push_back(name);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw ParseError("row with " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(table.header.size()) + " in " + path);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

ObservationalDataset read_dataset_csv(const std::string& path) {
  const Table table = read_table(path);
  std::size_t p = 0;
  while (p < table.header.size() && table.header[p] == "x" + std::to_string(p)) ++p;
  if (p == 0) throw ParseError(path + ": header must start with x0,x1,...");
  if (p + 2 > table.header.size() || table.header[p] != "action" ||
      table.header[p + 1] != "reward") {
    throw ParseError(path + ": expected action,reward after the feature columns");
  }
  std::size_t d_cols = 0;
  for (std::size_t j = p + 2; j < table.header.size(); ++j) {
    if (table.header[j] != "e" + std::to_string(j - p - 2)) {
      throw ParseError(path + ": unexpected column " + table.header[j]);
    }
    ++d_cols;
  }

  const std::size_t n = table.rows.size();
  if (n == 0) throw ParseError(path + " has no data rows");
  ObservationalDataset ds;
  ds.features = Matrix(n, p);
  ds.actions.resize(n);
  ds.rewards.resize(n);
  int max_action = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < p; ++q) ds.features.at(i, q) = table.rows[i][q];
    const double a = table.rows[i][p];
    ds.actions[i] = static_cast<int>(a);
    if (static_cast<double>(ds.actions[i]) != a) {
      throw ParseError(path + ": non-integer action in row " + std::to_string(i));
    }
    max_action = std::max(max_action, ds.actions[i]);
    ds.rewards[i] = table.rows[i][p + 1];
  }
  if (d_cols > 0) {
    ds.num_actions = static_cast<int>(d_cols);
    ds.known_propensities = Matrix(n, d_cols);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d_cols; ++j) {
        ds.known_propensities->at(i, j) = table.rows[i][p + 2 + j];
      }
    }
  } else {
    ds.num_actions = max_action + 1;
  }
  return ds;
}

void write_dataset_csv(const ObservationalDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t q = 0; q < ds.feature_dim(); ++q) out << "x" << q << ",";
  out << "action,reward";
  if (ds.known_propensities) {
    for (int a = 0; a < ds.num_actions; ++a) out << ",e" << a;
  }
  out << "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t q = 0; q < ds.feature_dim(); ++q) out << fmt(ds.features.at(i, q)) << ",";
    out << ds.actions[i] << "," << fmt(ds.rewards[i]);
    if (ds.known_propensities) {
      for (int a = 0; a < ds.num_actions; ++a) {
        out << "," << fmt(ds.known_propensities->at(i, static_cast<std::size_t>(a)));
      }
    }
    out << "\n";
  }
  if (!out.good()) throw IoError("failed writing " + path);
}

ScoreMatrix read_scores_csv(const std::string& path) {
  const Table table = read_table(path);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] != "g" + std::to_string(j)) {
      throw ParseError(path + ": score header must be g0,g1,...");
    }
  }
  if (table.rows.empty()) throw ParseError(path + " has no data rows");
  ScoreMatrix scores{Matrix(table.rows.size(), table.header.size())};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      scores.values.at(i, j) = table.rows[i][j];
    }
  }
  return scores;
}

void write_scores_csv(const ScoreMatrix& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int a = 0; a < scores.num_actions(); ++a) out << (a ? "," : "") << "g" << a;
  out << "\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (int a = 0; a < scores.num_actions(); ++a) {
      out << (a ? "," : "") << fmt(scores.at(i, a));
    }
    out << "\n";
  }
  if (!out.good()) throw IoError("failed writing " + path);
}

NuisanceOverride read_nuisance_override_csv(const std::string& path) {
  const Table table = read_table(path);
  if (table.header.size() % 2 != 0) {
    throw ParseError(path + ": expected mu_0..mu_{d-1},e_0..e_{d-1} columns");
  }
  const std::size_t d = table.header.size() / 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (table.header[j] != "mu_" + std::to_string(j) ||
        table.header[d + j] != "e_" + std::to_string(j)) {
      throw ParseError(path + ": expected mu_0..mu_{d-1},e_0..e_{d-1} columns");
    }
  }
  if (table.rows.empty()) throw ParseError(path + " has no data rows");
  NuisanceOverride out{Matrix(table.rows.size(), d), Matrix(table.rows.size(), d)};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.mu.at(i, j) = table.rows[i][j];
      out.e.at(i, j) = table.rows[i][d + j];
    }
  }
  return out;
}

TreePolicy read_tree_json(const std::string& path) {
  return TreePolicy::from_json(read_text_file(path));
}

void write_tree_json(const TreePolicy& tree, const std::string& path) {
  write_text_file(path, tree.to_json() + "\n");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out.good()) throw IoError("failed writing " + path);
}

}  // namespace opl
