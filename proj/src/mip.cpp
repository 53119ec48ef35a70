#include "opl/mip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "opl/errors.hpp"

namespace opl {

namespace {

constexpr double kTol = 1e-6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int MipModel::a_index(int t, int q) const { return (t - 1) * p + (q - 1); }
int MipModel::b_index(int t) const { return branch_nodes * p + (t - 1); }
int MipModel::z_index(int i, int t) const {
  return branch_nodes * (p + 1) + (i - 1) * leaf_nodes + (t - 1);
}
int MipModel::c_index(int k, int t) const {
  return branch_nodes * (p + 1) + n * leaf_nodes + (k - 1) * leaf_nodes + (t - 1);
}

std::pair<std::vector<int>, std::vector<int>> leaf_paths(int depth, int leaf) {
  const int levels = depth - 1;
  std::vector<int> lb, rb;
  int node = 1;
  for (int level = 0; level < levels; ++level) {
    const int bit = ((leaf - 1) >> (levels - 1 - level)) & 1;
    if (bit == 0) {
      lb.push_back(node);
      node = 2 * node;
    } else {
      rb.push_back(node);
      node = 2 * node + 1;
    }
  }
  return {lb, rb};
}

Matrix minmax_normalize(const Matrix& features) {
  Matrix out(features.rows(), features.cols());
  for (std::size_t q = 0; q < features.cols(); ++q) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < features.rows(); ++i) {
      lo = std::min(lo, features.at(i, q));
      hi = std::max(hi, features.at(i, q));
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < features.rows(); ++i) {
      out.at(i, q) = range > 0.0 ? (features.at(i, q) - lo) / range : 0.0;
    }
  }
  return out;
}

namespace {

// Smallest nonzero adjacent difference per sorted column; 1.0 when the
// column has a single distinct value.
std::vector<double> epsilon_impl(const Matrix& normalized) {
  std::vector<double> eps(normalized.cols(), 1.0);
  std::vector<double> column(normalized.rows());
  for (std::size_t q = 0; q < normalized.cols(); ++q) {
    for (std::size_t i = 0; i < normalized.rows(); ++i) column[i] = normalized.at(i, q);
    std::sort(column.begin(), column.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      const double gap = column[i + 1] - column[i];
      if (gap > 0.0) best = std::min(best, gap);
    }
    if (std::isfinite(best)) eps[q] = best;
  }
  return eps;
}

}  // namespace

std::pair<std::vector<double>, double> epsilon_vector(const Matrix& normalized_features) {
  if (normalized_features.rows() < 2) {
    throw TooFewRows("epsilon construction needs at least two rows");
  }
  std::vector<double> eps = epsilon_impl(normalized_features);
  const double eps_max = *std::max_element(eps.begin(), eps.end());
  return {std::move(eps), eps_max};
}

MipModel build_mip(const Matrix& features, const ScoreMatrix& scores, int depth) {
  const int n = static_cast<int>(features.rows());
  if (n < 1) throw DegenerateDataset("MIP construction needs at least one row");
  if (depth < 1) throw ParameterOutOfRange("depth must be >= 1");
  if (scores.size() != features.rows()) {
    throw DimensionMismatch("features and scores must have the same number of rows");
  }

  MipModel model;
  model.n = n;
  model.p = static_cast<int>(features.cols());
  model.depth = depth;
  model.d = scores.num_actions();
  model.branch_nodes = (1 << (depth - 1)) - 1;
  model.leaf_nodes = 1 << (depth - 1);

  const Matrix normalized = minmax_normalize(features);
  model.epsilon = epsilon_impl(normalized);
  model.eps_max = *std::max_element(model.epsilon.begin(), model.epsilon.end());

  // Variables in declaration order: a, b, z, c.
  for (int t = 1; t <= model.branch_nodes; ++t) {
    for (int q = 1; q <= model.p; ++q) {
      model.vars.push_back({"a_" + std::to_string(t) + "_" + std::to_string(q), 0, 1, true});
    }
  }
  for (int t = 1; t <= model.branch_nodes; ++t) {
    model.vars.push_back({"b_" + std::to_string(t), 0, 1, false});
  }
  for (int i = 1; i <= model.n; ++i) {
    for (int t = 1; t <= model.leaf_nodes; ++t) {
      model.vars.push_back({"z_" + std::to_string(i) + "_" + std::to_string(t), 0, 1, true});
    }
  }
  for (int k = 1; k <= model.d; ++k) {
    for (int t = 1; t <= model.leaf_nodes; ++t) {
      model.vars.push_back({"c_" + std::to_string(k) + "_" + std::to_string(t), 0, 1, true});
    }
  }

  for (int i = 1; i <= model.n; ++i) {
    for (int t = 1; t <= model.leaf_nodes; ++t) {
      for (int k = 1; k <= model.d; ++k) {
        const double coef = scores.at(static_cast<std::size_t>(i - 1), k - 1);
        if (coef != 0.0) {
          model.objective.push_back({coef, model.z_index(i, t), model.c_index(k, t)});
        }
      }
    }
  }

  for (int t = 1; t <= model.branch_nodes; ++t) {
    MipConstraint con{"onehot_a_" + std::to_string(t), {}, '=', 1.0};
    for (int q = 1; q <= model.p; ++q) con.terms.push_back({1.0, model.a_index(t, q)});
    model.constraints.push_back(std::move(con));
  }
  for (int i = 1; i <= model.n; ++i) {
    MipConstraint con{"onehot_z_" + std::to_string(i), {}, '=', 1.0};
    for (int t = 1; t <= model.leaf_nodes; ++t) con.terms.push_back({1.0, model.z_index(i, t)});
    model.constraints.push_back(std::move(con));
  }
  for (int t = 1; t <= model.leaf_nodes; ++t) {
    MipConstraint con{"onehot_c_" + std::to_string(t), {}, '=', 1.0};
    for (int k = 1; k <= model.d; ++k) con.terms.push_back({1.0, model.c_index(k, t)});
    model.constraints.push_back(std::move(con));
  }

  // Routing constraints. Left branches use the separation vector so the
  // strict comparison x(q) < b survives as a non-strict inequality:
  //   a_l' (X_i + eps) <= b_l + (1 + eps_max)(1 - z_it).
  // Right branches: a_r' X_i >= b_r - (1 - z_it).
  const double big = 1.0 + model.eps_max;
  for (int t = 1; t <= model.leaf_nodes; ++t) {
    const auto [lb, rb] = leaf_paths(depth, t);
    for (int l : lb) {
      for (int i = 1; i <= model.n; ++i) {
        MipConstraint con{"lb_" + std::to_string(t) + "_" + std::to_string(l) + "_" +
                              std::to_string(i),
                          {}, '<', big};
        for (int q = 1; q <= model.p; ++q) {
          con.terms.push_back({normalized.at(static_cast<std::size_t>(i - 1),
                                             static_cast<std::size_t>(q - 1)) +
                                   model.epsilon[static_cast<std::size_t>(q - 1)],
                               model.a_index(l, q)});
        }
        con.terms.push_back({-1.0, model.b_index(l)});
        con.terms.push_back({big, model.z_index(i, t)});
        model.constraints.push_back(std::move(con));
      }
    }
    for (int r : rb) {
      for (int i = 1; i <= model.n; ++i) {
        MipConstraint con{"rb_" + std::to_string(t) + "_" + std::to_string(r) + "_" +
                              std::to_string(i),
                          {}, '>', -1.0};
        for (int q = 1; q <= model.p; ++q) {
          con.terms.push_back({normalized.at(static_cast<std::size_t>(i - 1),
                                             static_cast<std::size_t>(q - 1)),
                               model.a_index(r, q)});
        }
        con.terms.push_back({-1.0, model.b_index(r)});
        con.terms.push_back({-1.0, model.z_index(i, t)});
        model.constraints.push_back(std::move(con));
      }
    }
  }

  return model;
}

namespace {

void write_linear_terms(std::ostream& out, const MipModel& model,
                        const std::vector<LinearTerm>& terms) {
  bool first = true;
  for (const auto& term : terms) {
    if (first) {
      if (term.coef < 0) out << "- ";
      first = false;
    } else {
      out << (term.coef < 0 ? " - " : " + ");
    }
    out << fmt(std::abs(term.coef)) << " " << model.vars[static_cast<std::size_t>(term.var)].name;
  }
}

}  // namespace

void write_lp(const MipModel& model, std::ostream& out) {
  out << "\\ policy tree MIP\n";
  out << "\\ meta n=" << model.n << " p=" << model.p << " depth=" << model.depth
      << " d=" << model.d << "\n";
  out << "\\ meta eps=";
  for (std::size_t q = 0; q < model.epsilon.size(); ++q) {
    if (q) out << ",";
    out << fmt(model.epsilon[q]);
  }
  out << " eps_max=" << fmt(model.eps_max) << "\n";

  out << "Maximize\n obj: [";
  bool first = true;
  for (const auto& term : model.objective) {
    if (first) {
      out << " ";
      if (term.coef < 0) out << "- ";
      first = false;
    } else {
      out << (term.coef < 0 ? " - " : " + ");
    }
    out << fmt(std::abs(term.coef)) << " " << model.vars[static_cast<std::size_t>(term.var1)].name
        << " * " << model.vars[static_cast<std::size_t>(term.var2)].name;
  }
  out << " ]\n";

  out << "Subject To\n";
  for (const auto& con : model.constraints) {
    out << " " << con.name << ": ";
    write_linear_terms(out, model, con.terms);
    const char* sense = con.sense == '<' ? "<=" : con.sense == '>' ? ">=" : "=";
    out << " " << sense << " " << fmt(con.rhs) << "\n";
  }

  out << "Bounds\n";
  for (const auto& var : model.vars) {
    if (!var.binary) {
      out << " " << fmt(var.lower) << " <= " << var.name << " <= " << fmt(var.upper) << "\n";
    }
  }

  out << "Binaries\n";
  int on_line = 0;
  for (const auto& var : model.vars) {
    if (!var.binary) continue;
    out << (on_line == 0 ? " " : " ") << var.name;
    if (++on_line == 8) {
      out << "\n";
      on_line = 0;
    }
  }
  if (on_line != 0) out << "\n";
  out << "End\n";
}

void write_lp(const MipModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_lp(model, out);
  if (!out.good()) throw IoError("failed writing " + path);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_number(const std::string& tok) {
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw ParseError("bad number in LP file: " + tok);
  return v;
}

}  // namespace

MipModel parse_lp(std::istream& in) {
  std::string line;
  int n = -1, p = -1, depth = -1, d = -1;
  std::vector<double> eps;
  double eps_max = 0.0;
  std::vector<std::string> body;

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '\\') {
      std::istringstream meta(line.substr(1));
      std::string word;
      while (meta >> word) {
        auto grab = [&](const char* key) -> std::string {
          const std::string prefix = std::string(key) + "=";
          if (word.rfind(prefix, 0) == 0) return word.substr(prefix.size());
          return {};
        };
        if (auto v = grab("n"); !v.empty()) n = std::stoi(v);
        if (auto v = grab("p"); !v.empty()) p = std::stoi(v);
        if (auto v = grab("depth"); !v.empty()) depth = std::stoi(v);
        if (auto v = grab("d"); !v.empty()) d = std::stoi(v);
        if (auto v = grab("eps_max"); !v.empty()) eps_max = parse_number(v);
        else if (auto w = grab("eps"); !w.empty()) {
          std::istringstream parts(w);
          std::string piece;
          while (std::getline(parts, piece, ',')) eps.push_back(parse_number(piece));
        }
      }
      continue;
    }
    body.push_back(line);
  }
  if (n < 1 || p < 1 || depth < 1 || d < 1) {
    throw ParseError("LP file is missing the structural meta comment");
  }

  // Rebuild the deterministic skeleton, then fill objective and constraints
  // from the file body and verify the declared sections against it.
  Matrix dummy_features(static_cast<std::size_t>(n), static_cast<std::size_t>(p), 0.0);
  ScoreMatrix dummy_scores{Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(d), 0.0)};
  MipModel model = build_mip(dummy_features, dummy_scores, depth);
  model.constraints.clear();
  model.objective.clear();
  model.epsilon = eps;
  model.eps_max = eps_max;
  if (model.epsilon.size() != static_cast<std::size_t>(p)) {
    throw ParseError("eps meta does not match dimension count");
  }

  std::unordered_map<std::string, int> var_of;
  for (std::size_t idx = 0; idx < model.vars.size(); ++idx) {
    var_of[model.vars[idx].name] = static_cast<int>(idx);
  }
  auto var_id = [&](const std::string& name) {
    auto it = var_of.find(name);
    if (it == var_of.end()) throw ParseError("unknown variable in LP file: " + name);
    return it->second;
  };

  enum class Section { None, Objective, Constraints, Bounds, Binaries, Done };
  Section section = Section::None;
  std::string objective_text;
  std::vector<std::string> constraint_lines;

  for (const auto& raw : body) {
    if (raw.empty()) continue;
    if (raw == "Maximize") { section = Section::Objective; continue; }
    if (raw == "Subject To") { section = Section::Constraints; continue; }
    if (raw == "Bounds") { section = Section::Bounds; continue; }
    if (raw == "Binaries") { section = Section::Binaries; continue; }
    if (raw == "End") { section = Section::Done; continue; }
    switch (section) {
      case Section::Objective: objective_text += raw + " "; break;
      case Section::Constraints: constraint_lines.push_back(raw); break;
      case Section::Bounds: {
        const auto toks = tokenize(raw);  // lo <= name <= hi
        if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=") {
          throw ParseError("bad bounds line: " + raw);
        }
        const int v = var_id(toks[2]);
        if (model.vars[static_cast<std::size_t>(v)].binary) {
          throw ParseError("bounds line for a binary variable: " + raw);
        }
        if (parse_number(toks[0]) != model.vars[static_cast<std::size_t>(v)].lower ||
            parse_number(toks[4]) != model.vars[static_cast<std::size_t>(v)].upper) {
          throw ParseError("bounds mismatch for " + toks[2]);
        }
        break;
      }
      case Section::Binaries: {
        for (const auto& name : tokenize(raw)) {
          if (!model.vars[static_cast<std::size_t>(var_id(name))].binary) {
            throw ParseError("non-binary variable listed in Binaries: " + name);
          }
        }
        break;
      }
      default:
        throw ParseError("unexpected content outside sections: " + raw);
    }
  }

  {  // objective: "obj: [ <terms> ]"
    const auto colon = objective_text.find(':');
    const auto open = objective_text.find('[');
    const auto close = objective_text.rfind(']');
    if (colon == std::string::npos || open == std::string::npos || close == std::string::npos) {
      throw ParseError("malformed objective");
    }
    const auto toks = tokenize(objective_text.substr(open + 1, close - open - 1));
    double sign = 1.0;
    std::size_t pos = 0;
    while (pos < toks.size()) {
      if (toks[pos] == "+") { sign = 1.0; ++pos; continue; }
      if (toks[pos] == "-") { sign = -1.0; ++pos; continue; }
      if (pos + 3 >= toks.size() || toks[pos + 2] != "*") {
        throw ParseError("malformed quadratic term in objective");
      }
      model.objective.push_back({sign * parse_number(toks[pos]),
                                 var_id(toks[pos + 1]), var_id(toks[pos + 3])});
      sign = 1.0;
      pos += 4;
    }
  }

  for (const auto& raw : constraint_lines) {
    const auto colon = raw.find(':');
    if (colon == std::string::npos) throw ParseError("constraint without name: " + raw);
    MipConstraint con;
    con.name = raw.substr(0, colon);
    while (!con.name.empty() && con.name.front() == ' ') con.name.erase(con.name.begin());
    const auto toks = tokenize(raw.substr(colon + 1));
    double sign = 1.0;
    std::size_t pos = 0;
    while (pos < toks.size()) {
      if (toks[pos] == "+") { sign = 1.0; ++pos; continue; }
      if (toks[pos] == "-") { sign = -1.0; ++pos; continue; }
      if (toks[pos] == "<=" || toks[pos] == ">=" || toks[pos] == "=") {
        con.sense = toks[pos] == "<=" ? '<' : toks[pos] == ">=" ? '>' : '=';
        con.rhs = parse_number(toks.at(pos + 1));
        pos += 2;
        if (pos != toks.size()) throw ParseError("trailing tokens in constraint: " + raw);
        break;
      }
      con.terms.push_back({sign * parse_number(toks.at(pos)), var_id(toks.at(pos + 1))});
      sign = 1.0;
      pos += 2;
    }
    model.constraints.push_back(std::move(con));
  }

  return model;
}

MipModel parse_lp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_lp(in);
}

CheckResult check_assignment(const MipModel& model,
                             const std::unordered_map<std::string, double>& assignment) {
  std::vector<double> value(model.vars.size());
  for (std::size_t idx = 0; idx < model.vars.size(); ++idx) {
    auto it = assignment.find(model.vars[idx].name);
    if (it == assignment.end()) {
      throw MissingVariable("assignment is missing " + model.vars[idx].name);
    }
    value[idx] = it->second;
  }

  CheckResult result;
  for (std::size_t idx = 0; idx < model.vars.size(); ++idx) {
    const auto& var = model.vars[idx];
    const double v = value[idx];
    if (var.binary && std::abs(v) > kTol && std::abs(v - 1.0) > kTol) {
      result.violations.push_back(var.name + " not binary");
    }
    if (v < var.lower - kTol || v > var.upper + kTol) {
      result.violations.push_back(var.name + " out of bounds");
    }
  }
  for (const auto& con : model.constraints) {
    double lhs = 0.0;
    for (const auto& term : con.terms) lhs += term.coef * value[static_cast<std::size_t>(term.var)];
    const bool ok = con.sense == '<'   ? lhs <= con.rhs + kTol
                    : con.sense == '>' ? lhs >= con.rhs - kTol
                                       : std::abs(lhs - con.rhs) <= kTol;
    if (!ok) result.violations.push_back(con.name + " violated");
  }
  result.feasible = result.violations.empty();
  for (const auto& term : model.objective) {
    result.objective += term.coef * value[static_cast<std::size_t>(term.var1)] *
                        value[static_cast<std::size_t>(term.var2)];
  }
  return result;
}

double brute_force_mip_optimum(const Matrix& features, const ScoreMatrix& scores, int depth) {
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  const int d = scores.num_actions();
  if (n > 10 || p > 2 || depth > 2) {
    throw InstanceTooLarge("brute-force oracle restricted to n <= 10, p <= 2, depth <= 2");
  }
  if (n == 0) throw DegenerateDataset("need at least one row");

  // Best single leaf.
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < d; ++a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += scores.at(i, a);
    best = std::max(best, sum);
  }
  if (depth == 1) return best;

  for (std::size_t q = 0; q < p; ++q) {
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = features.at(i, q);
    std::vector<double> distinct = column;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t t = 0; t + 1 < distinct.size(); ++t) {
      const double threshold = 0.5 * (distinct[t] + distinct[t + 1]);
      for (int al = 0; al < d; ++al) {
        for (int ar = 0; ar < d; ++ar) {
          double sum = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            sum += scores.at(i, column[i] < threshold ? al : ar);
          }
          best = std::max(best, sum);
        }
      }
    }
  }
  return best;
}

std::unordered_map<std::string, double>
tree_to_assignment(const MipModel& model, const Matrix& features, const TreePolicy& tree) {
  if (static_cast<int>(features.rows()) != model.n ||
      static_cast<int>(features.cols()) != model.p) {
    throw DimensionMismatch("features do not match the model dimensions");
  }
  if (tree.depth() > model.depth) {
    throw DimensionMismatch("tree is deeper than the MIP shape");
  }
  const Matrix normalized = minmax_normalize(features);
  const int tb = model.branch_nodes;

  // Embed the (possibly shallower) tree into the complete shape, heap
  // numbering over branches 1..T_B then leaves T_B+1..T_B+T_L. Padding
  // branches pick dimension 1 with threshold 0, which routes everything
  // to the right child.
  std::vector<int> split_dim(static_cast<std::size_t>(tb) + 1, 1);   // 1-based q
  std::vector<double> raw_threshold(static_cast<std::size_t>(tb) + 1, 0.0);
  std::vector<bool> is_pad(static_cast<std::size_t>(tb) + 1, true);
  std::vector<int> leaf_action(static_cast<std::size_t>(model.leaf_nodes) + 1, 0);

  auto fill = [&](auto&& self, const TreePolicy& node, int heap) -> void {
    if (heap > tb) {
      leaf_action[static_cast<std::size_t>(heap - tb)] = node.is_leaf() ? node.leaf_action() : -1;
      return;
    }
    if (node.is_leaf()) {
      is_pad[static_cast<std::size_t>(heap)] = true;
      self(self, TreePolicy::leaf(0), 2 * heap);
      self(self, node, 2 * heap + 1);
      return;
    }
    is_pad[static_cast<std::size_t>(heap)] = false;
    split_dim[static_cast<std::size_t>(heap)] = node.split_dim() + 1;
    raw_threshold[static_cast<std::size_t>(heap)] = node.split_value();
    self(self, node.left(), 2 * heap);
    self(self, node.right(), 2 * heap + 1);
  };
  fill(fill, tree, 1);

  // Route points through the embedded shape; collect, per real branch, the
  // smallest normalized value among points sent right, which is a feasible
  // threshold for the induced partition.
  std::vector<int> leaf_of(features.rows());
  std::vector<double> min_right(static_cast<std::size_t>(tb) + 1,
                                std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    int heap = 1;
    while (heap <= tb && tb > 0) {
      const std::size_t h = static_cast<std::size_t>(heap);
      if (is_pad[h]) {
        heap = 2 * heap + 1;
        continue;
      }
      const std::size_t q = static_cast<std::size_t>(split_dim[h] - 1);
      if (features.at(i, q) < raw_threshold[h]) {
        heap = 2 * heap;
      } else {
        min_right[h] = std::min(min_right[h], normalized.at(i, q));
        heap = 2 * heap + 1;
      }
    }
    leaf_of[i] = heap - tb;
  }

  std::unordered_map<std::string, double> assignment;
  for (int t = 1; t <= tb; ++t) {
    const std::size_t h = static_cast<std::size_t>(t);
    for (int q = 1; q <= model.p; ++q) {
      assignment["a_" + std::to_string(t) + "_" + std::to_string(q)] =
          q == split_dim[h] ? 1.0 : 0.0;
    }
    double b;
    if (is_pad[h]) {
      b = 0.0;
    } else if (std::isfinite(min_right[h])) {
      b = min_right[h];
    } else {
      b = 1.0;  // no point routed right; any threshold above the left side works
    }
    assignment["b_" + std::to_string(t)] = b;
  }
  for (int i = 1; i <= model.n; ++i) {
    for (int t = 1; t <= model.leaf_nodes; ++t) {
      assignment["z_" + std::to_string(i) + "_" + std::to_string(t)] =
          leaf_of[static_cast<std::size_t>(i - 1)] == t ? 1.0 : 0.0;
    }
  }
  for (int k = 1; k <= model.d; ++k) {
    for (int t = 1; t <= model.leaf_nodes; ++t) {
      assignment["c_" + std::to_string(k) + "_" + std::to_string(t)] =
          leaf_action[static_cast<std::size_t>(t)] == k - 1 ? 1.0 : 0.0;
    }
  }
  return assignment;
}

}  // namespace opl
