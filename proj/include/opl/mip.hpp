#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opl/matrix.hpp"
#include "opl/scoring.hpp"
#include "opl/tree.hpp"

namespace opl {

struct LinearTerm {
  double coef = 0.0;
  int var = 0;  // index into MipModel::vars
  bool operator==(const LinearTerm&) const = default;
};

struct MipConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  char sense = '<';  // '<' means <=, '>' means >=, '=' means equality
  double rhs = 0.0;
  bool operator==(const MipConstraint&) const = default;
};

struct QuadTerm {
  double coef = 0.0;
  int var1 = 0;
  int var2 = 0;
  bool operator==(const QuadTerm&) const = default;
};

struct VarInfo {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool binary = true;
  bool operator==(const VarInfo&) const = default;
};

/// Policy-tree MIP for a fixed depth: binary split-dimension selectors a_tq
/// and thresholds b_t per branch node, point-to-leaf indicators z_it, and
/// leaf-action indicators c_kt, with a quadratic maximization objective
/// sum z_it c_kt score_ik. Features are min-max normalized to [0,1] during
/// construction. All external indices are 1-based, matching the variable
/// names a_t_q, b_t, z_i_t, c_k_t.
struct MipModel {
  int n = 0, p = 0, depth = 0, d = 0;
  int branch_nodes = 0;  // 2^(depth-1) - 1
  int leaf_nodes = 0;    // 2^(depth-1)
  std::vector<double> epsilon;  // per-dimension separation constants
  double eps_max = 0.0;

  std::vector<VarInfo> vars;  // deterministic order: all a, then b, z, c
  std::vector<QuadTerm> objective;
  std::vector<MipConstraint> constraints;

  std::size_t variable_count() const { return vars.size(); }

  int a_index(int t, int q) const;  // t in [1,branch_nodes], q in [1,p]
  int b_index(int t) const;
  int z_index(int i, int t) const;  // i in [1,n], t in [1,leaf_nodes]
  int c_index(int k, int t) const;  // k in [1,d]

  bool operator==(const MipModel&) const = default;
};

/// Branch nodes on the root-to-leaf path split by which child was taken:
/// (left-branch ids, right-branch ids), 1-based heap numbering, root first.
std::pair<std::vector<int>, std::vector<int>> leaf_paths(int depth, int leaf);

/// Per-dimension smallest nonzero value difference of an already normalized
/// feature matrix, with 1.0 for dimensions whose values are all equal, plus
/// the maximum over dimensions. Throws TooFewRows for fewer than two rows.
std::pair<std::vector<double>, double> epsilon_vector(const Matrix& normalized_features);

/// Min-max normalization to the unit cube; all-equal columns map to 0.
Matrix minmax_normalize(const Matrix& features);

MipModel build_mip(const Matrix& features, const ScoreMatrix& scores, int depth);

/// CPLEX-style LP text with the quadratic objective in square brackets
/// (coefficients literal, no /2 convention). Deterministic bytes; a meta
/// comment preserves the structural fields so parse_lp can reconstruct the
/// identical model.
void write_lp(const MipModel& model, std::ostream& out);
void write_lp(const MipModel& model, const std::string& path);
MipModel parse_lp(std::istream& in);
MipModel parse_lp_file(const std::string& path);

struct CheckResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::string> violations;
};

/// Evaluates every constraint (tolerance 1e-6) and the exact quadratic
/// objective for a full variable assignment keyed by variable name.
/// Throws MissingVariable if any model variable is absent.
CheckResult check_assignment(const MipModel& model,
                             const std::unordered_map<std::string, double>& assignment);

/// Desk-scale oracle: enumerates every single-split structure (midpoints per
/// dimension) and leaf labeling and returns the best attainable objective.
/// Restricted to n <= 10, p <= 2, depth <= 2 (InstanceTooLarge otherwise).
double brute_force_mip_optimum(const Matrix& features, const ScoreMatrix& scores, int depth);

/// Encodes a policy tree (depth at most the model's) as a feasible MIP
/// assignment over the same features the model was built from. Shallower
/// trees are padded with branches that route every point right.
std::unordered_map<std::string, double>
tree_to_assignment(const MipModel& model, const Matrix& features, const TreePolicy& tree);

}  // namespace opl
