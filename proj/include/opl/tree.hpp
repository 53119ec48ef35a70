#pragma once

#include <memory>
#include <span>
#include <string>

#include "opl/matrix.hpp"

namespace opl {

/// Depth-L decision tree policy with axis-aligned threshold splits.
/// A point x routes left iff x[split_dim] < split_value (ties go right)
/// and the leaf it reaches gives the action. Trees are immutable values;
/// copies share structure.
class TreePolicy {
 public:
  static TreePolicy leaf(int action);
  static TreePolicy branch(int split_dim, double split_value,
                           TreePolicy left, TreePolicy right);

  bool is_leaf() const { return node_->is_leaf; }
  int leaf_action() const { return node_->action; }
  int split_dim() const { return node_->split_dim; }
  double split_value() const { return node_->split_value; }
  TreePolicy left() const { return TreePolicy(node_->left); }
  TreePolicy right() const { return TreePolicy(node_->right); }

  /// Number of layers, counting leaves; a bare leaf has depth 1.
  int depth() const;

  /// Routes x to its leaf action.
  int assign(std::span<const double> x) const;

  /// Largest split dimension index + 1 (0 for a bare leaf); the minimum
  /// feature dimension this tree can be applied to.
  int min_feature_dim() const;
  /// Largest leaf action index + 1.
  int max_action() const;

  /// JSON object form: branches are {"split_dim", "split_value", "left",
  /// "right"}, leaves are {"leaf_action"}. Floats round-trip exactly.
  std::string to_json() const;
  static TreePolicy from_json(const std::string& text);

  /// Human-readable indented rendering.
  std::string pretty() const;

  bool operator==(const TreePolicy& other) const { return equals(*node_, *other.node_); }

 private:
  struct Node {
    bool is_leaf = true;
    int action = 0;
    int split_dim = 0;
    double split_value = 0.0;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit TreePolicy(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static bool equals(const Node& a, const Node& b);

  std::shared_ptr<const Node> node_;
};

/// Assigns every row of `points` through the tree.
std::vector<int> assign_all(const TreePolicy& tree, const Matrix& points);

/// Fraction of rows of `points` on which the two policies disagree.
/// Throws EmptyPointSet when `points` has no rows.
double hamming_distance(const TreePolicy& a, const TreePolicy& b, const Matrix& points);

}  // namespace opl
