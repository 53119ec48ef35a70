#include "opl/tree.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "opl/errors.hpp"

namespace opl {

TreePolicy TreePolicy::leaf(int action) {
  auto node = std::make_shared<Node>();
  node->is_leaf = true;
  node->action = action;
  return TreePolicy(std::move(node));
}

TreePolicy TreePolicy::branch(int split_dim, double split_value,
                              TreePolicy left, TreePolicy right) {
  auto node = std::make_shared<Node>();
  node->is_leaf = false;
  node->split_dim = split_dim;
  node->split_value = split_value;
  node->left = std::move(left.node_);
  node->right = std::move(right.node_);
  return TreePolicy(std::move(node));
}

int TreePolicy::depth() const {
  if (is_leaf()) return 1;
  return 1 + std::max(left().depth(), right().depth());
}

int TreePolicy::assign(std::span<const double> x) const {
  const Node* node = node_.get();
  while (!node->is_leaf) {
    node = x[node->split_dim] < node->split_value ? node->left.get() : node->right.get();
  }
  return node->action;
}

int TreePolicy::min_feature_dim() const {
  if (is_leaf()) return 0;
  return std::max(split_dim() + 1,
                  std::max(left().min_feature_dim(), right().min_feature_dim()));
}

int TreePolicy::max_action() const {
  if (is_leaf()) return leaf_action() + 1;
  return std::max(left().max_action(), right().max_action());
}

namespace {

nlohmann::json node_to_json(const TreePolicy& t) {
  if (t.is_leaf()) {
    return nlohmann::json{{"leaf_action", t.leaf_action()}};
  }
  return nlohmann::json{{"split_dim", t.split_dim()},
                        {"split_value", t.split_value()},
                        {"left", node_to_json(t.left())},
                        {"right", node_to_json(t.right())}};
}

TreePolicy node_from_json(const nlohmann::json& j) {
  if (j.contains("leaf_action")) {
    return TreePolicy::leaf(j.at("leaf_action").get<int>());
  }
  if (!j.contains("split_dim") || !j.contains("split_value") ||
      !j.contains("left") || !j.contains("right")) {
    throw ParseError("tree node needs leaf_action or split_dim/split_value/left/right");
  }
  return TreePolicy::branch(j.at("split_dim").get<int>(),
                            j.at("split_value").get<double>(),
                            node_from_json(j.at("left")),
                            node_from_json(j.at("right")));
}

void render(const TreePolicy& t, int indent, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (t.is_leaf()) {
    out << pad << "action " << t.leaf_action() << "\n";
    return;
  }
  out << pad << "if x[" << t.split_dim() << "] < " << t.split_value() << ":\n";
  render(t.left(), indent + 1, out);
  out << pad << "else:\n";
  render(t.right(), indent + 1, out);
}

}  // namespace

std::string TreePolicy::to_json() const {
  return node_to_json(*this).dump(2);
}

TreePolicy TreePolicy::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid tree JSON: ") + e.what());
  }
  return node_from_json(j);
}

std::string TreePolicy::pretty() const {
  std::ostringstream out;
  render(*this, 0, out);
  return out.str();
}

bool TreePolicy::equals(const Node& a, const Node& b) {
  if (a.is_leaf != b.is_leaf) return false;
  if (a.is_leaf) return a.action == b.action;
  return a.split_dim == b.split_dim && a.split_value == b.split_value &&
         equals(*a.left, *b.left) && equals(*a.right, *b.right);
}

std::vector<int> assign_all(const TreePolicy& tree, const Matrix& points) {
  std::vector<int> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out[i] = tree.assign(points.row(i));
  }
  return out;
}

double hamming_distance(const TreePolicy& a, const TreePolicy& b, const Matrix& points) {
  if (points.rows() == 0) throw EmptyPointSet("hamming distance needs at least one point");
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (a.assign(points.row(i)) != b.assign(points.row(i))) ++disagreements;
  }
  return static_cast<double>(disagreements) / static_cast<double>(points.rows());
}

}  // namespace opl
