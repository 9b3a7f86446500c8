#ifndef FTAP_TREE_HPP
#define FTAP_TREE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ftap {

// One node of a leveled uncertainty tree. branch_probability and
// sdf_step describe the edge from the parent (the root carries the
// conventional values 1, 1).
struct TreeNode {
  std::string id;
  int time = 0;
  std::int64_t parent = -1;  // index into the node array, -1 for the root
  double branch_probability = 1.0;
  double sdf_step = 1.0;
  std::optional<double> price;  // terminal prices feed backward induction
  double dividend = 0.0;
};

// Leveled event tree: one root at time 0, every leaf at the same
// terminal time, child probabilities summing to one under each parent.
class UncertaintyTree {
 public:
  // Validates structure: single root, parent links acyclic and level
  // consistent (child time = parent time + 1), all leaves at the same
  // depth, branch probabilities in (0, 1] summing to 1 per parent.
  // Throws std::invalid_argument on violations, UnknownNode for a bad
  // parent index, NonFiniteInput for non-finite numeric fields.
  static UncertaintyTree build(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<std::uint32_t>& children(std::size_t i) const { return children_[i]; }
  const std::vector<std::uint32_t>& leaves() const { return leaves_; }
  std::size_t root() const { return root_; }
  int horizon() const { return horizon_; }
  bool is_leaf(std::size_t i) const { return children_[i].empty(); }

  // Index lookup by node id; throws UnknownNode.
  std::size_t index_of(const std::string& id) const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<std::uint32_t> leaves_;
  std::size_t root_ = 0;
  int horizon_ = 0;
};

// JSON file: array (or {"nodes": [...]}) of records {id, parent, time,
// prob, sdf, price?, dividend?}; the root omits parent or sets it null.
UncertaintyTree load_tree_json(const std::string& path);

// Cumulative deflator per node: product of sdf_step down the path from
// the root (root = 1). Throws NegativeSdf if any step is negative.
std::vector<double> compute_pricing_kernel(const UncertaintyTree& tree);

// Probability-weighted average of leaf values over the sub-tree below
// the given node. values is indexed by node; only leaf slots are read.
double conditional_expectation(const UncertaintyTree& tree, const std::vector<double>& values,
                               std::size_t at_node);

// One price per node from terminal prices, folding dividends in as
// they are passed:  p = sum_children prob * sdf * (p_child + d_child).
// Throws MissingTerminalPrices when a leaf has no price.
std::vector<double> price_backward_induction(const UncertaintyTree& tree);

// Same value through the deflated one-shot form: the expectation of
// deflated dividends plus deflated terminal price over paths below the
// node, divided by the node's own kernel. Throws ZeroKernel when that
// kernel is zero.
double price_reduced_lottery(const UncertaintyTree& tree, std::size_t at_node);

struct MartingaleReport {
  bool is_martingale = true;
  double max_abs_residual = 0.0;
  double threshold = 0.0;
  // Residual kernel * price - E[kernel_T * price_T | node] per
  // internal node, indexed like the tree.
  std::vector<double> residuals;
};

// Deflated prices form a martingale exactly when no dividends are paid
// after time zero; any interim dividend shows up as a positive
// residual at its ancestors.
MartingaleReport check_martingale(const UncertaintyTree& tree, const std::vector<double>& prices);

}  // namespace ftap

#endif  // FTAP_TREE_HPP
