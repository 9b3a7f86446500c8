#include "ftap/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "ftap/errors.hpp"
#include "json.hpp"

namespace ftap {
namespace {

constexpr double kProbSumTol = 1e-12;

void require_finite_node(const TreeNode& n) {
  const bool ok = std::isfinite(n.branch_probability) && std::isfinite(n.sdf_step) &&
                  std::isfinite(n.dividend) && (!n.price || std::isfinite(*n.price));
  if (!ok) throw NonFiniteInput("tree node '" + n.id + "' has a non-finite field");
}

}  // namespace

UncertaintyTree UncertaintyTree::build(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw std::invalid_argument("tree has no nodes");
  UncertaintyTree tree;
  tree.nodes_ = std::move(nodes);
  const std::size_t n = tree.nodes_.size();
  tree.children_.assign(n, {});

  std::size_t root_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes_[i];
    require_finite_node(node);
    if (node.parent < 0) {
      tree.root_ = i;
      ++root_count;
      if (node.time != 0) throw std::invalid_argument("root node must sit at time 0");
      continue;
    }
    if (static_cast<std::size_t>(node.parent) >= n || static_cast<std::size_t>(node.parent) == i)
      throw UnknownNode("node '" + node.id + "' has an invalid parent index");
    const TreeNode& parent = tree.nodes_[static_cast<std::size_t>(node.parent)];
    if (node.time != parent.time + 1)
      throw std::invalid_argument("node '" + node.id + "' breaks level consistency: time " +
                                  std::to_string(node.time) + " under parent at time " +
                                  std::to_string(parent.time));
    if (!(node.branch_probability > 0.0) || node.branch_probability > 1.0)
      throw std::invalid_argument("node '" + node.id + "' needs branch probability in (0, 1]");
    tree.children_[static_cast<std::size_t>(node.parent)].push_back(static_cast<std::uint32_t>(i));
  }
  if (root_count != 1)
    throw std::invalid_argument("tree must have exactly one root, found " +
                                std::to_string(root_count));

  // Reachability from the root also rules out cycles, since every node
  // has one parent and levels increase along edges.
  std::size_t reached = 0;
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(tree.root_)};
  std::vector<char> seen(n, 0);
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = 1;
    ++reached;
    for (std::uint32_t c : tree.children_[u]) stack.push_back(c);
  }
  if (reached != n) throw std::invalid_argument("tree has nodes unreachable from the root");

  int horizon = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!tree.children_[i].empty()) {
      double sum = 0.0;
      for (std::uint32_t c : tree.children_[i]) sum += tree.nodes_[c].branch_probability;
      if (std::abs(sum - 1.0) > kProbSumTol)
        throw std::invalid_argument("children of '" + tree.nodes_[i].id +
                                    "' have probabilities summing to " + std::to_string(sum));
      continue;
    }
    tree.leaves_.push_back(static_cast<std::uint32_t>(i));
    horizon = std::max(horizon, tree.nodes_[i].time);
  }
  for (std::uint32_t leaf : tree.leaves_)
    if (tree.nodes_[leaf].time != horizon)
      throw std::invalid_argument("tree is not leveled: leaf '" + tree.nodes_[leaf].id +
                                  "' ends at time " + std::to_string(tree.nodes_[leaf].time) +
                                  " instead of " + std::to_string(horizon));
  tree.horizon_ = horizon;
  return tree;
}

std::size_t UncertaintyTree::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return i;
  throw UnknownNode("no node with id '" + id + "'");
}

UncertaintyTree load_tree_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tree file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("tree file is not valid JSON: " + std::string(e.what()));
  }
  if (doc.is_object() && doc.contains("nodes")) doc = doc["nodes"];
  if (!doc.is_array()) throw std::invalid_argument("tree file must hold an array of nodes");

  std::vector<TreeNode> nodes;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> parents;
  nodes.reserve(doc.size());
  for (const auto& rec : doc) {
    if (!rec.is_object()) throw std::invalid_argument("tree node record must be an object");
    TreeNode node;
    if (!rec.contains("id") || !rec["id"].is_string())
      throw std::invalid_argument("tree node record needs a string id");
    node.id = rec["id"].get<std::string>();
    if (index.count(node.id)) throw std::invalid_argument("duplicate node id '" + node.id + "'");
    if (!rec.contains("time") || !rec["time"].is_number())
      throw std::invalid_argument("node '" + node.id + "' needs a time");
    node.time = rec["time"].get<int>();
    node.branch_probability = rec.value("prob", 1.0);
    node.sdf_step = rec.value("sdf", 1.0);
    node.dividend = rec.value("dividend", 0.0);
    if (rec.contains("price") && !rec["price"].is_null()) node.price = rec["price"].get<double>();
    std::string parent;
    if (rec.contains("parent") && !rec["parent"].is_null())
      parent = rec["parent"].get<std::string>();
    index.emplace(node.id, nodes.size());
    parents.push_back(parent);
    nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (parents[i].empty()) continue;
    const auto it = index.find(parents[i]);
    if (it == index.end())
      throw UnknownNode("node '" + nodes[i].id + "' references unknown parent '" + parents[i] + "'");
    nodes[i].parent = static_cast<std::int64_t>(it->second);
  }
  return UncertaintyTree::build(std::move(nodes));
}

std::vector<double> compute_pricing_kernel(const UncertaintyTree& tree) {
  const std::size_t n = tree.nodes().size();
  std::vector<double> kernel(n, 0.0);
  kernel[tree.root()] = 1.0;
  // Parents may appear after children in storage order, so walk by
  // stack from the root instead of a flat scan.
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(tree.root())};
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    for (std::uint32_t c : tree.children(u)) {
      const double step = tree.node(c).sdf_step;
      if (step < 0.0)
        throw NegativeSdf("edge into '" + tree.node(c).id + "' has negative deflator step");
      kernel[c] = kernel[u] * step;
      stack.push_back(c);
    }
  }
  return kernel;
}

double conditional_expectation(const UncertaintyTree& tree, const std::vector<double>& values,
                               std::size_t at_node) {
  if (at_node >= tree.nodes().size()) throw UnknownNode("conditional_expectation: bad node index");
  if (values.size() != tree.nodes().size())
    throw DimensionMismatch("conditional_expectation: values must be indexed by node");
  struct Frame {
    std::uint32_t node;
    double prob;
  };
  double acc = 0.0;
  std::vector<Frame> stack{{static_cast<std::uint32_t>(at_node), 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (tree.is_leaf(f.node)) {
      if (!std::isfinite(values[f.node]))
        throw NonFiniteInput("conditional_expectation: non-finite leaf value");
      acc += f.prob * values[f.node];
      continue;
    }
    for (std::uint32_t c : tree.children(f.node))
      stack.push_back({c, f.prob * tree.node(c).branch_probability});
  }
  return acc;
}

std::vector<double> price_backward_induction(const UncertaintyTree& tree) {
  const std::size_t n = tree.nodes().size();
  for (std::uint32_t leaf : tree.leaves())
    if (!tree.node(leaf).price)
      throw MissingTerminalPrices("leaf '" + tree.node(leaf).id + "' has no terminal price");

  std::vector<double> prices(n, 0.0);
  // Process nodes in decreasing time so every child is priced before
  // its parent; child contributions are summed in index order.
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return tree.node(a).time > tree.node(b).time;
  });
  for (std::uint32_t u : order) {
    if (tree.is_leaf(u)) {
      prices[u] = *tree.node(u).price;
      continue;
    }
    double sum = 0.0;
    for (std::uint32_t c : tree.children(u)) {
      const TreeNode& child = tree.node(c);
      if (child.sdf_step < 0.0)
        throw NegativeSdf("edge into '" + child.id + "' has negative deflator step");
      sum += child.branch_probability * child.sdf_step * (prices[c] + child.dividend);
    }
    prices[u] = sum;
  }
  return prices;
}

double price_reduced_lottery(const UncertaintyTree& tree, std::size_t at_node) {
  if (at_node >= tree.nodes().size()) throw UnknownNode("price_reduced_lottery: bad node index");
  for (std::uint32_t leaf : tree.leaves())
    if (!tree.node(leaf).price)
      throw MissingTerminalPrices("leaf '" + tree.node(leaf).id + "' has no terminal price");

  const std::vector<double> kernel = compute_pricing_kernel(tree);
  const double base = kernel[at_node];
  if (base == 0.0)
    throw ZeroKernel("kernel vanishes at '" + tree.node(at_node).id +
                     "'; deflated value undefined there");

  // Accumulate deflated dividends along every path below the node plus
  // the deflated terminal price, then undo the node's own deflation.
  struct Frame {
    std::uint32_t node;
    double prob;
  };
  double acc = 0.0;
  std::vector<Frame> stack{{static_cast<std::uint32_t>(at_node), 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (tree.is_leaf(f.node)) {
      acc += f.prob * kernel[f.node] * *tree.node(f.node).price;
      continue;
    }
    for (std::uint32_t c : tree.children(f.node)) {
      const double prob = f.prob * tree.node(c).branch_probability;
      acc += prob * kernel[c] * tree.node(c).dividend;
      stack.push_back({c, prob});
    }
  }
  return acc / base;
}

MartingaleReport check_martingale(const UncertaintyTree& tree, const std::vector<double>& prices) {
  if (prices.size() != tree.nodes().size())
    throw DimensionMismatch("check_martingale: prices must be indexed by node");
  const std::vector<double> kernel = compute_pricing_kernel(tree);
  const std::size_t n = tree.nodes().size();

  // E[a_T p_T | node], assembled leaves-up.
  std::vector<double> deflated_terminal(n, 0.0);
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return tree.node(a).time > tree.node(b).time;
  });
  for (std::uint32_t u : order) {
    if (tree.is_leaf(u)) {
      deflated_terminal[u] = kernel[u] * prices[u];
      continue;
    }
    double sum = 0.0;
    for (std::uint32_t c : tree.children(u))
      sum += tree.node(c).branch_probability * deflated_terminal[c];
    deflated_terminal[u] = sum;
  }

  MartingaleReport report;
  report.residuals.assign(n, 0.0);
  double max_deflated = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_deflated = std::max(max_deflated, std::abs(kernel[i] * prices[i]));
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.is_leaf(i)) continue;
    const double residual = kernel[i] * prices[i] - deflated_terminal[i];
    report.residuals[i] = residual;
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(residual));
  }
  report.threshold = 1e-9 * (1.0 + max_deflated);
  report.is_martingale = report.max_abs_residual <= report.threshold;
  return report;
}

}  // namespace ftap
