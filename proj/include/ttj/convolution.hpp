#pragma once

#include <string>
#include <vector>

#include "ttj/planner.hpp"
#include "ttj/query.hpp"

namespace ttj {

// A node of a tree convolution: an atom alias, or a nested convolution
// (a group of nodes). `root_marked` records the `root:` marker on a nested
// node, placing it at the root of its containing tree.
struct ConvNode {
  std::string atom;
  std::vector<ConvNode> group;
  bool root_marked = false;

  bool is_group() const { return atom.empty(); }
  static ConvNode leaf(std::string alias);
  static ConvNode nest(std::vector<ConvNode> nodes, bool root = false);

  // Atoms anywhere under this node, in listing order.
  std::vector<std::string> atoms() const;
  std::string to_string() const;
};

// The outermost tree of a convolution.
using TreeConvolution = ConvNode;

// Every atom of q appears exactly once, and every group is a join tree after
// replacing nested nodes by fresh atoms over their variables.
bool validate_convolution(const Query& q, const TreeConvolution& c);

// Nested convolutions only sit at the root of their containing tree: each
// group holds at most one nested node and that node is root-marked.
bool is_rooted(const TreeConvolution& c);

// Inside-out plan for a rooted convolution. Each segment is the reverse GYO
// order of one tree; a step whose tree parent is the nested node points at
// the last step of the inner segment with cyclic_parent set. Throws
// PlanError for invalid or non-rooted convolutions.
Plan plan_from_rooted(const Query& q, const TreeConvolution& c);

// Query for one group: its atoms plus one fresh atom per nested node
// (aliases from `nested_aliases`, variables = all variables under the node).
Query group_query(const Query& q, const ConvNode& group,
                  const std::vector<std::string>& nested_aliases);

}  // namespace ttj
