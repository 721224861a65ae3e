#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttj/query.hpp"

namespace ttj {

// 1-based plan position.
using PlanPos = std::size_t;

struct PlanStep {
  Atom atom;
  // Variables of atom already bound by earlier steps, in atom variable order.
  std::vector<std::string> keys;
  // Backjump target on a probe miss, if any.
  std::optional<PlanPos> parent_pos;
  // Backjumps to this parent must not delete (parent is the last relation of
  // a nested convolution segment).
  bool cyclic_parent = false;
};

// A left-deep linear plan. Positions are 1-based: step(1) is the left-most
// relation, probed through the degenerate index under key ().
class Plan {
 public:
  Plan() = default;
  Plan(Query query, std::vector<PlanStep> steps,
       std::vector<PlanPos> segment_ends = {});

  const Query& query() const { return query_; }
  std::size_t size() const { return steps_.size(); }
  const PlanStep& step(PlanPos i) const { return steps_.at(i - 1); }
  const std::vector<PlanStep>& steps() const { return steps_; }

  // Last position of each segment p_1..p_m. A plain plan has one segment.
  const std::vector<PlanPos>& segment_ends() const { return segment_ends_; }
  // 1-based segment number holding position i.
  std::size_t segment_of(PlanPos i) const;
  bool has_cyclic_parents() const;

  std::vector<std::string> aliases() const;
  // Variables in plan discovery order: output column order of executors.
  std::vector<std::string> output_vars() const;

 private:
  Query query_;
  std::vector<PlanStep> steps_;
  std::vector<PlanPos> segment_ends_;
};

// keys and first-match parents over each prefix of `order`.
Plan compile_plan(const Query& q, std::span<const AtomIndex> order);
Plan compile_plan(const Query& q, std::span<const std::string> aliases);

// True iff reverse(order) is a GYO reduction order of q.
bool validate_reverse_gyo(const Query& q, std::span<const AtomIndex> order);

// Reverse of the GYO order found when scanning the atom listing back to
// front; follows the listing whenever the listing is already top-down.
// QueryError when q is cyclic or disconnected.
std::vector<AtomIndex> default_order(const Query& q);
// As default_order, with `root` placed first.
std::vector<AtomIndex> default_order(const Query& q, AtomIndex root);

// A binary join tree over atom aliases.
struct BushyPlan {
  std::string leaf;  // set on leaves
  std::unique_ptr<BushyPlan> left;
  std::unique_ptr<BushyPlan> right;

  static BushyPlan make_leaf(std::string alias);
  static BushyPlan join(BushyPlan l, BushyPlan r);
  bool is_leaf() const { return !left; }
  std::vector<std::string> leaves() const;
  std::string to_string() const;
};

// One left-deep stage: `order` lists atom aliases, where earlier stage outputs
// appear under their `output` names.
struct Stage {
  std::vector<std::string> order;
  std::string output;  // empty for the final stage
};

// Post-order decomposition: every non-leaf right subtree becomes an earlier
// stage producing a temporary named M1, M2, ...
std::vector<Stage> decompose_bushy(const BushyPlan& bp);

}  // namespace ttj
