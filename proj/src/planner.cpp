#include "ttj/planner.hpp"

#include <algorithm>

#include "ttj/error.hpp"

namespace ttj {

Plan::Plan(Query query, std::vector<PlanStep> steps,
           std::vector<PlanPos> segment_ends)
    : query_(std::move(query)),
      steps_(std::move(steps)),
      segment_ends_(std::move(segment_ends)) {
  if (segment_ends_.empty() && !steps_.empty()) {
    segment_ends_.push_back(steps_.size());
  }
}

std::size_t Plan::segment_of(PlanPos i) const {
  for (std::size_t s = 0; s < segment_ends_.size(); ++s) {
    if (i <= segment_ends_[s]) return s + 1;
  }
  throw ContractViolation("plan position out of range");
}

bool Plan::has_cyclic_parents() const {
  return std::any_of(steps_.begin(), steps_.end(),
                     [](const PlanStep& s) { return s.cyclic_parent; });
}

std::vector<std::string> Plan::aliases() const {
  std::vector<std::string> out;
  for (const auto& s : steps_) out.push_back(s.atom.alias);
  return out;
}

std::vector<std::string> Plan::output_vars() const {
  std::vector<std::string> out;
  for (const auto& s : steps_) {
    for (const auto& v : s.atom.vars) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  return out;
}

Plan compile_plan(const Query& q, std::span<const AtomIndex> order) {
  std::vector<bool> used(q.size(), false);
  if (order.size() != q.size()) {
    throw PlanError("plan has " + std::to_string(order.size()) +
                    " steps but the query has " + std::to_string(q.size()) +
                    " atoms");
  }
  for (auto a : order) {
    if (a >= q.size() || used[a]) {
      throw PlanError("plan is not a permutation of the query atoms");
    }
    used[a] = true;
  }

  std::vector<PlanStep> steps;
  steps.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Atom& atom = q.atom(order[i]);
    PlanStep step{atom, {}, std::nullopt, false};
    for (const auto& v : atom.vars) {
      bool bound = std::any_of(steps.begin(), steps.end(), [&](const PlanStep& s) {
        return s.atom.has_var(v);
      });
      if (bound) step.keys.push_back(v);
    }
    // find_parent over the prefix, restricted to earlier steps.
    for (std::size_t j = 0; j < i; ++j) {
      const Atom& cand = steps[j].atom;
      bool ok = std::all_of(step.keys.begin(), step.keys.end(),
                            [&](const std::string& v) { return cand.has_var(v); });
      if (ok) {
        step.parent_pos = j + 1;
        break;
      }
    }
    steps.push_back(std::move(step));
  }
  return Plan(q, std::move(steps));
}

Plan compile_plan(const Query& q, std::span<const std::string> aliases) {
  std::vector<AtomIndex> order;
  order.reserve(aliases.size());
  for (const auto& a : aliases) {
    auto i = q.find(a);
    if (!i) throw PlanError("plan names unknown atom '" + a + "'");
    order.push_back(*i);
  }
  return compile_plan(q, order);
}

bool validate_reverse_gyo(const Query& q, std::span<const AtomIndex> order) {
  std::vector<AtomIndex> rev(order.rbegin(), order.rend());
  return is_gyo_order(q, rev);
}

namespace {

std::vector<AtomIndex> order_from_reversed(const Query& q,
                                           std::optional<AtomIndex> root) {
  const Query rev = q.reversed();
  const std::size_t n = q.size();
  auto g = root ? gyo_reduce(rev, n - 1 - *root) : gyo_reduce(rev);
  if (!g.acyclic) throw QueryError("query is cyclic");
  std::vector<AtomIndex> out;
  out.reserve(n);
  for (auto it = g.order.rbegin(); it != g.order.rend(); ++it) {
    out.push_back(n - 1 - *it);
  }
  return out;
}

}  // namespace

std::vector<AtomIndex> default_order(const Query& q) {
  return order_from_reversed(q, std::nullopt);
}

std::vector<AtomIndex> default_order(const Query& q, AtomIndex root) {
  return order_from_reversed(q, root);
}

// ---------------------------------------------------------------------------
// Bushy plans

BushyPlan BushyPlan::make_leaf(std::string alias) {
  BushyPlan p;
  p.leaf = std::move(alias);
  return p;
}

BushyPlan BushyPlan::join(BushyPlan l, BushyPlan r) {
  BushyPlan p;
  p.left = std::make_unique<BushyPlan>(std::move(l));
  p.right = std::make_unique<BushyPlan>(std::move(r));
  return p;
}

std::vector<std::string> BushyPlan::leaves() const {
  if (is_leaf()) return {leaf};
  auto out = left->leaves();
  auto r = right->leaves();
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::string BushyPlan::to_string() const {
  if (is_leaf()) return leaf;
  return "(" + left->to_string() + " " + right->to_string() + ")";
}

namespace {

struct Decomposer {
  std::vector<Stage> stages;
  std::size_t next_temp = 1;

  // Flattens the left spine of `node` into `order`; non-leaf right children
  // are materialized first.
  void spine(const BushyPlan& node, std::vector<std::string>& order) {
    if (node.is_leaf()) {
      order.push_back(node.leaf);
      return;
    }
    spine(*node.left, order);
    if (node.right->is_leaf()) {
      order.push_back(node.right->leaf);
    } else {
      order.push_back(materialize(*node.right));
    }
  }

  std::string materialize(const BushyPlan& node) {
    std::vector<std::string> order;
    spine(node, order);
    std::string name = "M" + std::to_string(next_temp++);
    stages.push_back(Stage{std::move(order), name});
    return name;
  }
};

}  // namespace

std::vector<Stage> decompose_bushy(const BushyPlan& bp) {
  Decomposer d;
  std::vector<std::string> order;
  d.spine(bp, order);
  d.stages.push_back(Stage{std::move(order), ""});
  return d.stages;
}

}  // namespace ttj
