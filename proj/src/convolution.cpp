#include "ttj/convolution.hpp"

#include <algorithm>
#include <map>

#include "ttj/error.hpp"

namespace ttj {

ConvNode ConvNode::leaf(std::string alias) {
  ConvNode n;
  n.atom = std::move(alias);
  return n;
}

ConvNode ConvNode::nest(std::vector<ConvNode> nodes, bool root) {
  ConvNode n;
  n.group = std::move(nodes);
  n.root_marked = root;
  return n;
}

std::vector<std::string> ConvNode::atoms() const {
  if (!is_group()) return {atom};
  std::vector<std::string> out;
  for (const auto& c : group) {
    auto sub = c.atoms();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::string ConvNode::to_string() const {
  if (!is_group()) return atom;
  std::string out = root_marked ? "root:(" : "(";
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i) out += " ";
    out += group[i].to_string();
  }
  return out + ")";
}

Query group_query(const Query& q, const ConvNode& group,
                  const std::vector<std::string>& nested_aliases) {
  std::vector<Atom> atoms;
  std::size_t next_alias = 0;
  for (const auto& node : group.group) {
    if (!node.is_group()) {
      atoms.push_back(q.atom(q.index_of(node.atom)));
      continue;
    }
    if (next_alias >= nested_aliases.size()) {
      throw ContractViolation("group_query: not enough nested aliases");
    }
    Atom v;
    v.alias = nested_aliases[next_alias++];
    v.relation = v.alias;
    for (const auto& a : node.atoms()) {
      for (const auto& x : q.atom(q.index_of(a)).vars) {
        if (!v.has_var(x)) v.vars.push_back(x);
      }
    }
    atoms.push_back(std::move(v));
  }
  return Query(std::move(atoms));
}

namespace {

std::vector<std::string> nested_names(const ConvNode& group) {
  std::vector<std::string> out;
  for (const auto& n : group.group) {
    if (n.is_group()) out.push_back("@nested" + std::to_string(out.size() + 1));
  }
  return out;
}

bool groups_valid(const Query& q, const ConvNode& group) {
  if (!group.is_group() || group.group.empty()) return false;
  std::size_t marked = 0;
  for (const auto& n : group.group) {
    if (!n.is_group()) continue;
    if (n.root_marked) ++marked;
    if (!groups_valid(q, n)) return false;
  }
  if (marked > 1) return false;
  try {
    return is_acyclic(group_query(q, group, nested_names(group)));
  } catch (const QueryError&) {
    return false;
  }
}

struct SegmentBuilder {
  const Query& q;
  std::vector<PlanStep> steps;
  std::vector<PlanPos> ends;
  std::map<std::string, PlanPos> pos_of;

  void emit(const ConvNode& group) {
    const ConvNode* nested = nullptr;
    for (const auto& n : group.group) {
      if (n.is_group()) nested = &n;
    }
    std::optional<PlanPos> inner_last;
    if (nested) {
      emit(*nested);
      inner_last = steps.size();
    }

    const std::string virtual_alias = "@nested1";
    Query gq = group_query(q, group, {virtual_alias});
    auto order = nested ? default_order(gq, gq.index_of(virtual_alias))
                        : default_order(gq);
    Plan local = compile_plan(gq, order);

    for (PlanPos j = 1; j <= local.size(); ++j) {
      const PlanStep& ls = local.step(j);
      if (ls.atom.alias == virtual_alias) continue;
      PlanStep s{ls.atom, {}, std::nullopt, false};
      for (const auto& v : s.atom.vars) {
        bool bound = std::any_of(steps.begin(), steps.end(), [&](const PlanStep& p) {
          return p.atom.has_var(v);
        });
        if (bound) s.keys.push_back(v);
      }
      if (ls.parent_pos) {
        const auto& parent_alias = local.step(*ls.parent_pos).atom.alias;
        if (parent_alias == virtual_alias) {
          s.parent_pos = inner_last;
          s.cyclic_parent = true;
        } else {
          s.parent_pos = pos_of.at(parent_alias);
        }
      }
      steps.push_back(std::move(s));
      pos_of[steps.back().atom.alias] = steps.size();
    }
    ends.push_back(steps.size());
  }
};

}  // namespace

bool validate_convolution(const Query& q, const TreeConvolution& c) {
  if (!c.is_group()) return false;
  auto atoms = c.atoms();
  if (atoms.size() != q.size()) return false;
  std::vector<bool> seen(q.size(), false);
  for (const auto& a : atoms) {
    auto i = q.find(a);
    if (!i || seen[*i]) return false;
    seen[*i] = true;
  }
  return groups_valid(q, c);
}

bool is_rooted(const TreeConvolution& c) {
  if (!c.is_group()) return true;
  std::size_t nested = 0;
  for (const auto& n : c.group) {
    if (!n.is_group()) continue;
    if (!n.root_marked || ++nested > 1) return false;
    if (!is_rooted(n)) return false;
  }
  return true;
}

Plan plan_from_rooted(const Query& q, const TreeConvolution& c) {
  if (!validate_convolution(q, c)) {
    throw PlanError("invalid tree convolution " + c.to_string());
  }
  if (!is_rooted(c)) {
    throw PlanError("convolution " + c.to_string() +
                    " is not rooted; execute it stage-wise with materialization");
  }
  SegmentBuilder b{q, {}, {}, {}};
  b.emit(c);
  return Plan(q, std::move(b.steps), std::move(b.ends));
}

}  // namespace ttj
