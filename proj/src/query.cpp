#include "ttj/query.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "ttj/error.hpp"

namespace ttj {

namespace {

bool covers(const Atom& atom, std::span<const std::string> vars) {
  return std::all_of(vars.begin(), vars.end(),
                     [&](const std::string& v) { return atom.has_var(v); });
}

// keys of atom a within the subquery formed by `members` (which contains a).
std::vector<std::string> keys_within(const Query& q,
                                     std::span<const AtomIndex> members,
                                     AtomIndex a) {
  std::vector<std::string> keys;
  for (const auto& v : q.atom(a).vars) {
    bool shared = std::any_of(members.begin(), members.end(), [&](AtomIndex b) {
      return b != a && q.atom(b).has_var(v);
    });
    if (shared) keys.push_back(v);
  }
  return keys;
}

std::optional<AtomIndex> parent_within(const Query& q,
                                       std::span<const AtomIndex> members,
                                       AtomIndex a) {
  auto keys = keys_within(q, members, a);
  for (auto b : members) {
    if (b != a && covers(q.atom(b), keys)) return b;
  }
  return std::nullopt;
}

// Ear search over `members`; `skip` is only eligible once it is alone.
std::optional<AtomIndex> ear_within(const Query& q,
                                    std::span<const AtomIndex> members,
                                    std::optional<AtomIndex> skip) {
  if (members.size() == 1) return members.front();
  for (auto a : members) {
    if (a == skip) continue;
    if (parent_within(q, members, a)) return a;
  }
  return std::nullopt;
}

bool connected_within(const Query& q, std::span<const AtomIndex> members) {
  if (members.empty()) return true;
  std::vector<bool> seen(q.size(), false);
  std::vector<AtomIndex> stack{members.front()};
  seen[members.front()] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto a = stack.back();
    stack.pop_back();
    for (auto b : members) {
      if (seen[b]) continue;
      bool shares = std::any_of(
          q.atom(a).vars.begin(), q.atom(a).vars.end(),
          [&](const std::string& v) { return q.atom(b).has_var(v); });
      if (shares) {
        seen[b] = true;
        ++reached;
        stack.push_back(b);
      }
    }
  }
  return reached == members.size();
}

GyoResult gyo_impl(const Query& q, std::optional<AtomIndex> last) {
  if (q.empty()) throw ContractViolation("gyo_reduce on an empty query");
  if (!is_connected(q)) {
    throw QueryError("query is disconnected (Cartesian product)");
  }
  GyoResult out;
  out.forest.parent_of.assign(q.size(), std::nullopt);
  std::vector<AtomIndex> remaining(q.size());
  std::iota(remaining.begin(), remaining.end(), AtomIndex{0});

  while (!remaining.empty()) {
    auto ear = ear_within(q, remaining, last);
    if (!ear) {
      out.residual = remaining;
      return out;
    }
    out.forest.parent_of[*ear] = parent_within(q, remaining, *ear);
    out.order.push_back(*ear);
    remaining.erase(std::find(remaining.begin(), remaining.end(), *ear));
  }
  out.acyclic = true;
  return out;
}

}  // namespace

bool Atom::has_var(std::string_view v) const {
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

Query::Query(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::set<std::string, std::less<>> aliases;
  for (auto& a : atoms_) {
    if (a.alias.empty()) a.alias = a.relation;
    if (!aliases.insert(a.alias).second) {
      throw QueryError("duplicate atom alias '" + a.alias + "'");
    }
    std::set<std::string, std::less<>> vars;
    for (const auto& v : a.vars) {
      if (!vars.insert(v).second) {
        throw QueryError("atom " + a.alias + " repeats variable '" + v + "'");
      }
    }
  }
}

std::optional<std::size_t> Query::find(std::string_view alias) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].alias == alias) return i;
  }
  return std::nullopt;
}

std::size_t Query::index_of(std::string_view alias) const {
  auto i = find(alias);
  if (!i) throw QueryError("unknown atom '" + std::string(alias) + "'");
  return *i;
}

std::vector<std::string> Query::vars() const {
  std::vector<std::string> out;
  for (const auto& a : atoms_) {
    for (const auto& v : a.vars) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  return out;
}

Query Query::subquery(std::span<const std::size_t> indices) const {
  std::vector<Atom> atoms;
  atoms.reserve(indices.size());
  for (auto i : indices) atoms.push_back(atoms_.at(i));
  return Query(std::move(atoms));
}

Query Query::reversed() const {
  return Query(std::vector<Atom>(atoms_.rbegin(), atoms_.rend()));
}

std::vector<AtomIndex> JoinForest::roots() const {
  std::vector<AtomIndex> out;
  for (std::size_t i = 0; i < parent_of.size(); ++i) {
    if (!parent_of[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::string> key_schema(const Query& q, AtomIndex a) {
  if (a >= q.size()) throw ContractViolation("atom index out of range");
  std::vector<AtomIndex> all(q.size());
  std::iota(all.begin(), all.end(), AtomIndex{0});
  return keys_within(q, all, a);
}

std::optional<AtomIndex> find_parent(const Query& q, AtomIndex a) {
  if (a >= q.size()) throw ContractViolation("atom index out of range");
  std::vector<AtomIndex> all(q.size());
  std::iota(all.begin(), all.end(), AtomIndex{0});
  return parent_within(q, all, a);
}

std::optional<AtomIndex> find_ear(const Query& q) {
  if (q.empty()) throw ContractViolation("find_ear on an empty query");
  std::vector<AtomIndex> all(q.size());
  std::iota(all.begin(), all.end(), AtomIndex{0});
  return ear_within(q, all, std::nullopt);
}

GyoResult gyo_reduce(const Query& q) { return gyo_impl(q, std::nullopt); }

GyoResult gyo_reduce(const Query& q, AtomIndex last) {
  if (last >= q.size()) throw ContractViolation("atom index out of range");
  return gyo_impl(q, last);
}

bool is_acyclic(const Query& q) { return gyo_reduce(q).acyclic; }

bool is_connected(const Query& q) {
  std::vector<AtomIndex> all(q.size());
  std::iota(all.begin(), all.end(), AtomIndex{0});
  return connected_within(q, all);
}

bool is_gyo_order(const Query& q, std::span<const AtomIndex> order) {
  if (order.size() != q.size()) return false;
  std::vector<AtomIndex> sorted(order.begin(), order.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    if (!parent_within(q, order.subspan(i), order[i])) return false;
  }
  return true;
}

bool is_join_forest(const Query& q, const JoinForest& forest) {
  if (forest.parent_of.size() != q.size()) return false;
  // Acyclic parent pointers.
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::size_t steps = 0;
    for (auto p = forest.parent_of[i]; p; p = forest.parent_of[*p]) {
      if (*p >= q.size() || ++steps > q.size()) return false;
    }
  }
  // For each variable, the atoms holding it must form one connected piece:
  // exactly one of them may have a parent that lacks the variable.
  for (const auto& v : q.vars()) {
    std::size_t tops = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!q.atom(i).has_var(v)) continue;
      auto p = forest.parent_of[i];
      if (!p || !q.atom(*p).has_var(v)) ++tops;
    }
    if (tops != 1) return false;
  }
  return true;
}

}  // namespace ttj
