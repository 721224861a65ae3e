#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ttj {

// R_i(x_i): an aliased occurrence of a relation with distinct variables bound
// positionally to the relation's columns.
struct Atom {
  std::string alias;
  std::string relation;
  std::vector<std::string> vars;

  bool has_var(std::string_view v) const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

// A full conjunctive query: an ordered list of atoms with distinct aliases.
// List order is the tie-break for every ear and parent search.
class Query {
 public:
  Query() = default;
  explicit Query(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_[i]; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::optional<std::size_t> find(std::string_view alias) const;
  // Throws QueryError when absent.
  std::size_t index_of(std::string_view alias) const;

  // Variables in order of first appearance.
  std::vector<std::string> vars() const;

  // The atoms at `indices`, in the given order.
  Query subquery(std::span<const std::size_t> indices) const;
  Query reversed() const;

 private:
  std::vector<Atom> atoms_;
};

// Atom indices refer to positions in Query::atoms().
using AtomIndex = std::size_t;

// keys(Q, a): variables of a shared with any other atom, in a's variable
// order. Empty for a single-atom query.
std::vector<std::string> key_schema(const Query& q, AtomIndex a);

// First other atom (list order) whose variables cover key_schema(q, a).
std::optional<AtomIndex> find_parent(const Query& q, AtomIndex a);

// First atom (list order) that has a parent; the sole atom of a singleton.
std::optional<AtomIndex> find_ear(const Query& q);

struct JoinForest {
  std::vector<std::optional<AtomIndex>> parent_of;
  std::vector<AtomIndex> roots() const;
};

struct GyoResult {
  bool acyclic = false;
  JoinForest forest;           // valid when acyclic
  std::vector<AtomIndex> order;     // elimination order (complete when acyclic)
  std::vector<AtomIndex> residual;  // irreducible atoms when cyclic
};

// GYO ear removal. Rejects empty queries (ContractViolation) and
// disconnected ones (QueryError, Cartesian product).
GyoResult gyo_reduce(const Query& q);

// As gyo_reduce, but `last` is never removed while other atoms remain, so it
// ends up as the root of the join tree.
GyoResult gyo_reduce(const Query& q, AtomIndex last);

bool is_acyclic(const Query& q);

bool is_connected(const Query& q);

// True iff order[i] is an ear of the subquery order[i..n) for all i < n-1.
bool is_gyo_order(const Query& q, std::span<const AtomIndex> order);

// Join forest: for each variable, the atoms containing it are
// connected through forest edges.
bool is_join_forest(const Query& q, const JoinForest& forest);

}  // namespace ttj
