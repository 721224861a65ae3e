#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ttj/catalog.hpp"
#include "ttj/exec.hpp"
#include "ttj/planner.hpp"
#include "ttj/query.hpp"
#include "ttj/text_format.hpp"

namespace ttj::testing {

inline Query q1() {
  return parse_query("R(i,x)\nS(x,y,j)\nT(y,k)\nU(y,l)\n");
}

inline Query triangle() { return parse_query("R(a,b)\nS(b,c)\nT(c,a)\n"); }

inline Query box_query() {
  return parse_query(
      "R1(x1,x2)\nR2(x2,x3)\nR3(x3,x4)\nR4(x4,x1)\n"
      "S1(x1,y)\nS2(x2,y)\nS3(x3,y)\nS4(x4,y)\n");
}

inline std::vector<std::string> aliases(const Query& q,
                                        const std::vector<AtomIndex>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(q.atom(i).alias);
  return out;
}

inline std::vector<AtomIndex> indices(const Query& q,
                                      const std::vector<std::string>& names) {
  std::vector<AtomIndex> out;
  for (const auto& n : names) out.push_back(q.index_of(n));
  return out;
}

inline Relation relation(const std::string& name, std::vector<std::string> cols,
                         const std::vector<std::vector<std::int64_t>>& rows) {
  Relation r(name, Schema(std::move(cols)));
  for (const auto& row : rows) {
    Row v;
    for (auto x : row) v.push_back(x);
    r.add(std::move(v));
  }
  return r;
}

inline ResultSet collect(const Query& q, const std::function<ExecStats(OutputSink&)>& run,
                         ExecStats* stats = nullptr) {
  CollectSink sink;
  auto s = run(sink);
  if (stats) *stats = s;
  return sink.result().normalized(q.vars());
}

// Records every executor event.
class TraceRecorder : public ExecObserver {
 public:
  struct Jump {
    PlanPos from, to;
    bool cyclic;
  };
  struct Catch {
    PlanPos at, from;
    bool deleted;
  };
  struct Deletion {
    PlanPos pos;
    Atom atom;
    Tuple tuple;
  };
  std::vector<Jump> jumps;
  std::vector<Catch> catches;
  std::vector<Deletion> deletions;
  std::size_t probes = 0;

  void on_probe(PlanPos, bool) override { ++probes; }
  void on_backjump(PlanPos from, PlanPos to, bool cyclic) override {
    jumps.push_back({from, to, cyclic});
  }
  void on_catch(PlanPos at, PlanPos from, bool deleted) override {
    catches.push_back({at, from, deleted});
  }
  void on_delete(PlanPos pos, const Atom& atom, const Tuple& t) override {
    deletions.push_back({pos, atom, t});
  }
};

// Independent probe count for binary hash join: one probe for the root plus
// one per tuple of every proper non-empty prefix join, computed by the
// brute-force oracle.
inline std::uint64_t hj_probe_oracle(const Query& q, const std::vector<AtomIndex>& order,
                                     const Database& db) {
  std::uint64_t probes = 1;
  for (std::size_t len = 1; len < order.size(); ++len) {
    std::vector<AtomIndex> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
    probes += oracle_join(q.subquery(prefix), db).rows.size();
  }
  return probes;
}

// No output row of `result` (columns = q.vars()) agrees with the deleted
// tuple on all of its atom's variables.
inline bool deletion_is_dangling(const ResultSet& result, const Atom& atom,
                                 const Tuple& t) {
  std::vector<std::size_t> cols;
  for (const auto& v : atom.vars) {
    cols.push_back(static_cast<std::size_t>(
        std::find(result.vars.begin(), result.vars.end(), v) - result.vars.begin()));
  }
  return std::none_of(result.rows.begin(), result.rows.end(), [&](const Row& row) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (row[cols[c]] != t.values[c]) return false;
    }
    return true;
  });
}

}  // namespace ttj::testing
