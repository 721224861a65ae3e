#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ttj/catalog.hpp"
#include "ttj/convolution.hpp"
#include "ttj/planner.hpp"
#include "ttj/query.hpp"

namespace ttj {

struct ExecStats {
  std::uint64_t probes = 0;
  std::uint64_t probe_failures = 0;  // keyed probes (position > 1) that miss
  std::uint64_t backjumps = 0;
  std::uint64_t deletions = 0;
  std::uint64_t nogood_adds = 0;
  std::uint64_t nogood_hits = 0;
  std::uint64_t dp_propagations = 0;
  std::uint64_t semijoin_scans = 0;
  std::uint64_t semijoin_removed = 0;
  std::uint64_t build_scans = 0;
  std::uint64_t output_count = 0;
  std::uint64_t input_count = 0;
  // Calls of the recursive join routine (including output calls).
  std::uint64_t step_entries = 0;
  std::uint64_t materializations = 0;
  std::chrono::nanoseconds wall_time{0};

  ExecStats& operator+=(const ExecStats& o);
  // Every counter except wall_time, as (name, value) in a fixed order.
  std::vector<std::pair<std::string, std::uint64_t>> counters() const;
  bool same_counters(const ExecStats& o) const { return counters() == o.counters(); }
};

// Receives each result row exactly once, in the column order announced by
// begin().
class OutputSink {
 public:
  virtual ~OutputSink() = default;
  virtual void begin(const std::vector<std::string>& vars) { (void)vars; }
  virtual void consume(std::span<const Value> row) = 0;
  virtual void end() {}
};

// A bag of rows over named columns.
struct ResultSet {
  std::vector<std::string> vars;
  std::vector<Row> rows;

  // Reorders columns to `order` (a permutation of vars) and sorts the rows.
  ResultSet normalized(const std::vector<std::string>& order) const;
  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

class CollectSink : public OutputSink {
 public:
  void begin(const std::vector<std::string>& vars) override;
  void consume(std::span<const Value> row) override;
  const ResultSet& result() const { return result_; }
  ResultSet take() { return std::move(result_); }

 private:
  ResultSet result_;
};

class CountSink : public OutputSink {
 public:
  void consume(std::span<const Value>) override { ++count_; }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
};

// Streams rows as CSV with a header of variable names.
class CsvSink : public OutputSink {
 public:
  explicit CsvSink(const std::filesystem::path& path);
  void begin(const std::vector<std::string>& vars) override;
  void consume(std::span<const Value> row) override;
  void end() override;

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Collects rows into a relation (used for materialized stages).
class RelationSink : public OutputSink {
 public:
  explicit RelationSink(std::string name) : name_(std::move(name)) {}
  void begin(const std::vector<std::string>& vars) override;
  void consume(std::span<const Value> row) override;
  Relation take() { return std::move(rel_); }

 private:
  std::string name_;
  Relation rel_;
};

// Hooks into executor events. Positions are 1-based plan positions.
class ExecObserver {
 public:
  virtual ~ExecObserver() = default;
  virtual void on_probe(PlanPos pos, bool hit) { (void)pos, (void)hit; }
  // A backjump leaves `from` (a probe miss, or a deletion propagation) for
  // the loop level of `to`.
  virtual void on_backjump(PlanPos from, PlanPos to, bool cyclic) {
    (void)from, (void)to, (void)cyclic;
  }
  // A backjump was caught at `at`; `deleted` tells whether the tuple being
  // iterated there was removed.
  virtual void on_catch(PlanPos at, PlanPos from, bool deleted) {
    (void)at, (void)from, (void)deleted;
  }
  virtual void on_delete(PlanPos pos, const Atom& atom, const Tuple& t) {
    (void)pos, (void)atom, (void)t;
  }
};

struct TtjOptions {
  bool no_good = false;              // ng
  bool deletion_propagation = false;  // dp
};

// Root-level no-good list: per failing child position, key values proven to
// fail for that child.
class NoGoodStore {
 public:
  bool add(PlanPos child, Row key);
  bool contains(PlanPos child, const Row& key) const;
  const std::map<PlanPos, std::unordered_set<Row, RowHash>>& entries() const {
    return lists_;
  }
  std::size_t size() const;

 private:
  std::map<PlanPos, std::unordered_set<Row, RowHash>> lists_;
};

// Pipelined left-deep binary hash join.
ExecStats run_hj(const Plan& plan, const Database& db, OutputSink& sink,
                 ExecObserver* observer = nullptr);

// TreeTracker join: hash join with backjumping on probe misses and deletion
// of the tuple that caused the miss.
ExecStats run_ttj(const Plan& plan, const Database& db, OutputSink& sink,
                  TtjOptions opts = {}, ExecObserver* observer = nullptr);

// Tuples of p whose projection on the shared attributes occurs in r. Adds
// tuples scanned to stats->semijoin_scans; an empty operand short-circuits.
Relation semijoin(const Relation& p, const Relation& r,
                  ExecStats* stats = nullptr);

// One-pass Yannakakis: semijoin reduction along `order` (a GYO reduction
// order), then hash join over reverse(order) on the reduced relations.
ExecStats run_ya(const Query& q, std::span<const AtomIndex> order,
                 const Database& db, OutputSink& sink,
                 ExecObserver* observer = nullptr);

// Brute-force nested-loop evaluation without indexes. Columns follow
// q.vars(); rows sorted.
ResultSet oracle_join(const Query& q, const Database& db);

enum class Algo { hj, ttj, ya };
std::string to_string(Algo a);
Algo parse_algo(const std::string& s);

// Runs `algo` on a left-deep order; for ya the order must be the reverse of
// a GYO order.
ExecStats run_algo(Algo algo, const Query& q, std::span<const AtomIndex> order,
                   const Database& db, OutputSink& sink, TtjOptions opts = {},
                   ExecObserver* observer = nullptr);

// Executes stages in order, materializing each non-final stage into a
// temporary relation. Stats are summed over stages.
ExecStats run_stages(Algo algo, const Query& q, const std::vector<Stage>& stages,
                     const Database& db, OutputSink& sink, TtjOptions opts = {});

// Executes any valid convolution by materializing nested trees innermost
// first; each tree runs with its default order.
ExecStats run_convolution_staged(Algo algo, const Query& q,
                                 const TreeConvolution& c, const Database& db,
                                 OutputSink& sink, TtjOptions opts = {});

}  // namespace ttj
