#include "ttj/exec.hpp"

#include <algorithm>
#include <numeric>

#include "pipeline.hpp"
#include "ttj/error.hpp"

namespace ttj {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  explicit Timer(ExecStats& stats) : stats_(stats), start_(Clock::now()) {}
  ~Timer() {
    stats_.wall_time += std::chrono::duration_cast<std::chrono::nanoseconds>(
        Clock::now() - start_);
  }

 private:
  ExecStats& stats_;
  Clock::time_point start_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Stats and sinks

ExecStats& ExecStats::operator+=(const ExecStats& o) {
  probes += o.probes;
  probe_failures += o.probe_failures;
  backjumps += o.backjumps;
  deletions += o.deletions;
  nogood_adds += o.nogood_adds;
  nogood_hits += o.nogood_hits;
  dp_propagations += o.dp_propagations;
  semijoin_scans += o.semijoin_scans;
  semijoin_removed += o.semijoin_removed;
  build_scans += o.build_scans;
  output_count += o.output_count;
  input_count += o.input_count;
  step_entries += o.step_entries;
  materializations += o.materializations;
  wall_time += o.wall_time;
  return *this;
}

std::vector<std::pair<std::string, std::uint64_t>> ExecStats::counters() const {
  return {
      {"probes", probes},
      {"probe_failures", probe_failures},
      {"backjumps", backjumps},
      {"deletions", deletions},
      {"nogood_adds", nogood_adds},
      {"nogood_hits", nogood_hits},
      {"dp_propagations", dp_propagations},
      {"semijoin_scans", semijoin_scans},
      {"semijoin_removed", semijoin_removed},
      {"build_scans", build_scans},
      {"output_count", output_count},
      {"input_count", input_count},
      {"step_entries", step_entries},
      {"materializations", materializations},
  };
}

ResultSet ResultSet::normalized(const std::vector<std::string>& order) const {
  if (order.size() != vars.size()) {
    throw ContractViolation("normalized: column sets differ");
  }
  std::vector<std::size_t> from;
  for (const auto& v : order) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end()) {
      throw ContractViolation("normalized: unknown column '" + v + "'");
    }
    from.push_back(static_cast<std::size_t>(it - vars.begin()));
  }
  ResultSet out{order, {}};
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    Row nr;
    nr.reserve(from.size());
    for (auto f : from) nr.push_back(r[f]);
    out.rows.push_back(std::move(nr));
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

void CollectSink::begin(const std::vector<std::string>& vars) {
  result_ = ResultSet{vars, {}};
}

void CollectSink::consume(std::span<const Value> row) {
  result_.rows.emplace_back(row.begin(), row.end());
}

CsvSink::CsvSink(const std::filesystem::path& path) : path_(path) {}

void CsvSink::begin(const std::vector<std::string>& vars) {
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot write " + path_.string());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out_ << (i ? "," : "") << vars[i];
  }
  out_ << '\n';
}

void CsvSink::consume(std::span<const Value> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    out_ << (i ? "," : "") << to_string(row[i]);
  }
  out_ << '\n';
}

void CsvSink::end() {
  out_.flush();
  if (!out_) throw IoError("failed writing " + path_.string());
  out_.close();
}

void RelationSink::begin(const std::vector<std::string>& vars) {
  rel_ = Relation(name_, Schema(vars));
}

void RelationSink::consume(std::span<const Value> row) {
  rel_.add(Row(row.begin(), row.end()));
}

bool NoGoodStore::add(PlanPos child, Row key) {
  return lists_[child].insert(std::move(key)).second;
}

bool NoGoodStore::contains(PlanPos child, const Row& key) const {
  auto it = lists_.find(child);
  return it != lists_.end() && it->second.contains(key);
}

std::size_t NoGoodStore::size() const {
  std::size_t n = 0;
  for (const auto& [_, l] : lists_) n += l.size();
  return n;
}

// ---------------------------------------------------------------------------
// Executors

ExecStats run_hj(const Plan& plan, const Database& db, OutputSink& sink,
                 ExecObserver* observer) {
  ExecStats stats;
  {
    Timer t(stats);
    detail::Pipeline p(plan, db, sink, stats, observer, false);
    p.run_hash_join();
  }
  return stats;
}

ExecStats run_ttj(const Plan& plan, const Database& db, OutputSink& sink,
                  TtjOptions opts, ExecObserver* observer) {
  ExecStats stats;
  {
    Timer t(stats);
    detail::Pipeline p(plan, db, sink, stats, observer, false);
    p.run_tree_tracker(opts);
  }
  return stats;
}

Relation semijoin(const Relation& p, const Relation& r, ExecStats* stats) {
  Relation out(p.name(), p.schema());
  if (p.empty() || r.empty()) return out;

  std::vector<std::string> shared;
  for (const auto& a : p.schema().attrs()) {
    if (r.schema().contains(a)) shared.push_back(a);
  }
  const Schema on(shared);
  std::unordered_set<Row, RowHash> keys;
  for (const auto& t : r.tuples()) keys.insert(project(t.values, r.schema(), on));
  out.reserve(p.size());
  for (const auto& t : p.tuples()) {
    if (keys.contains(project(t.values, p.schema(), on))) out.add(t);
  }
  if (stats) stats->semijoin_scans += p.size() + r.size();
  return out;
}

ExecStats run_ya(const Query& q, std::span<const AtomIndex> order,
                 const Database& db, OutputSink& sink, ExecObserver* observer) {
  if (!is_gyo_order(q, order)) {
    throw ExecError("YA needs a GYO reduction order of the query");
  }
  ExecStats stats;
  Timer timer(stats);

  // Per-atom copies with the atom's variables as schema.
  std::vector<Relation> reduced;
  std::uint64_t input = 0;
  reduced.reserve(q.size());
  for (const auto& atom : q.atoms()) {
    const Relation& base = db.get(atom.relation);
    if (base.schema().size() != atom.vars.size()) {
      throw ExecError("atom " + atom.alias + " does not match the arity of " +
                      base.name());
    }
    Relation r(atom.alias, Schema(atom.vars));
    r.reserve(base.size());
    for (const auto& t : base.tuples()) r.add(t);
    input += base.size();
    reduced.push_back(std::move(r));
  }

  std::vector<AtomIndex> remaining(q.size());
  std::iota(remaining.begin(), remaining.end(), AtomIndex{0});
  for (auto atom : order) {
    const Query sub = q.subquery(remaining);
    const auto local = static_cast<AtomIndex>(
        std::find(remaining.begin(), remaining.end(), atom) - remaining.begin());
    auto parent = find_parent(sub, local);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(local));
    if (!parent) continue;
    const AtomIndex p = *parent < local ? remaining[*parent]
                                        : remaining[*parent - 1];
    const std::size_t before = reduced[p].size();
    reduced[p] = semijoin(reduced[p], reduced[atom], &stats);
    stats.semijoin_removed += before - reduced[p].size();
  }

  Database rdb;
  std::vector<Atom> renamed;
  for (std::size_t i = 0; i < q.size(); ++i) {
    Atom a = q.atom(i);
    a.relation = a.alias;
    renamed.push_back(std::move(a));
    rdb.add(std::move(reduced[i]));
  }
  std::vector<AtomIndex> join_order(order.rbegin(), order.rend());
  const Plan plan = compile_plan(Query(std::move(renamed)), join_order);
  detail::Pipeline pipeline(plan, rdb, sink, stats, observer, true);
  pipeline.run_hash_join();
  stats.input_count = input;
  return stats;
}

ResultSet oracle_join(const Query& q, const Database& db) {
  ResultSet out{q.vars(), {}};
  const auto& vars = out.vars;
  struct Bound {
    const Relation* rel;
    std::vector<std::size_t> slots;  // per column
  };
  std::vector<Bound> atoms;
  for (const auto& a : q.atoms()) {
    const Relation& rel = db.get(a.relation);
    if (rel.schema().size() != a.vars.size()) {
      throw ExecError("atom " + a.alias + " does not match the arity of " +
                      rel.name());
    }
    Bound b{&rel, {}};
    for (const auto& v : a.vars) {
      b.slots.push_back(static_cast<std::size_t>(
          std::find(vars.begin(), vars.end(), v) - vars.begin()));
    }
    atoms.push_back(std::move(b));
  }

  Row binding(vars.size());
  // owner[s] = index of the atom that bound slot s, or npos.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(vars.size(), npos);

  auto rec = [&](auto&& self, std::size_t a) -> void {
    if (a == atoms.size()) {
      out.rows.push_back(binding);
      return;
    }
    const Bound& b = atoms[a];
    for (const auto& t : b.rel->tuples()) {
      bool ok = true;
      for (std::size_t c = 0; c < b.slots.size() && ok; ++c) {
        auto s = b.slots[c];
        if (owner[s] != npos && owner[s] < a && binding[s] != t.values[c]) ok = false;
      }
      if (!ok) continue;
      for (std::size_t c = 0; c < b.slots.size(); ++c) {
        auto s = b.slots[c];
        if (owner[s] == npos || owner[s] >= a) {
          owner[s] = a;
          binding[s] = t.values[c];
        }
      }
      self(self, a + 1);
      for (auto s : b.slots) {
        if (owner[s] == a) owner[s] = npos;
      }
    }
  };
  rec(rec, 0);
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch and staged execution

std::string to_string(Algo a) {
  switch (a) {
    case Algo::hj:
      return "hj";
    case Algo::ttj:
      return "ttj";
    case Algo::ya:
      return "ya";
  }
  return "?";
}

Algo parse_algo(const std::string& s) {
  if (s == "hj") return Algo::hj;
  if (s == "ttj") return Algo::ttj;
  if (s == "ya") return Algo::ya;
  throw PlanError("unknown algorithm '" + s + "'");
}

ExecStats run_algo(Algo algo, const Query& q, std::span<const AtomIndex> order,
                   const Database& db, OutputSink& sink, TtjOptions opts,
                   ExecObserver* observer) {
  switch (algo) {
    case Algo::hj:
      return run_hj(compile_plan(q, order), db, sink, observer);
    case Algo::ttj:
      return run_ttj(compile_plan(q, order), db, sink, opts, observer);
    case Algo::ya: {
      if (!validate_reverse_gyo(q, order)) {
        throw ExecError("YA needs a plan that reverses a GYO order");
      }
      std::vector<AtomIndex> gyo(order.rbegin(), order.rend());
      return run_ya(q, gyo, db, sink, observer);
    }
  }
  throw ContractViolation("unknown algorithm");
}

namespace {

// Runs one stage query with `algo`. YA ignores `order` and uses the stage's
// default order.
ExecStats run_stage(Algo algo, const Query& sq,
                    const std::vector<AtomIndex>& order, const Database& db,
                    OutputSink& sink, TtjOptions opts) {
  if (algo == Algo::ya) {
    auto o = default_order(sq);
    return run_algo(algo, sq, o, db, sink, opts);
  }
  return run_algo(algo, sq, order, db, sink, opts);
}

}  // namespace

ExecStats run_stages(Algo algo, const Query& q, const std::vector<Stage>& stages,
                     const Database& db, OutputSink& sink, TtjOptions opts) {
  Database work = db;
  std::map<std::string, Atom> atoms;
  for (const auto& a : q.atoms()) atoms[a.alias] = a;

  ExecStats total;
  for (const auto& stage : stages) {
    std::vector<Atom> sa;
    for (const auto& alias : stage.order) {
      auto it = atoms.find(alias);
      if (it == atoms.end()) throw PlanError("stage names unknown atom '" + alias + "'");
      sa.push_back(it->second);
    }
    const Query sq(std::move(sa));
    std::vector<AtomIndex> order(sq.size());
    std::iota(order.begin(), order.end(), AtomIndex{0});
    if (stage.output.empty()) {
      total += run_stage(algo, sq, order, work, sink, opts);
      continue;
    }
    RelationSink rs(stage.output);
    total += run_stage(algo, sq, order, work, rs, opts);
    Relation temp = rs.take();
    atoms[stage.output] = Atom{stage.output, stage.output, temp.schema().attrs()};
    work.add(std::move(temp));
    ++total.materializations;
  }
  return total;
}

namespace {

struct ConvolutionRunner {
  Algo algo;
  const Query& q;
  Database work;
  TtjOptions opts;
  ExecStats total;
  std::size_t next_temp = 1;

  void run(const ConvNode& group, OutputSink& sink) {
    std::vector<Atom> atoms;
    for (const auto& node : group.group) {
      if (!node.is_group()) {
        atoms.push_back(q.atom(q.index_of(node.atom)));
        continue;
      }
      RelationSink rs("M" + std::to_string(next_temp++));
      run(node, rs);
      Relation temp = rs.take();
      atoms.push_back(Atom{temp.name(), temp.name(), temp.schema().attrs()});
      work.add(std::move(temp));
      ++total.materializations;
    }
    const Query gq(std::move(atoms));
    auto order = default_order(gq);
    total += run_algo(algo, gq, order, work, sink, opts);
  }
};

}  // namespace

ExecStats run_convolution_staged(Algo algo, const Query& q,
                                 const TreeConvolution& c, const Database& db,
                                 OutputSink& sink, TtjOptions opts) {
  if (!validate_convolution(q, c)) {
    throw PlanError("invalid tree convolution " + c.to_string());
  }
  ConvolutionRunner runner{algo, q, db, opts, {}, 1};
  runner.run(c, sink);
  return runner.total;
}

}  // namespace ttj
