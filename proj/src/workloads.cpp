#include "ttj/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ttj/error.hpp"
#include "ttj/planner.hpp"
#include "ttj/text_format.hpp"

namespace ttj {

namespace {

// mt19937_64 with draws reduced by hand; no std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

Relation make_relation(std::string name, std::vector<std::string> cols,
                       const std::vector<Row>& rows) {
  Relation r(std::move(name), Schema(std::move(cols)));
  for (const auto& row : rows) r.add(row);
  return r;
}

std::vector<std::string> column_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::example1:
      return "example1";
    case Family::box:
      return "box";
    case Family::random_acyclic:
      return "random_acyclic";
    case Family::star:
      return "star";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "example1") return Family::example1;
  if (s == "box") return Family::box;
  if (s == "random_acyclic") return Family::random_acyclic;
  if (s == "star") return Family::star;
  throw QueryError("unknown workload family '" + s + "'");
}

Workload gen_example1(std::size_t n) {
  if (n == 0) throw ContractViolation("gen_example1 needs N >= 1");
  Workload w;
  w.query = Query({Atom{"R", "R", {"i", "x"}}, Atom{"S", "S", {"x", "y", "j"}},
                   Atom{"T", "T", {"y", "k"}}, Atom{"U", "U", {"y", "l"}}});
  std::vector<Row> r, s, t, u;
  for (std::int64_t v = 1; v <= static_cast<std::int64_t>(n); ++v) {
    r.push_back({v, std::int64_t{1}});
    s.push_back({std::int64_t{1}, std::int64_t{1}, v});
    t.push_back({std::int64_t{1}, v});
    u.push_back({std::int64_t{0}, v});
  }
  w.db.add(make_relation("R", {"i", "x"}, r));
  w.db.add(make_relation("S", {"x", "y", "j"}, s));
  w.db.add(make_relation("T", {"y", "k"}, t));
  w.db.add(make_relation("U", {"y", "l"}, u));
  w.order = default_order(w.query);
  return w;
}

Workload gen_box(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ContractViolation("gen_box needs N >= 1");
  Workload w;
  std::vector<Atom> atoms;
  for (int i = 1; i <= 4; ++i) {
    auto name = "R" + std::to_string(i);
    atoms.push_back(Atom{name, name,
                         {"x" + std::to_string(i), "x" + std::to_string(i % 4 + 1)}});
  }
  for (int i = 1; i <= 4; ++i) {
    auto name = "S" + std::to_string(i);
    atoms.push_back(Atom{name, name, {"x" + std::to_string(i), "y"}});
  }
  w.query = Query(atoms);

  Rng rng(seed);
  const std::size_t count = std::min(n * n, 2 * n);
  for (const auto& a : atoms) {
    std::set<Row> rows;
    while (rows.size() < count) {
      rows.insert(Row{static_cast<std::int64_t>(1 + rng.below(n)),
                      static_cast<std::int64_t>(1 + rng.below(n))});
    }
    std::vector<Row> ordered(rows.begin(), rows.end());
    rng.shuffle(ordered);
    w.db.add(make_relation(a.relation, column_names(2), ordered));
  }

  std::vector<ConvNode> inner;
  for (int i = 1; i <= 4; ++i) inner.push_back(ConvNode::leaf("S" + std::to_string(i)));
  std::vector<ConvNode> outer{ConvNode::nest(std::move(inner), true)};
  for (int i = 1; i <= 4; ++i) outer.push_back(ConvNode::leaf("R" + std::to_string(i)));
  w.convolution = ConvNode::nest(std::move(outer));
  const Plan p = plan_from_rooted(w.query, *w.convolution);
  for (const auto& s : p.steps()) w.order.push_back(w.query.index_of(s.atom.alias));
  return w;
}

Workload gen_random_acyclic(const WorkloadSpec& spec) {
  if (spec.n == 0) throw ContractViolation("random_acyclic needs N >= 1");
  if (spec.dangling_fraction < 0.0 || spec.dangling_fraction > 1.0) {
    throw ContractViolation("dangling_fraction must lie in [0,1]");
  }
  Rng rng(spec.seed);
  constexpr std::size_t kMaxAtoms = 6;
  constexpr std::size_t kMaxVars = 3;
  constexpr std::int64_t kDomain = 3;

  // Random join tree: every atom shares a nonempty subset of its parent's
  // variables and adds fresh ones, so each variable spans a subtree.
  const std::size_t n_atoms = 1 + rng.below(kMaxAtoms);
  std::vector<std::vector<std::string>> vars(n_atoms);
  std::size_t next_var = 0;
  auto fresh = [&] { return "v" + std::to_string(next_var++); };
  for (std::size_t k = 0, nv = 1 + rng.below(kMaxVars); k < nv; ++k) {
    vars[0].push_back(fresh());
  }
  for (std::size_t a = 1; a < n_atoms; ++a) {
    auto pv = vars[rng.below(a)];
    rng.shuffle(pv);
    const std::size_t shared = 1 + rng.below(std::min(pv.size(), kMaxVars));
    vars[a].assign(pv.begin(), pv.begin() + static_cast<std::ptrdiff_t>(shared));
    const std::size_t extra = rng.below(kMaxVars - shared + 1);
    for (std::size_t k = 0; k < extra; ++k) vars[a].push_back(fresh());
    rng.shuffle(vars[a]);
  }

  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < n_atoms; ++a) {
    auto name = "R" + std::to_string(a);
    atoms.push_back(Atom{name, name, vars[a]});
  }
  rng.shuffle(atoms);
  Workload w;
  w.query = Query(atoms);

  const auto all_vars = w.query.vars();
  const auto dangling = static_cast<std::size_t>(
      std::llround(spec.dangling_fraction * static_cast<double>(spec.n)));
  const std::size_t good = spec.n - dangling;
  std::vector<std::vector<std::int64_t>> assignments(good);
  for (auto& as : assignments) {
    for (std::size_t v = 0; v < all_vars.size(); ++v) {
      as.push_back(static_cast<std::int64_t>(rng.below(kDomain)));
    }
  }
  auto var_index = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(all_vars.begin(), all_vars.end(), v) -
                                    all_vars.begin());
  };

  std::int64_t next_fresh = 1000;
  for (std::size_t a = 0; a < w.query.size(); ++a) {
    const Atom& atom = w.query.atom(a);
    std::vector<Row> rows;
    std::set<Row> seen;
    for (const auto& as : assignments) {
      Row row;
      for (const auto& v : atom.vars) row.push_back(as[var_index(v)]);
      if (seen.insert(row).second) rows.push_back(std::move(row));
    }
    const auto keys = key_schema(w.query, a);
    if (!keys.empty()) {
      for (std::size_t d = 0; d < dangling; ++d) {
        Row row;
        for (std::size_t c = 0; c < atom.vars.size(); ++c) {
          row.push_back(static_cast<std::int64_t>(rng.below(kDomain)));
        }
        const auto& kv = keys[rng.below(keys.size())];
        const auto col = static_cast<std::size_t>(
            std::find(atom.vars.begin(), atom.vars.end(), kv) - atom.vars.begin());
        row[col] = next_fresh++;
        rows.push_back(std::move(row));
      }
    }
    rng.shuffle(rows);
    w.db.add(make_relation(atom.relation, column_names(atom.vars.size()), rows));
  }
  w.order = default_order(w.query);
  return w;
}

Workload gen_star(const WorkloadSpec& spec) {
  if (spec.n == 0) throw ContractViolation("star needs N >= 1");
  constexpr int kDims = 3;
  Rng rng(spec.seed);
  const auto n = static_cast<std::int64_t>(spec.n);
  const std::int64_t missing_pool = std::max<std::int64_t>(1, n / 4);

  std::vector<Atom> atoms{Atom{"F", "F", {"d1", "d2", "d3", "m"}}};
  for (int d = 1; d <= kDims; ++d) {
    auto name = "D" + std::to_string(d);
    atoms.push_back(Atom{name, name, {"d" + std::to_string(d), "a" + std::to_string(d)}});
  }
  Workload w;
  w.query = Query(atoms);

  std::vector<Row> fact;
  for (std::int64_t m = 0; m < 4 * n; ++m) {
    Row row;
    for (int d = 0; d < kDims; ++d) row.push_back(static_cast<std::int64_t>(rng.below(spec.n)));
    if (rng.unit() < spec.dangling_fraction) {
      const auto d = rng.below(kDims);
      row[d] = n + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(missing_pool)));
    }
    row.push_back(m);
    fact.push_back(std::move(row));
  }
  w.db.add(make_relation("F", {"d1", "d2", "d3", "m"}, fact));
  for (int d = 1; d <= kDims; ++d) {
    std::vector<Row> rows;
    for (std::int64_t k = 0; k < n; ++k) rows.push_back({k, k * 10 + d});
    w.db.add(make_relation("D" + std::to_string(d), {"key", "attr"}, rows));
  }
  w.order = default_order(w.query);
  return w;
}

Workload generate(const WorkloadSpec& spec) {
  switch (spec.family) {
    case Family::example1:
      return gen_example1(spec.n);
    case Family::box:
      return gen_box(spec.n, spec.seed);
    case Family::random_acyclic:
      return gen_random_acyclic(spec);
    case Family::star:
      return gen_star(spec);
  }
  throw ContractViolation("unknown family");
}

void write_workload(const std::filesystem::path& dir, const Workload& w) {
  write_database(dir, w.db);
  write_text_file(dir / "query.txt", format_query(w.query));
  std::string plan;
  for (auto a : w.order) plan += w.query.atom(a).alias + "\n";
  write_text_file(dir / "plan.txt", plan);
  if (w.convolution) write_text_file(dir / "conv.txt", w.convolution->to_string() + "\n");
}

}  // namespace ttj
