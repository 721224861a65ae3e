// ttj_cli: generate workloads, explain plans, run and benchmark executors.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttj/convolution.hpp"
#include "ttj/error.hpp"
#include "ttj/exec.hpp"
#include "ttj/text_format.hpp"
#include "ttj/workloads.hpp"

namespace fs = std::filesystem;
using namespace ttj;

namespace {

constexpr int kValidation = 2;
constexpr int kIo = 1;

struct RunConfig {
  std::string db_dir;
  std::string query_file;
  std::string plan_file;
  std::string conv_file;
  std::string algo = "ttj";
  std::string opts;
  std::string sink = "count";
  std::string stats_out;
  int repeats = 1;
};

TtjOptions parse_opts(const std::string& s) {
  TtjOptions o;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok == "ng") {
      o.no_good = true;
    } else if (tok == "dp") {
      o.deletion_propagation = true;
    } else if (!tok.empty()) {
      throw PlanError("unknown option '" + tok + "' (expected ng, dp)");
    }
  }
  return o;
}

std::string opts_name(const TtjOptions& o) {
  std::string s;
  if (o.no_good) s += "ng";
  if (o.deletion_propagation) s += s.empty() ? "dp" : ",dp";
  return s;
}

// A configured execution: one of left-deep order, bushy stages, or convolution.
struct Job {
  Query query;
  Database db;
  Algo algo = Algo::ttj;
  TtjOptions opts;
  std::vector<AtomIndex> order;
  std::optional<std::vector<Stage>> stages;
  std::optional<TreeConvolution> conv;
  bool reverse_gyo = false;

  ExecStats run(OutputSink& sink) const {
    if (conv) {
      if (is_rooted(*conv)) return run_ttj(plan_from_rooted(query, *conv), db, sink, opts);
      return run_convolution_staged(algo, query, *conv, db, sink, opts);
    }
    if (stages) return run_stages(algo, query, *stages, db, sink, opts);
    return run_algo(algo, query, order, db, sink, opts);
  }
};

Job load_job(const RunConfig& cfg, const std::string& algo_name, const std::string& opts) {
  Job job;
  job.algo = parse_algo(algo_name);
  job.opts = parse_opts(opts);
  if (job.algo != Algo::ttj && !opts.empty()) throw PlanError("--opts requires --algo ttj");
  job.query = parse_query(read_text_file(cfg.query_file));
  job.db = load_database(cfg.db_dir, false);
  if (!cfg.conv_file.empty()) {
    if (job.algo != Algo::ttj) throw PlanError("--conv requires --algo ttj");
    if (!cfg.plan_file.empty()) throw PlanError("--conv and --plan are exclusive");
    job.conv = parse_convolution(read_text_file(cfg.conv_file));
    if (!validate_convolution(job.query, *job.conv)) {
      throw PlanError("convolution does not cover the query with join trees");
    }
    return job;
  }
  if (!cfg.plan_file.empty()) {
    const auto text = read_text_file(cfg.plan_file);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '(') {
      auto bp = parse_bushy(text);
      auto leaves = bp.leaves();
      std::sort(leaves.begin(), leaves.end());
      auto names = job.query.atoms();
      std::vector<std::string> want;
      for (const auto& a : names) want.push_back(a.alias);
      std::sort(want.begin(), want.end());
      if (leaves != want) throw PlanError("bushy plan leaves must be the query's atoms");
      job.stages = decompose_bushy(bp);
      return job;
    }
    const auto aliases = parse_plan(text);
    const auto plan = compile_plan(job.query, std::span<const std::string>(aliases));
    for (const auto& a : aliases) job.order.push_back(job.query.index_of(a));
  } else {
    job.order = default_order(job.query);
  }
  job.reverse_gyo = is_acyclic(job.query) && validate_reverse_gyo(job.query, job.order);
  if (!job.reverse_gyo && job.algo != Algo::hj) {
    std::cerr << "warning: plan is not consistent with a GYO reduction order; "
                 "the linear time guarantee does not apply\n";
  }
  return job;
}

std::string plan_label(const Job& job) {
  if (job.conv) return job.conv->to_string();
  if (job.stages) {
    std::string s;
    for (const auto& st : *job.stages) {
      s += (s.empty() ? "" : " ; ");
      for (std::size_t i = 0; i < st.order.size(); ++i) s += (i ? " " : "") + st.order[i];
      if (!st.output.empty()) s += " -> " + st.output;
    }
    return s;
  }
  std::string s;
  for (auto a : job.order) s += (s.empty() ? "" : " ") + job.query.atom(a).alias;
  return s;
}

using Record = std::vector<std::pair<std::string, std::string>>;

Record stats_record(const Job& job, const std::string& algo, const ExecStats& s) {
  Record r{{"algo", algo},
           {"opts", opts_name(job.opts)},
           {"plan", plan_label(job)},
           {"reverse_gyo", job.reverse_gyo ? "true" : "false"}};
  for (const auto& [k, v] : s.counters()) r.emplace_back(k, std::to_string(v));
  r.emplace_back("wall_time_ns", std::to_string(s.wall_time.count()));
  return r;
}

nlohmann::ordered_json to_json(const Record& r) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : r) {
    if (k == "reverse_gyo") {
      j[k] = v == "true";
    } else if (k == "algo" || k == "opts" || k == "plan") {
      j[k] = v;
    } else {
      j[k] = std::stoull(v);
    }
  }
  return j;
}

void write_records(const std::string& path, const std::vector<Record>& records) {
  std::ostringstream out;
  if (fs::path(path).extension() == ".json") {
    if (records.size() == 1) {
      out << to_json(records[0]).dump(2) << "\n";
    } else {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : records) arr.push_back(to_json(r));
      out << arr.dump(2) << "\n";
    }
  } else if (records.size() == 1) {
    for (const auto& [k, v] : records[0]) out << k << "=" << v << "\n";
  } else {
    for (std::size_t i = 0; i < records[0].size(); ++i) {
      out << (i ? "," : "") << records[0][i].first;
    }
    out << "\n";
    for (const auto& r : records) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i].second;
      out << "\n";
    }
  }
  write_text_file(path, out.str());
}

ExecStats median_of(std::vector<ExecStats> runs) {
  for (const auto& r : runs) {
    if (!r.same_counters(runs.front())) throw ExecError("counters differ across repeats");
  }
  std::sort(runs.begin(), runs.end(),
            [](const ExecStats& a, const ExecStats& b) { return a.wall_time < b.wall_time; });
  return runs[runs.size() / 2];
}

int cmd_explain(const RunConfig& cfg) {
  auto q = parse_query(read_text_file(cfg.query_file));
  if (!cfg.db_dir.empty()) load_database(cfg.db_dir, false);
  std::cout << "atoms:";
  for (const auto& a : q.atoms()) std::cout << " " << a.alias;
  std::cout << "\n";

  auto print_plan = [&](const Plan& p) {
    std::cout << "plan: [";
    for (PlanPos i = 1; i <= p.size(); ++i) std::cout << (i > 1 ? "," : "") << p.step(i).atom.alias;
    std::cout << "]\n";
    for (PlanPos i = 1; i <= p.size(); ++i) {
      const auto& s = p.step(i);
      std::cout << "  " << i << " " << s.atom.alias << " keys=(";
      for (std::size_t k = 0; k < s.keys.size(); ++k) std::cout << (k ? "," : "") << s.keys[k];
      std::cout << ") parent=";
      if (s.parent_pos) {
        std::cout << p.step(*s.parent_pos).atom.alias << (s.cyclic_parent ? " (cyclic)" : "");
      } else {
        std::cout << "-";
      }
      std::cout << "\n";
    }
  };

  auto g = gyo_reduce(q);
  if (!g.acyclic) {
    std::cout << "verdict: cyclic\nresidual:";
    for (auto a : g.residual) std::cout << " " << q.atom(a).alias;
    std::cout << "\n";
    if (cfg.conv_file.empty()) return 0;
    auto c = parse_convolution(read_text_file(cfg.conv_file));
    if (!validate_convolution(q, c)) throw PlanError("invalid convolution");
    std::cout << "convolution: " << c.to_string() << (is_rooted(c) ? " (rooted)" : " (not rooted)")
              << "\n";
    if (is_rooted(c)) print_plan(plan_from_rooted(q, c));
    return 0;
  }
  // The reduction behind the default plan: GYO over the reversed listing.
  const auto n = q.size();
  const auto rg = gyo_reduce(q.reversed());
  std::cout << "verdict: acyclic\ngyo order: [";
  for (std::size_t i = 0; i < rg.order.size(); ++i) {
    std::cout << (i ? "," : "") << q.atom(n - 1 - rg.order[i]).alias;
  }
  std::cout << "]\njoin tree:";
  for (AtomIndex a = 0; a < n; ++a) {
    if (auto p = rg.forest.parent_of[n - 1 - a]) {
      std::cout << " " << q.atom(a).alias << "->" << q.atom(n - 1 - *p).alias;
    }
  }
  std::cout << "\n";
  std::vector<AtomIndex> order;
  if (!cfg.plan_file.empty()) {
    for (const auto& a : parse_plan(read_text_file(cfg.plan_file))) order.push_back(q.index_of(a));
  } else {
    order = default_order(q);
  }
  const auto plan = compile_plan(q, std::span<const AtomIndex>(order));
  print_plan(plan);
  std::cout << "reverse_gyo: " << (validate_reverse_gyo(q, order) ? "true" : "false") << "\n";
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  if (cfg.repeats < 1) throw PlanError("--repeats must be >= 1");
  const Job job = load_job(cfg, cfg.algo, cfg.opts);
  std::vector<ExecStats> runs;
  std::optional<ResultSet> collected;
  for (int r = 0; r < cfg.repeats; ++r) {
    if (cfg.sink == "count") {
      CountSink sink;
      runs.push_back(job.run(sink));
    } else if (cfg.sink == "collect") {
      CollectSink sink;
      runs.push_back(job.run(sink));
      collected = sink.take();
    } else {
      CsvSink sink(cfg.sink);
      runs.push_back(job.run(sink));
    }
  }
  if (collected) {
    for (std::size_t i = 0; i < collected->vars.size(); ++i) {
      std::cout << (i ? "," : "") << collected->vars[i];
    }
    std::cout << "\n";
    for (const auto& row : collected->rows) std::cout << to_string(std::span<const Value>(row)) << "\n";
  }
  const auto rec = stats_record(job, cfg.algo, median_of(runs));
  if (!cfg.stats_out.empty()) {
    write_records(cfg.stats_out, {rec});
  } else {
    auto& out = collected ? std::cerr : std::cout;
    for (const auto& [k, v] : rec) out << k << "=" << v << "\n";
  }
  return 0;
}

// Each entry of --algo is `name` or `name+opt+opt`, e.g. `ttj+ng`.
int cmd_bench(const RunConfig& cfg) {
  if (cfg.repeats < 1) throw PlanError("--repeats must be >= 1");
  std::vector<Record> records;
  std::stringstream list(cfg.algo);
  std::string entry;
  while (std::getline(list, entry, ',')) {
    auto plus = entry.find('+');
    std::string algo = entry.substr(0, plus);
    std::string opts = cfg.opts;
    if (plus != std::string::npos) {
      opts = entry.substr(plus + 1);
      std::replace(opts.begin(), opts.end(), '+', ',');
    }
    if (parse_algo(algo) != Algo::ttj && plus == std::string::npos) opts.clear();
    const Job job = load_job(cfg, algo, opts);
    std::vector<ExecStats> runs;
    for (int r = 0; r < cfg.repeats; ++r) {
      CountSink sink;
      runs.push_back(job.run(sink));
    }
    records.push_back(stats_record(job, algo, median_of(runs)));
  }
  if (records.empty()) throw PlanError("no algorithms given");

  const std::vector<std::string> shown{"algo",      "opts",         "probes",      "backjumps",
                                       "deletions", "nogood_hits",  "output_count", "wall_time_ns"};
  auto value = [](const Record& r, const std::string& k) {
    for (const auto& [key, v] : r) {
      if (key == k) return v;
    }
    return std::string();
  };
  std::vector<std::size_t> width;
  for (const auto& k : shown) {
    std::size_t w = k.size();
    for (const auto& r : records) w = std::max(w, value(r, k).size());
    width.push_back(w);
  }
  for (std::size_t i = 0; i < shown.size(); ++i) {
    std::cout << std::setw(static_cast<int>(width[i])) << shown[i] << (i + 1 < shown.size() ? "  " : "\n");
  }
  for (const auto& r : records) {
    for (std::size_t i = 0; i < shown.size(); ++i) {
      std::cout << std::setw(static_cast<int>(width[i])) << value(r, shown[i])
                << (i + 1 < shown.size() ? "  " : "\n");
    }
  }
  if (!cfg.stats_out.empty()) write_records(cfg.stats_out, records);
  return 0;
}

int cmd_gen(const std::string& family, std::size_t n, std::uint64_t seed, double dangling,
            const std::string& out) {
  WorkloadSpec spec{parse_family(family), n, seed, dangling};
  auto w = generate(spec);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out + ": " + ec.message());
  write_workload(out, w);
  std::cout << "wrote " << to_string(spec.family) << " N=" << n << " to " << out << "\n";
  return 0;
}

void add_exec_flags(CLI::App* cmd, RunConfig& cfg, bool needs_db) {
  auto* db = cmd->add_option("--db", cfg.db_dir, "directory of <relation>.csv files");
  if (needs_db) db->required();
  cmd->add_option("--query", cfg.query_file, "query file")->required();
  cmd->add_option("--plan", cfg.plan_file, "left-deep alias list or bushy plan");
  cmd->add_option("--conv", cfg.conv_file, "tree convolution file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TreeTracker join engine"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* explain = app.add_subcommand("explain", "acyclicity, GYO order, join tree and plan");
  add_exec_flags(explain, cfg, false);

  auto* run = app.add_subcommand("run", "execute a query");
  auto* bench = app.add_subcommand("bench", "median stats over repeated runs");
  for (auto* cmd : {run, bench}) {
    add_exec_flags(cmd, cfg, true);
    cmd->add_option("--algo", cfg.algo, "hj, ttj or ya (bench: comma list, e.g. hj,ttj+ng)");
    cmd->add_option("--opts", cfg.opts, "ttj options: ng,dp");
    cmd->add_option("--stats", cfg.stats_out, "stats file (.json for JSON)");
    cmd->add_option("--repeats", cfg.repeats, "repetitions");
  }
  run->add_option("--sink", cfg.sink, "collect, count or an output CSV path");

  auto* gen = app.add_subcommand("gen", "write a generated workload");
  std::string family;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double dangling = 0.0;
  std::string out;
  gen->add_option("--family", family, "example1, box, random_acyclic or star")->required();
  gen->add_option("--n", n, "size N")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--dangling", dangling, "dangling fraction")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kValidation;
  }

  try {
    if (*explain) return cmd_explain(cfg);
    if (*run) return cmd_run(cfg);
    if (*bench) return cmd_bench(cfg);
    if (*gen) return cmd_gen(family, n, seed, dangling, out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return 0;
}
